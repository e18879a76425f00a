//! Decoherence sweeps on random strategic states.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QdtError, Result};
use crate::quantum::{
    decohere, normalize_prospect_set, prospect_probability, random_density_operator,
    sample_inconclusive, Complex64, DensityOperator, ProbabilityTriple, Prospect, ProspectDims,
    DEFAULT_MAX_DIM,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulateOptions {
    pub dims: ProspectDims,
    pub seed: u64,
    /// Number of damping increments; the sweep has `sweep_steps + 1` rows from 0 to 1.
    pub sweep_steps: usize,
    pub max_dim: usize,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        Self {
            dims: ProspectDims {
                conclusive: 3,
                inconclusive: 2,
            },
            seed: 0,
            sweep_steps: 10,
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

/// Normalized `(p, f, q)` for every prospect at one damping level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub damping: f64,
    pub prospects: Vec<ProbabilityTriple>,
}

/// Raw triples for every conclusive outcome `n`, sharing the same coefficients `b`.
pub fn prospect_set(rho: &DensityOperator, b: &[Complex64], dims: ProspectDims) -> Result<Vec<ProbabilityTriple>> {
    (0..dims.conclusive)
        .map(|n| prospect_probability(rho, &Prospect::new(n, b.to_vec())?, dims))
        .collect()
}

/// Draws a random state and coefficients from `seed`, then sweeps damping from 0 to 1.
pub fn damping_sweep(opts: &SimulateOptions) -> Result<Vec<SweepRow>> {
    let total = opts.dims.total();
    if total > opts.max_dim {
        return Err(QdtError::Domain(format!(
            "dimension {}x{} = {total} exceeds cap {}",
            opts.dims.conclusive, opts.dims.inconclusive, opts.max_dim
        )));
    }
    if opts.sweep_steps == 0 {
        return Err(QdtError::Domain("sweep needs at least one step".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let rho = random_density_operator(total, &mut rng)?;
    let b = sample_inconclusive(opts.dims.inconclusive, rng.next_u64())?;
    (0..=opts.sweep_steps)
        .map(|k| {
            let damping = k as f64 / opts.sweep_steps as f64;
            let damped = decohere(&rho, damping, opts.dims)?;
            let prospects = normalize_prospect_set(&prospect_set(&damped, &b, opts.dims)?)?;
            Ok(SweepRow { damping, prospects })
        })
        .collect()
}

pub fn render_sweep_table(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let n = rows.first().map_or(0, |r| r.prospects.len());
    out.push_str(&format!("{:>8}", "damping"));
    for i in 0..n {
        out.push_str(&format!(" {:>11} {:>11} {:>11}", format!("p{i}"), format!("f{i}"), format!("q{i}")));
    }
    out.push('\n');
    for row in rows {
        out.push_str(&format!("{:>8.3}", row.damping));
        for t in &row.prospects {
            out.push_str(&format!(" {:>11.7} {:>11.7} {:>11.7}", t.p, t.f, t.q));
        }
        out.push('\n');
    }
    out
}

pub fn render_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("damping,prospect,p,f,q\n");
    for row in rows {
        for (i, t) in row.prospects.iter().enumerate() {
            out.push_str(&format!("{},{},{},{},{}\n", row.damping, i, t.p, t.f, t.q));
        }
    }
    out
}
