//! Seeded verification suites with fixed pass thresholds.
//!
//! | suite              | check                                                         |
//! |--------------------|---------------------------------------------------------------|
//! | `quarter-law`      | Monte Carlo `∫₀¹ φ(x) x dx` for uniform `φ` within 0.25 ± 0.005; exact sets have mean `|q|` = 1/4 |
//! | `gaps`             | mean gaps of sorted uniforms differ by less than 3e-3          |
//! | `entropy`          | power-law factors minimize the information functionals         |
//! | `quantum-identity` | `p = f + q` and set normalization to 1e-12                     |

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attraction::{
    mean_abs_uniform, ordered_uniform_gap_check, quantized_attraction_set, quarter_law_check,
};
use crate::error::{QdtError, Result};
use crate::priors::{
    information_functional_gains, information_functional_losses, utility_factors_gains,
    utility_factors_losses,
};
use crate::quantum::{
    normalize_prospect_set, random_density_operator, sample_inconclusive, ProspectDims,
};
use crate::simulate::prospect_set;

pub const QUARTER_LAW_SAMPLES: usize = 1_000_000;
pub const QUARTER_LAW_TOL: f64 = 0.005;
/// Largest `N` for the exact mean-modulus check over quantized sets.
pub const QUARTER_LAW_MAX_SET: usize = 1000;
pub const GAP_SAMPLES: usize = 100_000;
pub const GAP_SPREAD_TOL: f64 = 3e-3;
pub const ENTROPY_PERTURBATIONS: usize = 10_000;
pub const ENTROPY_VECTORS_PER_REGIME: usize = 20;
pub const ENTROPY_MARGIN: f64 = -1e-9;
pub const IDENTITY_DRAWS: usize = 1000;
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    QuarterLaw,
    Gaps,
    Entropy,
    QuantumIdentity,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::QuarterLaw, Suite::Gaps, Suite::Entropy, Suite::QuantumIdentity];

    pub fn name(self) -> &'static str {
        match self {
            Suite::QuarterLaw => "quarter-law",
            Suite::Gaps => "gaps",
            Suite::Entropy => "entropy",
            Suite::QuantumIdentity => "quantum-identity",
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Suite::QuarterLaw => QUARTER_LAW_SAMPLES,
            Suite::Gaps => GAP_SAMPLES,
            Suite::Entropy => ENTROPY_PERTURBATIONS,
            Suite::QuantumIdentity => IDENTITY_DRAWS,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = QdtError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                QdtError::Domain(format!(
                    "unknown suite '{s}' (expected quarter-law, gaps, entropy or quantum-identity)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Overrides the suite's main sample count (draws, perturbations, ...).
    pub samples: Option<usize>,
    pub seed: u64,
    /// Prospect count for the `gaps` suite.
    pub n_prospects: usize,
    /// Dimensions for the `quantum-identity` suite.
    pub dims: ProspectDims,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            samples: None,
            seed: 0,
            n_prospects: 5,
            dims: ProspectDims {
                conclusive: 4,
                inconclusive: 3,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance condition; `None` for informational values.
    pub bound: Option<String>,
    pub passed: bool,
}

impl Statistic {
    fn checked(name: &str, value: f64, bound: String, passed: bool) -> Self {
        Self {
            name: name.into(),
            value,
            bound: Some(bound),
            passed,
        }
    }

    fn info(name: &str, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound: None,
            passed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub suite: Suite,
    pub samples: usize,
    pub seed: u64,
    pub passed: bool,
    pub statistics: Vec<Statistic>,
}

impl VerifyOutcome {
    pub fn render(&self) -> String {
        let mut out = format!(
            "suite {} (samples {}, seed {}): {}\n",
            self.suite,
            self.samples,
            self.seed,
            if self.passed { "PASS" } else { "FAIL" }
        );
        for s in &self.statistics {
            let status = match (&s.bound, s.passed) {
                (None, _) => "info",
                (Some(_), true) => "ok",
                (Some(_), false) => "FAIL",
            };
            out.push_str(&format!("  [{status:>4}] {:<40} {:>14.6e}", s.name, s.value));
            if let Some(b) = &s.bound {
                out.push_str(&format!("   ({b})"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<VerifyOutcome> {
    let samples = opts.samples.unwrap_or_else(|| suite.default_samples());
    if samples == 0 {
        return Err(QdtError::Domain("samples must be >= 1".into()));
    }
    let statistics = match suite {
        Suite::QuarterLaw => quarter_law(samples, opts.seed)?,
        Suite::Gaps => gaps(opts.n_prospects, samples, opts.seed)?,
        Suite::Entropy => entropy(samples, opts.seed)?,
        Suite::QuantumIdentity => quantum_identity(opts.dims, samples, opts.seed)?,
    };
    Ok(VerifyOutcome {
        suite,
        samples,
        seed: opts.seed,
        passed: statistics.iter().all(|s| s.passed),
        statistics,
    })
}

fn quarter_law(samples: usize, seed: u64) -> Result<Vec<Statistic>> {
    let mean = quarter_law_check(samples, seed);
    let mut worst = 0.0f64;
    for n in 2..=QUARTER_LAW_MAX_SET {
        let dev = quantized_attraction_set(n)?.mean_abs() - Rational64::new(1, 4);
        worst = worst.max(crate::attraction::rational_to_f64(&dev).abs());
    }
    Ok(vec![
        Statistic::checked(
            "monte carlo integral of x phi(x) on [0, 1]",
            mean,
            format!("|x - 0.25| <= {QUARTER_LAW_TOL}"),
            (mean - 0.25).abs() <= QUARTER_LAW_TOL,
        ),
        Statistic::checked(
            "max |mean|q| - 1/4| over Q_2..Q_1000",
            worst,
            "<= 1e-12".into(),
            worst <= 1e-12,
        ),
        Statistic::info("monte carlo mean |q| (tends to 1/2)", mean_abs_uniform(samples, seed)),
    ])
}

fn gaps(n_prospects: usize, samples: usize, seed: u64) -> Result<Vec<Statistic>> {
    let g = ordered_uniform_gap_check(n_prospects, samples, seed)?;
    let hi = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = g.iter().copied().fold(f64::INFINITY, f64::min);
    let expected = 1.0 / (n_prospects as f64 + 1.0);
    let dev = g.iter().map(|x| (x - expected).abs()).fold(0.0, f64::max);
    Ok(vec![
        Statistic::checked(
            "mean gap spread (max - min)",
            hi - lo,
            format!("< {GAP_SPREAD_TOL}"),
            hi - lo < GAP_SPREAD_TOL,
        ),
        Statistic::info("max |gap - 1/(N+1)|", dev),
    ])
}

/// A uniform point on the probability simplex.
fn dirichlet_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

/// Worst `I(f') - I(f*)` over random simplex points and local perturbations of `f*`.
fn minimizer_margin<R, F>(best: &[f64], perturbations: usize, rng: &mut R, functional: F) -> Result<f64>
where
    R: Rng + ?Sized,
    F: Fn(&[f64]) -> Result<f64>,
{
    let at_best = functional(best)?;
    let mut worst = f64::INFINITY;
    for k in 0..perturbations {
        let d = dirichlet_point(best.len(), rng);
        let candidate: Vec<f64> = if k % 2 == 0 {
            d
        } else {
            let eps = 10f64.powf(-6.0 * rng.random::<f64>());
            best.iter().zip(&d).map(|(b, x)| (1.0 - eps) * b + eps * x).collect()
        };
        worst = worst.min(functional(&candidate)? - at_best);
    }
    Ok(worst)
}

fn entropy(perturbations: usize, seed: u64) -> Result<Vec<Statistic>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_gain = f64::INFINITY;
    let mut worst_loss = f64::INFINITY;
    let mut unit_mismatch = 0usize;
    for v in 0..ENTROPY_VECTORS_PER_REGIME {
        let n = rng.random_range(2..=6);
        let mut u: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..10.0)).collect();
        if v % 5 == 4 {
            u[0] = 0.0;
        }
        let alpha = rng.random_range(0.2..3.0);
        let gamma = rng.random_range(0.2..3.0);
        let lambda = rng.random_range(-2.0..2.0);

        let best = utility_factors_gains(&u, alpha)?;
        let m = minimizer_margin(best.values(), perturbations, &mut rng, |f| {
            information_functional_gains(f, &u, lambda, alpha)
        })?;
        worst_gain = worst_gain.min(m);

        let losses: Vec<f64> = u.iter().map(|x| -(x + 0.05)).collect();
        let best = utility_factors_losses(&losses, gamma)?;
        let m = minimizer_margin(best.values(), perturbations, &mut rng, |f| {
            information_functional_losses(f, &losses, lambda, gamma)
        })?;
        worst_loss = worst_loss.min(m);

        // Unit exponents against the plain ratio forms.
        let total: f64 = u.iter().sum();
        let ratio: Vec<f64> = u.iter().map(|x| x / total).collect();
        if utility_factors_gains(&u, 1.0)?.values() != ratio.as_slice() {
            unit_mismatch += 1;
        }
        let inv: Vec<f64> = losses.iter().map(|x| 1.0 / x.abs()).collect();
        let total: f64 = inv.iter().sum();
        let ratio: Vec<f64> = inv.iter().map(|x| x / total).collect();
        if utility_factors_losses(&losses, 1.0)?.values() != ratio.as_slice() {
            unit_mismatch += 1;
        }
    }
    Ok(vec![
        Statistic::checked(
            "gains: min I(f') - I(f*)",
            worst_gain,
            format!(">= {ENTROPY_MARGIN:e}"),
            worst_gain >= ENTROPY_MARGIN,
        ),
        Statistic::checked(
            "losses: min I(f') - I(f*)",
            worst_loss,
            format!(">= {ENTROPY_MARGIN:e}"),
            worst_loss >= ENTROPY_MARGIN,
        ),
        Statistic::checked(
            "unit-exponent mismatches vs ratio form",
            unit_mismatch as f64,
            "== 0".into(),
            unit_mismatch == 0,
        ),
    ])
}

fn quantum_identity(dims: ProspectDims, draws: usize, seed: u64) -> Result<Vec<Statistic>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut identity = 0.0f64;
    let mut sum_p = 0.0f64;
    let mut sum_f = 0.0f64;
    let mut sum_q = 0.0f64;
    let mut min_f = f64::INFINITY;
    for _ in 0..draws {
        let rho = random_density_operator(dims.total(), &mut rng)?;
        let b = sample_inconclusive(dims.inconclusive, rng.next_u64())?;
        let raw = prospect_set(&rho, &b, dims)?;
        for t in &raw {
            identity = identity.max((t.p - t.f - t.q).abs());
            min_f = min_f.min(t.f);
        }
        let norm = normalize_prospect_set(&raw)?;
        sum_p = sum_p.max((norm.iter().map(|t| t.p).sum::<f64>() - 1.0).abs());
        sum_f = sum_f.max((norm.iter().map(|t| t.f).sum::<f64>() - 1.0).abs());
        sum_q = sum_q.max(norm.iter().map(|t| t.q).sum::<f64>().abs());
    }
    let bound = format!("< {IDENTITY_TOL:e}");
    Ok(vec![
        Statistic::checked("max |p - (f + q)|", identity, bound.clone(), identity < IDENTITY_TOL),
        Statistic::checked("max |sum p - 1| after normalization", sum_p, bound.clone(), sum_p < IDENTITY_TOL),
        Statistic::checked("max |sum f - 1| after normalization", sum_f, bound.clone(), sum_f < IDENTITY_TOL),
        Statistic::checked("max |sum q| after normalization", sum_q, bound, sum_q < IDENTITY_TOL),
        Statistic::checked("min raw f", min_f, ">= -1e-12".into(), min_f >= -1e-12),
    ])
}
