//! Non-informative attraction factors.
//!
//! With no information about the attraction factors, their distribution over
//! `[-1, 1]` is uniform with density 1/2, which fixes the mean modulus at 1/4
//! (the quarter law). Ranked from most to least attractive, the expected
//! values are equidistant; combined with the zero-sum constraint this gives
//! the quantized set
//!
//! ```text
//! q_n = q_max - (n - 1) Δ,    n = 1..N
//! Δ = 1/N (N even),  N/(N² - 1) (N odd)
//! q_max = (N - 1) Δ / 2
//! ```
//!
//! All set values are exact rationals.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QdtError, Result};

/// Largest prospect count accepted; keeps `2(N² - 1)` well inside `i64`.
pub const MAX_PROSPECTS: usize = 1 << 20;

fn check_count(n_prospects: usize, min: usize) -> Result<i64> {
    if n_prospects < min {
        return Err(if min >= 2 && n_prospects == 1 {
            QdtError::Degenerate("a single prospect has no attraction gap".into())
        } else {
            QdtError::Domain(format!("need at least {min} prospects, got {n_prospects}"))
        });
    }
    if n_prospects > MAX_PROSPECTS {
        return Err(QdtError::Domain(format!(
            "{n_prospects} prospects exceeds the limit {MAX_PROSPECTS}"
        )));
    }
    Ok(n_prospects as i64)
}

/// Exact gap `Δ` between neighbouring attraction factors.
pub fn gap_exact(n_prospects: usize) -> Result<Rational64> {
    let n = check_count(n_prospects, 2)?;
    Ok(if n % 2 == 0 {
        Rational64::new(1, n)
    } else {
        Rational64::new(n, n * n - 1)
    })
}

/// Exact largest attraction factor `q_max`.
pub fn qmax_exact(n_prospects: usize) -> Result<Rational64> {
    let n = check_count(n_prospects, 2)?;
    Ok(if n % 2 == 0 {
        Rational64::new(n - 1, 2 * n)
    } else {
        Rational64::new(n, 2 * (n + 1))
    })
}

pub fn attraction_gap(n_prospects: usize) -> Result<f64> {
    gap_exact(n_prospects).map(|r| rational_to_f64(&r))
}

pub fn attraction_qmax(n_prospects: usize) -> Result<f64> {
    qmax_exact(n_prospects).map(|r| rational_to_f64(&r))
}

pub(crate) fn rational_to_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// The quantized attraction set `Q_N`, most attractive first.
#[derive(Debug, Clone, PartialEq)]
pub struct AttractionSet {
    values: Vec<Rational64>,
    gap: Rational64,
    q_max: Rational64,
}

impl AttractionSet {
    pub fn n_prospects(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Rational64] {
        &self.values
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(rational_to_f64).collect()
    }

    pub fn gap(&self) -> Rational64 {
        self.gap
    }

    pub fn q_max(&self) -> Rational64 {
        self.q_max
    }

    /// Mean of `|q_n|`, exact.
    pub fn mean_abs(&self) -> Rational64 {
        let total: Rational64 = self.values.iter().map(|q| q.abs()).sum();
        total / Rational64::from_integer(self.values.len() as i64)
    }
}

/// Builds `Q_N`. `N = 1` yields `{0}` since the set must sum to zero.
pub fn quantized_attraction_set(n_prospects: usize) -> Result<AttractionSet> {
    let n = check_count(n_prospects, 1)?;
    if n == 1 {
        return Ok(AttractionSet {
            values: vec![Rational64::zero()],
            gap: Rational64::zero(),
            q_max: Rational64::zero(),
        });
    }
    let gap = gap_exact(n_prospects)?;
    let q_max = qmax_exact(n_prospects)?;
    let values = (0..n)
        .map(|k| q_max - gap * Rational64::from_integer(k))
        .collect();
    Ok(AttractionSet { values, gap, q_max })
}

/// Large-`N` form `1/2 - (2 rank - 1) / (2N)` of the attraction factor at `rank` (1-based).
pub fn asymptotic_attraction(n_prospects: usize, rank: usize) -> Result<f64> {
    let n = check_count(n_prospects, 2)?;
    if rank == 0 || rank > n_prospects {
        return Err(QdtError::Domain(format!(
            "rank {rank} outside 1..={n_prospects}"
        )));
    }
    Ok(0.5 - (2.0 * rank as f64 - 1.0) / (2.0 * n as f64))
}

/// Monte Carlo estimate of `∫₀¹ φ(x) x dx` with `φ = 1/2` on `[-1, 1]`; tends to 1/4.
///
/// Draws `q ~ Uniform[-1, 1]` and averages `max(q, 0)`. The plain mean of `|q|`
/// tends to 1/2 and is available from [`mean_abs_uniform`].
pub fn quarter_law_check(samples: usize, seed: u64) -> f64 {
    uniform_mean(samples, seed, |q| q.max(0.0))
}

/// Monte Carlo mean of `|q|` for `q ~ Uniform[-1, 1]`, same draws as [`quarter_law_check`].
pub fn mean_abs_uniform(samples: usize, seed: u64) -> f64 {
    uniform_mean(samples, seed, f64::abs)
}

fn uniform_mean(samples: usize, seed: u64, g: impl Fn(f64) -> f64) -> f64 {
    if samples == 0 {
        return f64::NAN;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: f64 = (0..samples).map(|_| g(rng.random_range(-1.0..=1.0f64))).sum();
    total / samples as f64
}

/// Mean consecutive gaps of `N` iid `Uniform[0, 1]` draws sorted in descending order.
///
/// Returns `N - 1` values; each tends to `1/(N + 1)`.
pub fn ordered_uniform_gap_check(n_prospects: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    check_count(n_prospects, 2)?;
    if samples == 0 {
        return Err(QdtError::Domain("need at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sums = vec![0.0; n_prospects - 1];
    let mut draw = vec![0.0; n_prospects];
    for _ in 0..samples {
        for x in draw.iter_mut() {
            *x = rng.random::<f64>();
        }
        draw.sort_by(|a, b| b.total_cmp(a));
        for (s, w) in sums.iter_mut().zip(draw.windows(2)) {
            *s += w[0] - w[1];
        }
    }
    Ok(sums.into_iter().map(|s| s / samples as f64).collect())
}
