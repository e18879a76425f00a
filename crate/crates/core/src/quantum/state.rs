use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::NORM_TOL;
use crate::error::{QdtError, Result};

/// A vector in a finite-dimensional complex Hilbert space.
///
/// Not necessarily normalized: prospect states built from raw inconclusive
/// coefficients carry whatever norm those coefficients have.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(QdtError::Domain("state vector must have dimension >= 1".into()));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QdtError::Domain("state vector has non-finite amplitude".into()));
        }
        Ok(Self {
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The computational basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(QdtError::Domain(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[index] = Complex64::new(1.0, 0.0);
        Self::new(v)
    }

    pub(crate) fn from_dvector(amplitudes: DVector<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amplitudes.as_slice()
    }

    pub(crate) fn as_dvector(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    /// Rescales to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(QdtError::Normalization { norm_sqr: n2 });
        }
        let scale = 1.0 / n2.sqrt();
        Ok(Self::from_dvector(self.amplitudes.map(|a| a * scale)))
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(QdtError::Domain(format!(
                "inner product of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Tensor product `a ⊗ b` with the index of `|i j⟩` equal to `i * dim(b) + j`.
pub fn tensor(a: &StateVector, b: &StateVector) -> StateVector {
    StateVector::from_dvector(a.as_dvector().kronecker(b.as_dvector()))
}

/// Draws inconclusive coefficients `b_α` uniformly on the complex unit sphere.
///
/// Each coefficient starts as an independent standard complex Gaussian and the
/// vector is then scaled to `Σ|b_α|² = 1`. Identical seeds give identical draws.
pub fn sample_inconclusive(b_dim: usize, seed: u64) -> Result<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_inconclusive_from(b_dim, &mut rng)
}

pub fn sample_inconclusive_from<R: Rng + ?Sized>(b_dim: usize, rng: &mut R) -> Result<Vec<Complex64>> {
    if b_dim == 0 {
        return Err(QdtError::Domain("inconclusive dimension must be >= 1".into()));
    }
    loop {
        let raw: Vec<Complex64> = (0..b_dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let n2: f64 = raw.iter().map(|a| a.norm_sqr()).sum();
        if n2 > 0.0 {
            let scale = 1.0 / n2.sqrt();
            return Ok(raw.into_iter().map(|a| a * scale).collect());
        }
    }
}

/// A Haar-random unit vector.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<StateVector> {
    StateVector::new(sample_inconclusive_from(dim, rng)?)
}
