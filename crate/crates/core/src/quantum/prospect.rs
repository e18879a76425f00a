use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::{DensityOperator, EventKind, EventOperator};
use super::state::StateVector;
use super::IMAG_TOL;
use crate::error::{QdtError, Result};

/// Dimensions of the conclusive (`N_A`) and inconclusive (`N_B`) factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProspectDims {
    pub conclusive: usize,
    pub inconclusive: usize,
}

impl ProspectDims {
    pub fn new(conclusive: usize, inconclusive: usize) -> Result<Self> {
        if conclusive == 0 || inconclusive == 0 {
            return Err(QdtError::Domain(format!(
                "prospect dimensions must be >= 1, got ({conclusive}, {inconclusive})"
            )));
        }
        Ok(Self {
            conclusive,
            inconclusive,
        })
    }

    pub fn total(&self) -> usize {
        self.conclusive * self.inconclusive
    }

    /// Position of `|n α⟩` in the product basis.
    pub fn index(&self, n: usize, alpha: usize) -> usize {
        n * self.inconclusive + alpha
    }
}

/// A composite event: conclusive choice `n` together with inconclusive coefficients `b_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prospect {
    choice_index: usize,
    b_coeffs: Vec<Complex64>,
}

impl Prospect {
    pub fn new(choice_index: usize, b_coeffs: Vec<Complex64>) -> Result<Self> {
        if b_coeffs.is_empty() {
            return Err(QdtError::Domain("a prospect needs at least one inconclusive mode".into()));
        }
        if b_coeffs.iter().any(|b| !b.re.is_finite() || !b.im.is_finite()) {
            return Err(QdtError::Domain("non-finite inconclusive coefficient".into()));
        }
        Ok(Self {
            choice_index,
            b_coeffs,
        })
    }

    pub fn choice_index(&self) -> usize {
        self.choice_index
    }

    pub fn b_coeffs(&self) -> &[Complex64] {
        &self.b_coeffs
    }

    fn check_dims(&self, dims: ProspectDims) -> Result<()> {
        if self.choice_index >= dims.conclusive {
            return Err(QdtError::Domain(format!(
                "choice index {} out of range for {} conclusive outcomes",
                self.choice_index, dims.conclusive
            )));
        }
        if self.b_coeffs.len() != dims.inconclusive {
            return Err(QdtError::Domain(format!(
                "{} inconclusive coefficients for {} modes",
                self.b_coeffs.len(),
                dims.inconclusive
            )));
        }
        Ok(())
    }
}

/// Prospect probability `p` with its utility part `f` and attraction part `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTriple {
    pub p: f64,
    pub f: f64,
    pub q: f64,
}

/// `|π_n⟩ = Σ_α b_α |n α⟩`. The norm is whatever the coefficients give.
pub fn prospect_state(prospect: &Prospect, dims: ProspectDims) -> Result<StateVector> {
    prospect.check_dims(dims)?;
    let mut v = DVector::from_element(dims.total(), Complex64::new(0.0, 0.0));
    for (alpha, b) in prospect.b_coeffs.iter().enumerate() {
        v[dims.index(prospect.choice_index, alpha)] = *b;
    }
    Ok(StateVector::from_dvector(v))
}

/// `P̂(π_n) = |π_n⟩⟨π_n|`, a positive operator (a projector only when `Σ|b_α|² = 1`).
pub fn prospect_operator(prospect: &Prospect, dims: ProspectDims) -> Result<EventOperator> {
    let s = prospect_state(prospect, dims)?;
    let v = s.as_dvector();
    EventOperator::new(v * v.adjoint(), EventKind::PovmElement)
}

/// Computes `p = Tr ρ P̂(π_n)` and its split `p = f + q`.
///
/// `p` is taken from the full matrix trace; `f` from the diagonal
/// `Σ_α |b_α|² ⟨nα|ρ|nα⟩`; `q` from the interference sum
/// `Σ_{α≠β} b*_α b_β ⟨nα|ρ|nβ⟩`, whose imaginary part must vanish.
pub fn prospect_probability(
    rho: &DensityOperator,
    prospect: &Prospect,
    dims: ProspectDims,
) -> Result<ProbabilityTriple> {
    prospect.check_dims(dims)?;
    if rho.dim() != dims.total() {
        return Err(QdtError::Domain(format!(
            "state dimension {} does not match {}x{}",
            rho.dim(),
            dims.conclusive,
            dims.inconclusive
        )));
    }
    let p = prospect_operator(prospect, dims)?.expectation(rho)?;
    if p.im.abs() > IMAG_TOL {
        return Err(QdtError::NonRealInterference { imag: p.im });
    }

    let n = prospect.choice_index;
    let b = &prospect.b_coeffs;
    let mut f = 0.0;
    let mut q = Complex64::new(0.0, 0.0);
    for (alpha, b_alpha) in b.iter().enumerate() {
        let row = dims.index(n, alpha);
        f += b_alpha.norm_sqr() * rho.entry(row, row).re;
        for (beta, b_beta) in b.iter().enumerate() {
            if alpha != beta {
                q += b_alpha.conj() * b_beta * rho.entry(row, dims.index(n, beta));
            }
        }
    }
    if q.im.abs() > IMAG_TOL {
        return Err(QdtError::NonRealInterference { imag: q.im });
    }
    Ok(ProbabilityTriple { p: p.re, f, q: q.re })
}

/// Renormalizes raw triples of one prospect set so that `Σp = Σf = 1`, `Σq = 0`.
///
/// `p` and `f` are scaled separately and `q` is recomputed as `p - f`.
pub fn normalize_prospect_set(triples: &[ProbabilityTriple]) -> Result<Vec<ProbabilityTriple>> {
    const SLACK: f64 = 1e-12;
    if triples.is_empty() {
        return Err(QdtError::Degenerate("empty prospect set".into()));
    }
    if let Some(t) = triples.iter().find(|t| !(t.p >= -SLACK && t.f >= -SLACK)) {
        return Err(QdtError::Domain(format!(
            "raw probabilities must be nonnegative, got p = {}, f = {}",
            t.p, t.f
        )));
    }
    let sum_p: f64 = triples.iter().map(|t| t.p).sum();
    let sum_f: f64 = triples.iter().map(|t| t.f).sum();
    if sum_p <= 0.0 {
        return Err(QdtError::Degenerate("prospect probabilities sum to zero".into()));
    }
    if sum_f <= 0.0 {
        return Err(QdtError::Degenerate("utility factors sum to zero".into()));
    }
    Ok(triples
        .iter()
        .map(|t| {
            let p = t.p / sum_p;
            let f = t.f / sum_f;
            ProbabilityTriple { p, f, q: p - f }
        })
        .collect())
}
