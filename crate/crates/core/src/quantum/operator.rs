use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::prospect::ProspectDims;
use super::state::StateVector;
use super::{DEFAULT_MAX_DIM, IDEMPOTENT_TOL, MATRIX_TOL, PSD_SLACK};
use crate::error::{QdtError, Result};

fn check_square(m: &DMatrix<Complex64>, max_dim: usize) -> Result<()> {
    if m.nrows() == 0 || m.nrows() != m.ncols() {
        return Err(QdtError::Domain(format!(
            "operator must be square and non-empty, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() > max_dim {
        return Err(QdtError::Domain(format!(
            "dimension {} exceeds cap {max_dim}",
            m.nrows()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(QdtError::Validation("operator has non-finite entries".into()));
    }
    Ok(())
}

fn check_hermitian(m: &DMatrix<Complex64>) -> Result<()> {
    let n = m.nrows();
    for i in 0..n {
        for j in i..n {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            if dev > MATRIX_TOL {
                return Err(QdtError::Validation(format!(
                    "operator is not Hermitian: entry ({i},{j}) deviates by {dev:e}"
                )));
            }
        }
    }
    Ok(())
}

/// Smallest eigenvalue of a Hermitian matrix.
fn min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    let eig = SymmetricEigen::new(m.clone());
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

fn check_psd(m: &DMatrix<Complex64>) -> Result<()> {
    let lo = min_eigenvalue(m);
    if lo < PSD_SLACK {
        return Err(QdtError::Validation(format!(
            "operator is not positive semidefinite: smallest eigenvalue {lo:e}"
        )));
    }
    Ok(())
}

fn trace(m: &DMatrix<Complex64>) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// The strategic state `ρ` of a decision maker: Hermitian, unit trace, PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::with_max_dim(matrix, DEFAULT_MAX_DIM)
    }

    pub fn with_max_dim(matrix: DMatrix<Complex64>, max_dim: usize) -> Result<Self> {
        check_square(&matrix, max_dim)?;
        check_hermitian(&matrix)?;
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > MATRIX_TOL || tr.im.abs() > MATRIX_TOL {
            return Err(QdtError::Validation(format!(
                "density operator trace is {tr}, expected 1"
            )));
        }
        check_psd(&matrix)?;
        Ok(Self { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(state: &StateVector) -> Result<Self> {
        if !state.is_normalized() {
            return Err(QdtError::Normalization {
                norm_sqr: state.norm_sqr(),
            });
        }
        let v = state.as_dvector();
        Self::new(v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(QdtError::Domain("dimension must be >= 1".into()));
        }
        let w = Complex64::new(1.0 / dim as f64, 0.0);
        Self::new(DMatrix::from_diagonal_element(dim, dim, w))
    }

    /// Real diagonal state with the given weights, which must sum to one.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let d: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        trace(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)] == Complex64::new(0.0, 0.0)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Projector,
    PovmElement,
}

/// An event operator: a projector for testable events, a positive operator otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct EventOperator {
    matrix: DMatrix<Complex64>,
    kind: EventKind,
}

impl EventOperator {
    pub fn new(matrix: DMatrix<Complex64>, kind: EventKind) -> Result<Self> {
        check_square(&matrix, DEFAULT_MAX_DIM)?;
        check_hermitian(&matrix)?;
        check_psd(&matrix)?;
        if kind == EventKind::Projector {
            let dev = (&matrix * &matrix - &matrix)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if dev > IDEMPOTENT_TOL {
                return Err(QdtError::Validation(format!(
                    "projector is not idempotent: max |M^2 - M| = {dev:e}"
                )));
            }
        }
        Ok(Self { matrix, kind })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn kind(&self) -> EventKind {
        self.kind
    }

    pub fn trace(&self) -> Complex64 {
        trace(&self.matrix)
    }

    /// `Tr ρ M`, summed over the full matrix product.
    pub fn expectation(&self, rho: &DensityOperator) -> Result<Complex64> {
        if rho.dim() != self.dim() {
            return Err(QdtError::Domain(format!(
                "operator dimension {} does not match state dimension {}",
                self.dim(),
                rho.dim()
            )));
        }
        Ok(trace(&(rho.matrix() * &self.matrix)))
    }
}

/// `|s⟩⟨s|` for a normalized state `s`.
pub fn make_projector(state: &StateVector) -> Result<EventOperator> {
    if !state.is_normalized() {
        return Err(QdtError::Normalization {
            norm_sqr: state.norm_sqr(),
        });
    }
    let v = state.as_dvector();
    EventOperator::new(v * v.adjoint(), EventKind::Projector)
}

/// Attenuates interference: every off-diagonal element of `ρ` is scaled by `1 - damping`.
///
/// The result is `(1 - d) ρ + d diag(ρ)`, a convex mix with the fully dephased
/// state, so Hermiticity, trace and positivity carry over. At `damping = 1`
/// all attraction factors vanish.
pub fn decohere(rho: &DensityOperator, damping: f64, dims: ProspectDims) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&damping) {
        return Err(QdtError::Domain(format!("damping {damping} outside [0, 1]")));
    }
    if rho.dim() != dims.total() {
        return Err(QdtError::Domain(format!(
            "state dimension {} does not match {}x{}",
            rho.dim(),
            dims.conclusive,
            dims.inconclusive
        )));
    }
    let keep = 1.0 - damping;
    let mut m = rho.matrix().clone();
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m[(i, j)] *= keep;
            }
        }
    }
    Ok(DensityOperator { matrix: m })
}

/// A full-rank random state `G G† / Tr(G G†)` with complex Gaussian `G`.
pub fn random_density_operator<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityOperator> {
    if dim == 0 {
        return Err(QdtError::Domain("dimension must be >= 1".into()));
    }
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut m = &g * g.adjoint();
    let tr = trace(&m).re;
    m /= Complex64::new(tr, 0.0);
    // Symmetrize away rounding so the Hermitian check is exact.
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DensityOperator::new(m)
}
