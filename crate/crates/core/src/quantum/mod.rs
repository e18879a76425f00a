//! Finite-dimensional event calculus for composite prospects.
//!
//! The event space is `H_A ⊗ H_B`: a conclusive index `n` (the choice that is
//! actually observed) tensored with inconclusive modes `α` (hesitations that
//! are never observed). Basis vectors are laid out lexicographically, so
//! `|n α⟩` lives at index `n * N_B + α`.
//!
//! The prospect probability `p = Tr ρ P̂(π_n)` splits exactly into a diagonal
//! part `f` (utility factor) and an off-diagonal interference part `q`
//! (attraction factor).

mod operator;
mod prospect;
mod state;

pub use operator::{
    decohere, make_projector, random_density_operator, DensityOperator, EventKind, EventOperator,
};
pub use prospect::{
    normalize_prospect_set, prospect_operator, prospect_probability, prospect_state,
    ProbabilityTriple, Prospect, ProspectDims,
};
pub use state::{
    random_pure_state, sample_inconclusive, sample_inconclusive_from, tensor, StateVector,
};

pub use num_complex::Complex64;

/// Hermiticity and unit-trace tolerance.
pub const MATRIX_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_SLACK: f64 = -1e-10;
/// Unit-norm tolerance on state vectors.
pub const NORM_TOL: f64 = 1e-12;
/// `M² = M` tolerance for projectors.
pub const IDEMPOTENT_TOL: f64 = 1e-10;
/// Largest imaginary part tolerated on the interference sum.
pub const IMAG_TOL: f64 = 1e-10;
/// Default cap on the total Hilbert-space dimension.
pub const DEFAULT_MAX_DIM: usize = 64;
