//! Composite-event prospect probabilities for decisions under uncertainty.
//!
//! A choice is modelled as a composite event: an observed (conclusive) choice
//! tensored with unobserved (inconclusive) deliberation modes. Its probability
//! splits into a rational utility factor `f` and an interference-driven
//! attraction factor `q`. Without further information both can be assigned by
//! non-informative priors, which is enough to predict decoy-effect reversals.
//!
//! - [`quantum`]: states, operators, prospect probabilities and their `f + q` split.
//! - [`priors`]: expected utilities and power-law utility factors.
//! - [`attraction`]: the quarter law and quantized attraction sets.
//! - [`decision`]: composing `p = f + q` with bounds, decoy prediction, scoring.
//! - [`experiment`]: experiment files, run records and output formats.
//! - [`verify`] and [`simulate`]: seeded verification suites and decoherence sweeps.

pub mod attraction;
pub mod decision;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod priors;
pub mod quantum;
pub mod simulate;
pub mod verify;

pub use attraction::{quantized_attraction_set, AttractionSet};
pub use decision::{
    compose_probabilities, enforce_bounds, predict_decoy, regularity_violation_check,
    score_against_empirical, ChoiceSet, DecoyMode, PredictionReport, RegularityCheck,
};
pub use error::{QdtError, Result};
pub use exact::Exact;
pub use priors::{Lottery, UtilityFactorConfig, UtilityFactors, UtilityFunction};
pub use quantum::{DensityOperator, ProbabilityTriple, Prospect, ProspectDims, StateVector};
