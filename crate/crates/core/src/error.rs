use thiserror::Error;

use crate::hardy::Stage;
use crate::layout::SystemId;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("layout conflict: {0}")]
    LayoutConflict(String),

    #[error("unknown system `{0}`")]
    UnknownSystem(SystemId),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("vector is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("non-finite entry")]
    NonFinite,

    #[error("operator is not Hermitian (max deviation {0:e})")]
    SymmetryViolation(f64),

    #[error("not a density operator: {0}")]
    NotDensity(String),

    #[error("not a projector: {0}")]
    NotProjector(String),

    #[error("assignments are not disjoint: `{0}` appears more than once")]
    DisjointnessViolation(SystemId),

    #[error("projector set is not complete (max deviation from identity {0:e})")]
    Incomplete(f64),

    #[error("joint probability out of range: {0}")]
    ProbabilityOutOfRange(String),

    #[error("reference system was not declared isolated")]
    NotIsolated,

    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("experiment is in stage {found:?}, expected {expected:?}")]
    Stage { expected: Stage, found: Stage },

    #[error("eigendecomposition did not converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, Error>;
