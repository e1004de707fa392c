use thiserror::Error;

use crate::constraints::StableRangeCertificate;
use crate::lattice::LatticeVector;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero vector has no primitive direction")]
    ZeroVector,
    #[error("direction {0} is not primitive")]
    NotPrimitive(LatticeVector),
    #[error("integer overflow")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid graph: {}", .0.join("; "))]
    InvalidGraph(Vec<String>),
    #[error("invalid coral: {}", .0.join("; "))]
    InvalidCoral(Vec<String>),
    #[error("scale factor must be at least 1")]
    BadScale,
    #[error("rescaling would change the type at a multivalent negative vertex")]
    RescaleChangesType,

    #[error("constraint direction {found} does not match end direction {expected}")]
    DirectionMismatch { expected: LatticeVector, found: LatticeVector },
    #[error("constraint has {found} entries, expected {expected}")]
    ConstraintLength { expected: usize, found: usize },
    #[error("no good general constraint found within {0} attempts")]
    SamplingFailed(usize),
    #[error("constraint is not general: {0}")]
    NotGeneral(String),

    #[error("degree has no positive or no negative entries")]
    EmptyDegree,
    #[error("degree is not balanced")]
    Unbalanced,
    #[error("type is not general")]
    NonGeneralType,
    #[error("constraint system is underdetermined")]
    Underdetermined,
    #[error("negative-vertex equations have rank {found}, expected {expected}")]
    RankAssertion { expected: usize, found: usize },
    #[error("index {0} out of range")]
    BadIndex(usize),

    #[error("vertex is not trivalent")]
    NotTrivalent,
    #[error("coral is not general")]
    NonGeneralCoral,
    #[error("constraint is not good, general and stable")]
    BadConstraint(Option<Box<StableRangeCertificate>>),
    #[error("curve vertex lies outside the cone spanned by the positive ends")]
    NotGoodPosition,
    #[error("curve does not fit the degree: {0}")]
    CurveMismatch(String),

    #[error("invalid Morse tree: {}", .0.join("; "))]
    InvalidTmt(Vec<String>),
    #[error("coral is not of good type (a direction has zero height)")]
    NotGoodType,
    #[error("accelerations give a non-distinct decoration")]
    NonDistinctDecoration,
    #[error("heights infeasible: {0}")]
    HeightsInfeasible(String),
    #[error("root must be an external vertex")]
    BadRoot,
}
