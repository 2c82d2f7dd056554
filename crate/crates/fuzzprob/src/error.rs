use thiserror::Error;

/// Errors produced by construction and inference operations.
///
/// Invalid values are rejected when a type is built, so the numeric kernels
/// themselves only fail on structural mismatches (wrong universe, wrong
/// stream length) or on explicitly documented conditions such as an
/// all-zero membership vector.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid universe: {0}")]
    InvalidUniverse(String),

    #[error("invalid membership function: {0}")]
    InvalidMembershipFunction(String),

    #[error("grade {value} outside [0, 1]")]
    GradeOutOfRange { value: f64 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("universe mismatch: expected `{expected}`, got `{actual}`")]
    UniverseMismatch { expected: String, actual: String },

    #[error("empty rule base")]
    EmptyRuleBase,

    #[error("rule references undeclared set `{0}`")]
    UndeclaredSet(String),

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("empty evidence: membership vector has no support")]
    EmptyEvidence,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("row {row} of the relation is all zero")]
    ZeroRow { row: usize },

    #[error("invalid stream config: {0}")]
    InvalidStreamConfig(String),

    #[error("bit streams disagree in length or config")]
    StreamMismatch,

    #[error("shared-draw required for max-min realization")]
    SharedDrawRequired,

    #[error("sample count must be at least 1")]
    ZeroSampleCount,

    #[error("no rule fired")]
    NoRuleFired,

    #[error("no rule fired at step {step}")]
    NoRuleFiredAt { step: usize },

    #[error("invalid plant config: {0}")]
    InvalidPlant(String),

    #[error("invalid bench spec: {0}")]
    InvalidBenchSpec(String),

    #[error("nothing to plot")]
    NothingToPlot,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
