use thiserror::Error;

/// Errors raised by the algebra, lattice and enumeration layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("element is not a unit: {0}")]
    NonUnit(String),

    #[error("generators span a module of rank {rank} < 3")]
    DegenerateLattice { rank: usize },

    #[error("precision exhausted: {0}")]
    Precision(String),

    #[error("lattice containment required: {0}")]
    NotContained(String),

    #[error("invalid family descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("no family descriptor matches the order: {0}")]
    ClassificationFailure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("outside the tractability envelope: {0}")]
    Envelope(String),

    #[error("not a plane curve singularity: {0}")]
    NotPlaneCurve(String),

    #[error("order is not local: {0}")]
    NotLocal(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
