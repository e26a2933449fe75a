use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator has non-finite entries")]
    NonFinite,
    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("non-physical operator: minimum eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("trace {0} is not unity")]
    NotUnitTrace(f64),
    #[error("unnormalizable operator: trace {0:e}")]
    Unnormalizable(f64),
    #[error("non-physical Bloch vector: length {0}")]
    NonPhysicalBloch(f64),
    #[error("POM elements do not sum to the identity (deviation {0:e})")]
    IncompletePom(f64),
    #[error("preparation operators have total trace {0}, expected 1")]
    EnsembleTrace(f64),
    #[error("empty {0}")]
    Empty(&'static str),
    #[error("invalid channel parameter: {0}")]
    InvalidParams(String),
    #[error("step count must be at least 1")]
    ZeroSteps,
    #[error("operator is not unitary (deviation {0:e})")]
    NonUnitary(f64),
    #[error("impossible measurement outcome: normalization {0:e}")]
    ImpossibleOutcome(f64),
    #[error("measurement incompatible with ensemble")]
    IncompatibleEnsemble,
    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),
    #[error("invalid tau grid: {0}")]
    InvalidGrid(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
