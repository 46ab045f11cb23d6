use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("jet is not a unit: |constant term| = {0:e}")]
    NotAUnit(f64),

    #[error("cocharacter {0:?} is not in the lattice")]
    NotInLattice(Vec<i64>),

    #[error("sample hit a zero of the theta function")]
    SampleAtZero,

    #[error("incompatible lattices: {0}")]
    IncompatibleLattices(String),

    #[error("division by a value near zero ({0:e})")]
    DivisionNearZero(f64),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("magnitude out of floating-point range (log scale {0})")]
    Overflow(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}
