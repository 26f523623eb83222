use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("matrix is not a projector (max deviation {0:.3e})")]
    NotProjector(f64),
    #[error("eigenvalue off the unit circle (||λ|−1| = {0:.3e})")]
    NotUnitModulus(f64),
    #[error("invalid party selection: {0}")]
    InvalidParties(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("not distinguishable{0}")]
    NotDistinguishable(String),
    #[error("no Alice basis found within the optimization budget")]
    NoBasisFound,
    #[error("strategy inapplicable: {0}")]
    StrategyInapplicable(String),
    #[error("dimension cap exceeded: {0} > {1}")]
    DimensionCap(usize, usize),
    #[error("oracle use budget exceeded: planned {0} > {1}")]
    BudgetExceeded(usize, usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
