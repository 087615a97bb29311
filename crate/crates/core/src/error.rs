use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("cell budget exceeded: table needs {cells} cells, budget is {budget}")]
    Budget { cells: u128, budget: u64 },

    #[error("enumeration oracle limited to n1, n2 <= {limit}, got ({n1}, {n2})")]
    OracleScale { n1: usize, n2: usize, limit: usize },

    /// Root finder gave up; carries the last bracket.
    #[error("no convergence after {iterations} iterations, bracket [{lo}, {hi}]")]
    NoConvergence { lo: f64, hi: f64, iterations: usize },

    #[error("algebra error: {0}")]
    Algebra(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: impl Into<f64>) -> Self {
        Error::Domain { what, value: value.into() }
    }
}
