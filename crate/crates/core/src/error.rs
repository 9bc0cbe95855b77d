use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("paraboloid signature (d+ = {d_plus}, d- = {d_minus}) rejected: only hyperbolic signatures are supported")]
    Paraboloid { d_plus: usize, d_minus: usize },

    #[error("quadrature budget exceeded after {evaluations} evaluations (best estimate {value}, error {abs_error:e})")]
    BudgetExceeded {
        value: Complex64,
        abs_error: f64,
        evaluations: usize,
    },

    #[error("argument {0} lies on the branch cut of the principal power")]
    BranchCut(Complex64),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("change of variables degenerates at p = {p} (critical exponent {p_critical})")]
    DegenerateChange { p: f64, p_critical: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
