use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid room: {0}")]
    InvalidRoom(String),

    #[error("invalid array layout: {0}")]
    LayoutInvalid(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid deployment: {0}")]
    InvalidDeployment(String),

    #[error("placement enumeration infeasible: {0}")]
    Infeasible(String),

    #[error("invalid distance bounds: d_min = {d_min}, d_max = {d_max}")]
    InvalidBounds { d_min: f64, d_max: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("link index {index} out of range for {pairs} pairs")]
    InvalidLink { index: usize, pairs: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The closed-form capacity bound has a non-positive denominator.
    #[error("upper bound is vacuous: denominator {denominator} <= 0")]
    BoundInvalid { denominator: f64 },

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("config error on line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    #[error("config error for key `{key}`: {message}")]
    ConfigValue { key: String, message: String },

    #[error("missing required config key `{0}`")]
    ConfigMissing(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
