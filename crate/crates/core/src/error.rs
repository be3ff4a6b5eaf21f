use thiserror::Error;

/// Errors raised by model evaluation, certification and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A quantity lies outside the admissible domain of a model or operation.
    #[error("domain error: {quantity} = {value} is not admissible ({reason})")]
    Domain {
        quantity: &'static str,
        value: f64,
        reason: String,
    },

    /// A tabulated model was queried outside its grid (including the
    /// differencing margin when derivatives are requested).
    #[error("table range error: {axis} = {value} outside [{lo}, {hi}]")]
    TableRange {
        axis: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// The energy derivative of the specific entropy is too close to zero to invert.
    #[error("degenerate entropy derivative: |dsigma/de| = {value:e} below floor {floor:e}")]
    Degenerate { value: f64, floor: f64 },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    /// No sample of a region was admissible for the model.
    #[error("infeasible region: {0}")]
    InfeasibleRegion(String),

    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("table parse error at line {line}: {message}")]
    TableParse { line: usize, message: String },

    #[error("table axis `{axis}` is not strictly increasing at index {index}")]
    AxisNotIncreasing { axis: &'static str, index: usize },

    #[error("step rejected at t = {time}, cell {cell}: {reason}")]
    StepRejected {
        time: f64,
        cell: usize,
        reason: String,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::Domain {
            quantity,
            value,
            reason: reason.into(),
        }
    }
}
