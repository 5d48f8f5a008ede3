use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A channel, power or strategy value is outside its admissible range.
    #[error("{0}")]
    Domain(String),

    /// The closed forms only exist when the direct link is stronger than the cross link.
    #[error("direct gain must exceed cross gain (a = {a}, a_c = {a_c})")]
    NoPositiveSecrecy { a: f64, a_c: f64 },

    /// `lambda` reached the pole `a_c / a` of the stationary power curve.
    #[error("power curve is singular at lambda = {lambda} (requires lambda < a_c/a = {limit})")]
    Singular { lambda: f64, limit: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
