use thiserror::Error;

/// Errors raised by constructions and contract checks in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector must have at least one coordinate")]
    EmptyVector,

    #[error("coordinate {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error("empirical mean is the zero vector; its direction is undefined")]
    ZeroMean,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("hypothesis (mean, x_i) >= 0 fails at indices {indices:?}")]
    HypothesisViolated { indices: Vec<usize> },

    #[error("margin is not positive: |mean| = {norm_mean}, localization radius = {radius}")]
    DeltaNotPositive { norm_mean: f64, radius: f64 },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks `value` against a range and reports the offending parameter name.
pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    range: &'static str,
    ok: impl FnOnce(f64) -> bool,
) -> Result<()> {
    if value.is_finite() && ok(value) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}
