//! Error type shared by every module of the crate.

/// Failure modes of the library.
///
/// Validation results (groupoid axioms, functor laws, bundle laws) are not
/// errors; they are returned as report values by the `validate` family.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("input error: {0}")]
    Input(String),
    /// A bounded computation refused to run past its configured bound.
    #[error("capability bound exceeded: {0}")]
    Capability(String),
    /// A numerical identity failed beyond tolerance.
    #[error("numerical check failed: {0}")]
    Numerical(String),
    /// A constructed object failed its own post-condition check.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! input_err {
    ($($arg:tt)*) => { $crate::error::Error::Input(format!($($arg)*)) };
}
pub(crate) use input_err;
