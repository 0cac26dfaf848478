use thiserror::Error;

use crate::states::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter fell outside its allowed range.
    #[error("{name} = {value} is out of range (expected {expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The matrix has a non-negligible element off the diagonal and anti-diagonal.
    #[error("state is not X-shaped: element ({row}, {col}) has magnitude {magnitude:.3e}")]
    NotXState { row: usize, col: usize, magnitude: f64 },

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidState(ValidationReport),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    /// An evaluator disagreed with itself or an optimizer failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    expected: &'static str,
) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected,
        })
    }
}
