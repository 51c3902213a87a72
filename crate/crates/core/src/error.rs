use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("enumeration of {needed} items exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("no squared norm of the cube falls inside the window [{low}, {high}]")]
    EmptyWindow { low: f64, high: f64 },

    #[error("coordinate {value} at index {index} is outside [0, {max}]")]
    CoordOutOfRange { index: usize, value: u32, max: u32 },

    #[error("digit {digit} at position {position} is not below {y}")]
    DigitOutOfRange { position: usize, digit: u64, y: u32 },

    #[error("witness filter removed every annulus point")]
    EmptyResult,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed set file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Fails with [`Error::BudgetExceeded`] before any allocation happens.
pub(crate) fn check_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}
