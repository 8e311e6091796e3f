use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported modulation order {0}: expected one of 2, 4, 8, 16")]
    UnsupportedOrder(usize),

    #[error("symbol {symbol} out of range for modulation order {order}")]
    SymbolOutOfRange { symbol: usize, order: usize },

    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("argument outside the domain of {function}: {value}")]
    Domain { function: &'static str, value: f64 },

    #[error(
        "no closed-form bound for M = {order} with N_R = {n_r}: the cross-user confusion term \
         is only tractable for a single relay antenna (or binary modulation)"
    )]
    NoClosedForm { order: usize, n_r: usize },

    #[error("exhaustive enumeration of {size} matrices exceeds the cap of {cap}; use sampled mode")]
    EnumerationCap { size: u128, cap: u128 },

    #[error("slope fit needs at least {required} converged points in the window, found {found}")]
    InsufficientPoints { found: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
