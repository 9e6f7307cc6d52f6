use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size must be at least {min}, got {size}")]
    Alphabet { size: usize, min: usize },

    #[error("symbol {symbol} at position {position} is outside the alphabet of size {size}")]
    SymbolOutOfRange { symbol: u32, position: usize, size: usize },

    #[error("empty sequence")]
    EmptySequence,

    /// A block longer than the counted prefix has no windows.
    #[error("block length {k} exceeds counted length {n}: no windows to count")]
    EmptyTable { k: usize, n: usize },

    #[error("insufficient data: need length at least {needed}, got {n}")]
    InsufficientData { needed: usize, n: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("lattice too small: side {side} leaves no full cell of width {width}")]
    LatticeTooSmall { side: usize, width: usize },

    #[error("memory budget exceeded: {what} needs {size} entries (budget {budget})")]
    MemoryBudget { what: String, size: u128, budget: u128 },

    #[error("kernel is not ergodic: {0}")]
    NonErgodic(String),

    #[error("power iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by the data being too short or too uninformative,
    /// as opposed to malformed input or misuse.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateSample(_)
                | Error::InsufficientData { .. }
                | Error::EmptyTable { .. }
                | Error::LatticeTooSmall { .. }
                | Error::Alphabet { .. }
        )
    }
}
