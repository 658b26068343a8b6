use thiserror::Error;

/// Failures raised by the estimation kernels and oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `G_n(a)` (or `g_n(a)`) is not representable as a finite double.
    #[error("G_{n}({a}) overflows f64; keep a^n <= O(1)")]
    GOverflow { n: u64, a: f64 },

    /// An estimator term overflowed for a specific box.
    #[error("overflow in box {box_index} (n = {count}, a = {a}): {reason}; keep a_i^n_i <= O(1)")]
    BoxOverflow {
        box_index: usize,
        count: u64,
        a: f64,
        reason: String,
    },

    /// A numerical routine did not reach its target accuracy.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Exhaustive enumeration would exceed the configured outcome budget.
    #[error("enumeration refused: {outcomes} outcomes exceed budget {budget}")]
    BudgetExceeded { outcomes: u128, budget: u128 },

    /// Two aligned vectors have different lengths.
    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    /// A failure while estimating for context `x` of a paired dataset.
    #[error("x = {x}: {source}")]
    InContext { x: u32, source: Box<Error> },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for the overflow family (used to count aborted replicates).
    pub fn is_overflow(&self) -> bool {
        match self {
            Error::GOverflow { .. } | Error::BoxOverflow { .. } => true,
            Error::InContext { source, .. } => source.is_overflow(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
