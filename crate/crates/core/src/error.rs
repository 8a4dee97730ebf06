use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An exact count did not fit in the cell type.
    #[error("arithmetic overflow while counting n={n}, j={j}")]
    Overflow { n: u64, j: u64 },

    #[error("configuration error: {0}")]
    Config(String),

    /// A table or enumeration would exceed the configured memory budget.
    #[error("resource budget exceeded: {what} needs {requested} bytes, budget is {budget}")]
    Resource {
        what: String,
        requested: u64,
        budget: u64,
    },

    #[error("enumeration step budget of {steps} exceeded")]
    StepBudget { steps: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("cache rejected: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
