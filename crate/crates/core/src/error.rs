use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range for dimension {dim}")]
    OutOfRange { index: usize, dim: usize },

    /// Truncation of the Fock space discarded more weight than allowed.
    #[error("truncation leakage {leakage:.3e} exceeds bound {bound:.3e}{}", required_hint(.required_dim))]
    Truncation {
        leakage: f64,
        bound: f64,
        required_dim: Option<usize>,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("channel construction failed: {0}")]
    Construction(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

fn required_hint(dim: &Option<usize>) -> String {
    match dim {
        Some(d) => format!(" (cutoff of at least {d} required)"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
