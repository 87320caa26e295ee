use thiserror::Error;

/// Errors shared by the tensor, prox, csc and completion modules.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid mode {0}, expected 1, 2 or 3")]
    InvalidMode(usize),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("imaginary residue {residue:.3e} exceeds tolerance {tol:.3e}: {context}")]
    ImaginaryResidue {
        residue: f64,
        tol: f64,
        context: String,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty observation mask")]
    EmptyMask,
    #[error("file format error: {0}")]
    Format(String),
    #[error("dictionary validation failed: {0}")]
    Dictionary(String),
    #[error("configuration mismatch: {0}")]
    Config(String),
    #[error("solver diverged: {0}")]
    Diverged(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
