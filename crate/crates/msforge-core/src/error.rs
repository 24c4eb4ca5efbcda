use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("malformed curve: {0}")]
    MalformedCurve(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("path comes within {clearance:.3e} of the special point z = {point}")]
    Clearance { point: String, clearance: f64 },
    #[error("branch tracking failed: {0}")]
    Branch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
