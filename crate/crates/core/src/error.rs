use thiserror::Error;

/// Errors raised by the numerical routines and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("degenerate field: every active sample lies inside the zero band")]
    DegenerateField,

    #[error("endpoint ({x:.6}, {y:.6}) is farther than one cell from every boundary feature")]
    UnderResolved { x: f64, y: f64 },

    #[error("active mask is not connected ({components} components)")]
    Disconnected { components: usize },

    #[error("eigen-solver did not converge: {0}")]
    NoConvergence(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
