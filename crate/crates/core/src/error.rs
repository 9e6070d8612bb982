use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Diagnostics carried out of a failed Newton solve.
#[derive(Debug, Clone)]
pub struct NewtonFailure {
    /// Increment index (0-based) that failed.
    pub increment: usize,
    /// Number of automatic bisections attempted.
    pub bisections: usize,
    /// Relative residual history of the last attempt.
    pub residuals: Vec<f64>,
    /// Load factor of the last committed increment.
    pub committed_load: f64,
}

impl fmt::Display for NewtonFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "increment {} failed after {} bisections (committed load factor {:.6}); \
             last residuals: {:?}",
            self.increment, self.bisections, self.committed_load, self.residuals
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("material error: {0}")]
    Material(String),

    /// The constitutive integrator could not follow a (typically
    /// transient, diverging) trial state; recoverable by step bisection.
    #[error("material update unstable: {0}")]
    MaterialUnstable(String),

    #[error("enrichment error: {0}")]
    Enrichment(String),

    #[error("singular system: near-zero pivot at global dof {dof} ({detail})")]
    Singular { dof: usize, detail: String },

    #[error("newton solve failed: {0}")]
    Newton(Box<NewtonFailure>),

    #[error("postprocessing error: {0}")]
    Postproc(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn mesh(msg: impl Into<String>) -> Self {
        Error::Mesh(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn material(msg: impl Into<String>) -> Self {
        Error::Material(msg.into())
    }
    pub fn enrichment(msg: impl Into<String>) -> Self {
        Error::Enrichment(msg.into())
    }
    pub fn postproc(msg: impl Into<String>) -> Self {
        Error::Postproc(msg.into())
    }
}
