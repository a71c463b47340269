use thiserror::Error;

/// Errors raised by the solver, the experiment harness and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or out-of-range configuration value.
    #[error("configuration error: {0}")]
    Config(String),

    /// Projection parameters for which the interface system is singular.
    #[error("ill-posed projection: {0}")]
    WellPosedness(String),

    /// Fields or operators that do not share a mesh, degree or dimension.
    #[error("structural mismatch: {0}")]
    Structural(String),

    /// Basis evaluation requested outside [-1, 1].
    #[error("reference coordinate {0} lies outside [-1, 1]")]
    OutsideReferenceCell(f64),

    /// The requested time integrator cannot handle the diffusion structure.
    #[error("unsupported scheme: {0}")]
    UnsupportedScheme(String),

    /// Non-finite state encountered during time integration.
    #[error("divergence at step {step} (t = {time:e}){context}")]
    Divergence {
        step: usize,
        time: f64,
        context: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach Monte Carlo sample provenance to a divergence error.
    pub fn with_sample(self, sample: usize, seed: u64) -> Self {
        match self {
            Error::Divergence { step, time, .. } => Error::Divergence {
                step,
                time,
                context: format!(" in sample {sample} (root seed {seed})"),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
