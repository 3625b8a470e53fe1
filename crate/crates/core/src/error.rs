use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator, the oracles and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Green function evaluated at its singular point")]
    SingularPoint,

    #[error("singular vortex configuration: {0}")]
    SingularConfiguration(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("numerical blow-up at step {step}: {reason}")]
    BlowUp { step: u64, reason: String },

    #[error("spurious vortex detection: {0}")]
    SpuriousDetection(String),

    #[error("configurations are not comparable: {0}")]
    IncomparableConfigs(String),

    #[error("ambiguous frame-to-frame matching at frame {frame}")]
    AmbiguousMatching { frame: usize },

    #[error("vortex collision at t = {time}")]
    Collision { time: f64 },

    #[error("bad file format: {0}")]
    Format(String),

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error("missing artifact {}", .0.display())]
    MissingArtifact(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
