use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid loop shape: {0}")]
    InvalidShape(String),

    #[error("shape admits no closed configuration: {0}")]
    InfeasibleShape(String),

    #[error("pose parameters outside the feasible range: {0}")]
    InfeasibleDof(String),

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("expected {expected} links, got {got}")]
    LinkCountMismatch { expected: usize, got: usize },

    #[error(
        "negative radicand on link {link}: squared length {sq_length} < squared projection {sq_proj}"
    )]
    NegativeRadicand {
        link: usize,
        sq_length: f64,
        sq_proj: f64,
    },

    #[error(
        "no sign pattern closes the loop (best residual {residual:e}, tolerance {tolerance:e})"
    )]
    InconsistentFrame { residual: f64, tolerance: f64 },

    #[error("squared link lengths must be positive and finite")]
    NonPositiveShape,

    #[error("linear system has no equations")]
    EmptySystem,

    #[error("{needed} frames required, got {got}")]
    TooFewFrames { needed: usize, got: usize },

    #[error("square solve needs exactly {needed} equations, got {got}")]
    NotSquare { needed: usize, got: usize },

    #[error("coefficient matrix is singular")]
    SingularSystem,

    #[error("recovered squared lengths are not all positive: {0:?}")]
    NonPhysical(Vec<f64>),

    #[error("invalid noise model: {0}")]
    InvalidNoise(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numbers rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NegativeRadicand { .. }
                | Error::InconsistentFrame { .. }
                | Error::SingularSystem
                | Error::NonPhysical(_)
        )
    }
}
