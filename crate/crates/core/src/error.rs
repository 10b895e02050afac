use thiserror::Error;

/// Errors produced while building meshes, assembling and solving discrete problems.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("element {element} is not star-shaped with respect to its center")]
    NotStarShaped { element: usize },

    #[error("cannot refine element {element}: {reason}")]
    Refinement { element: usize, reason: String },

    #[error("unsupported quadrature order {0}")]
    UnsupportedOrder(usize),

    #[error("singular {0} system")]
    Singular(&'static str),

    #[error("incompatible data for {what}: residual {residual:e}")]
    Incompatible { what: &'static str, residual: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("level {level}: {source}")]
    Level { level: usize, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
