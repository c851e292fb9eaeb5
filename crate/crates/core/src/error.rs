use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("non-manifold mesh: {0}")]
    NonManifold(String),
    #[error("mesh is not watertight: {0}")]
    NotWatertight(String),
    #[error("invalid face index {0}")]
    InvalidFace(usize),
    #[error("barycentric coordinates ({alpha}, {beta}) lie outside face {face}")]
    OutsideFace { face: usize, alpha: f64, beta: f64 },
    #[error("no triangle strip connects face {from} to face {to}")]
    Unreachable { from: usize, to: usize },
    #[error("degenerate triangle strip: {0}")]
    DegenerateStrip(String),
    #[error("strip straightening exceeded {0} iterations")]
    IterationCap(usize),
    #[error("geodesic extension of length {required} exceeds the limit {limit}")]
    ExtensionUnstable { required: f64, limit: f64 },
    #[error("unsupported degree {0}")]
    UnsupportedDegree(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported SVG feature: {0}")]
    SvgUnsupportedFeature(String),
    #[error("malformed SVG: {0}")]
    Svg(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
