use thiserror::Error;

/// Crate-wide error type. Variants map onto the failure classes the CLI
/// turns into exit codes, so new variants should pick an existing class
/// where possible.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed model data: degenerate boxes, duplicate object ids,
    /// non-normalizable quaternions.
    #[error("invalid scene: {0}")]
    InvalidScene(String),

    /// Structurally well-formed input that refers to something unknown
    /// (predicate, constant, camera id, object id) or breaks a format
    /// contract.
    #[error("schema error: {0}")]
    Schema(String),

    /// Text-format parse failure with a 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Exact inference asked for more ground query atoms than the
    /// enumeration cap allows.
    #[error("network has {atoms} ground query atoms, exact cap is {cap}")]
    Capacity { atoms: usize, cap: usize },

    /// Evidence contradicts a hard rule, so no query world has mass.
    #[error("infeasible model: {}", violations.join("; "))]
    Infeasible { violations: Vec<String> },

    /// Point at or behind the camera plane cannot be projected.
    #[error("point is behind the camera (depth {depth})")]
    BehindCamera { depth: f64 },

    /// Three correspondences too close to collinear to fix a rotation.
    #[error("degenerate point triple (area {area})")]
    DegenerateTriple { area: f64 },

    /// Not enough correspondences for the requested operation.
    #[error("need at least {needed} correspondences, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// RANSAC could not produce a pose with a valid inlier set.
    #[error("refinement failed: {0}")]
    RefinementFailed(String),

    /// Scenario generator exhausted its placement attempts.
    #[error("could not place object after {attempts} attempts")]
    Placement { attempts: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
