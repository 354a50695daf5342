use thiserror::Error;

/// Errors surfaced by the geometry kernel and the detection pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero vector is not primitivizable")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("kernel not a line: span has rank {rank}, need {need}")]
    KernelNotALine { rank: usize, need: usize },

    #[error("singular basis")]
    SingularBasis,

    #[error("malformed rational `{0}`")]
    BadRational(String),

    #[error("facet index {index} out of range 1..={count}")]
    FacetIndex { index: usize, count: usize },

    #[error("point is not interior: l_{facet}(u) = {value}")]
    NotInterior { facet: usize, value: String },

    #[error("polytope invariant violated: {0}")]
    InvalidPolytope(String),

    #[error("system is infeasible")]
    Infeasible,

    #[error("solution set is unbounded")]
    Unbounded,

    #[error("vertex enumeration limited to dimension <= 3, got {0}")]
    VertexDimension(usize),

    #[error("empty tropical support for the given direction")]
    EmptySupport,

    #[error("point lies in the tropicalization; no separating direction exists")]
    NotSeparable,

    #[error("point is not in the intersection of the complexes")]
    NotInIntersection,

    #[error("coordinate index {index} out of range 1..={dim}")]
    CoordinateIndex { index: usize, dim: usize },

    #[error("empty set has no Hausdorff distance")]
    EmptySet,

    #[error("metric computations are limited to dimension 2, got {0}")]
    MetricDimension(usize),

    #[error("facet translation by {delta} produced an invalid polytope: {reason}")]
    BadTranslation { delta: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
