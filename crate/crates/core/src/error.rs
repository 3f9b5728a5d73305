use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The polarizing vector pairs to zero with one of the weights.
    #[error("non-generic polarizing vector: weight {weight} pairs to zero with eta")]
    NonGenericEta { weight: String },

    /// A weight matrix that should surject onto the dual Lie algebra does not.
    #[error("degenerate weight system: rank {rank} < {expected}")]
    DegenerateWeightSystem { rank: usize, expected: usize },

    /// Polarized weights do not span; the eta-component of the model moment
    /// map cannot be proper.
    #[error("improper moment map model: polarized weights have rank {rank} < {dim}")]
    ImproperMomentMapModel { rank: usize, dim: usize },

    #[error("unbounded polytope")]
    UnboundedPolytope,

    #[error("non-simple polytope: vertex {vertex} lies on {tight} facets, expected {dim}")]
    NonSimplePolytope {
        vertex: String,
        tight: usize,
        dim: usize,
    },

    #[error("polytope is not full-dimensional")]
    NotFullDimensional,

    #[error("rank-deficient projection: rank {rank} < {expected}")]
    RankDeficientProjection { rank: usize, expected: usize },

    #[error("negative squared norm at position {index}")]
    NegativeSquaredNorm { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A sampling window overlaps a wall of the measure being estimated.
    #[error("window not regular")]
    WindowNotRegular,

    /// The one-variable truncated-power recurrence only covers small systems.
    #[error("truncated-power recurrence supports d <= 2 and m <= 4, got d = {d}, m = {m}")]
    RecurrenceScope { d: usize, m: usize },

    /// The truncated-power integrand failed to vanish at infinity; the column
    /// system is not contained in an open half-space.
    #[error("divergent truncated-power integral: columns are not polarizable")]
    DivergentIntegral,

    /// Wraps a summand-level failure with the index of the fixed-point datum.
    #[error("fixed point {index}: {source}")]
    Summand {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
