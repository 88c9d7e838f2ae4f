//! Exact dynamics on the bouquet of two circles (the torus one-skeleton).
//!
//! The library builds a degree-one circle map with a wandering arc and a
//! plateau, folds it into a self-map of the bouquet `S^(h) ∪ S^(v)`, and
//! computes rotation data exactly: certified rational stand-ins for the
//! rotation angle, convex hulls of rotation vectors, Markov arcs carrying
//! periodic orbits, and the stage maps of the near-homeomorphism
//! factorization on the circle.
//!
//! All core computations run on arbitrary-precision rationals. Long-horizon
//! orbit sampling snaps coordinates to a dyadic grid between steps; every
//! snap is exact arithmetic and the per-step defect is stated by the API.

pub mod brown;
pub mod circlemap;
pub mod exact;
pub mod geometry;
pub mod numeric;
pub mod rotset;
pub mod skeleton;

pub use numeric::IrrationalParam;

/// Arbitrary-precision rational used throughout.
pub type Rat = num::BigRational;

/// Errors shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("continued fraction needs {needed} coefficients, only {available} available")]
    DepthExceedsCoefficients { needed: usize, available: usize },

    #[error("continued-fraction convergent {value} lies outside the open interval (0,1)")]
    ConvergentOutOfRange { value: String },

    #[error("continued-fraction coefficients must be positive")]
    NonPositiveCoefficient,

    #[error("index {index} exceeds the certified range (max_safe_index = {max_safe})")]
    CertificationRange { index: i64, max_safe: i64 },

    #[error("pair ({m},{n}) is not admissible")]
    NotAdmissible { m: i64, n: i64 },

    #[error("empty point set has no hull")]
    EmptyPointSet,

    #[error("hausdorff distance needs both polygons degenerate or both full-dimensional")]
    MixedDegeneracy,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gap arcs collide at indices {0} and {1}")]
    GapCollision(i64, i64),

    #[error("horizon {requested} exceeds the certified window {window}")]
    WindowExceeded { requested: i64, window: i64 },

    #[error("point falls outside the modeled window (would-be gap index {0})")]
    OutsideWindow(i64),

    #[error("inversion requested of a non-invertible map")]
    NotInvertible,

    #[error("thinning exhausted the family at stage {stage}")]
    FamilyExhausted { stage: usize },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    /// True for failures of internal cross-checks (CLI exit code 3).
    pub fn is_consistency(&self) -> bool {
        matches!(self, Error::Consistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
