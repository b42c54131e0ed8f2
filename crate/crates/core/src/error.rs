use thiserror::Error;

/// Failure modes shared by the loop, functional, minimizer and oracle layers.
///
/// Payloads are stored as `f64` regardless of the scalar type the computation
/// ran in, so the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("loop passes within {min_distance:e} of a collision (threshold {threshold:e})")]
    NearCollision { min_distance: f64, threshold: f64 },

    #[error("turning angle {raw} is not resolved to an integer winding; refine the grid")]
    NonIntegerWinding { raw: f64 },

    #[error("winding number must be nonzero")]
    InvalidWinding,

    #[error("collision encountered (separation {separation:e})")]
    CollisionEncountered { separation: f64 },

    #[error("energy must be negative, got {energy}")]
    InvalidEnergy { energy: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("loop is off the constraint manifold: constraint {constraint}, target {target}")]
    OffManifold { constraint: f64, target: f64 },

    #[error("degenerate loop: kinetic integral {kinetic:e} too small")]
    DegenerateLoop { kinetic: f64 },

    #[error("bad start: {0}")]
    BadStart(String),

    #[error("iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("trajectory does not return to its initial state within the integrated duration")]
    NoReturn,

    #[error("total momentum {residual:e} is not zero")]
    MomentumNotZero { residual: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
