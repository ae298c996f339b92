//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors produced by the thermodynamic solvers, quadrature, probe layer,
/// Fisher-information estimators, and optimization routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A domain type was constructed with out-of-range fields.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The coupling is too weak for an ordered phase: no finite critical
    /// temperature exists when epsilon*omega/(4 g^2) >= 1.
    #[error("no finite critical temperature: epsilon*omega/(4 g^2) = {ratio} >= 1")]
    NoTransition { ratio: f64 },

    /// Bracketed bisection failed to reach its residual target.
    #[error("root finding did not converge: residual {residual:e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },

    /// Probe parameters violate the dispersive-coupling construction.
    #[error("invalid coupling regime: {0}")]
    InvalidRegime(String),

    /// Adaptive quadrature exceeded its subdivision cap.
    #[error("adaptive quadrature exceeded its subdivision cap")]
    QuadratureFailure,

    /// Distribution input failed validation (negative entries, wrong
    /// normalization, mismatched lengths).
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A Bloch vector sits on the pure-state sphere while its radial
    /// velocity is non-negligible, which the Bloch-form information formula
    /// cannot represent.
    #[error("singular Bloch data: |r| = 1 with radial velocity {radial_velocity:e}")]
    SingularBloch { radial_velocity: f64 },

    /// The requested photon cutoff leaves too much thermal tail weight.
    #[error("photon cutoff too small: tail weight {tail:e} exceeds 1e-10")]
    CutoffTooSmall { tail: f64 },

    /// The exact-oracle Hilbert space exceeds the configured dimension cap.
    #[error("exact-oracle dimension {dim} exceeds cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    /// A time-maximization target is flat: its maximum sits at t = 0 with
    /// value zero, signalling zero sensitivity.
    #[error("flat function: maximum at t = 0 with value 0")]
    FlatFunction,

    /// A fit window selected fewer points than the minimum.
    #[error("insufficient points in fit window: got {got}, need at least {required}")]
    InsufficientPoints { got: usize, required: usize },

    /// The stationary-point curvature vanishes, so the saddle-point
    /// partition-function estimate is undefined (flat-top at criticality).
    #[error("degenerate curvature at the stationary point: |phi''(z0)| = {value:e}")]
    DegenerateCurvature { value: f64 },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
