//! Scalar abstraction for the numerical kernels.
//!
//! Every algorithm in this crate is generic over a floating-point scalar so
//! that the whole pipeline can run in `f64` (the default used by the CLI and
//! by all frozen-value tests) or in `f32` (useful for quick sweeps and for
//! checking numerical robustness). Tolerances are *not* one-size-fits-all:
//! a bisection residual of 1e-12 is meaningful in `f64` and absurd in `f32`,
//! so each precision carries its own set of associated constants.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar with the precision-dependent tolerances used by the
/// solvers, quadrature, and Fisher-information estimators.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Absolute residual target for bracketed root finding.
    const ROOT_TOL: Self;
    /// Relative tolerance for adaptive quadrature.
    const QUAD_TOL: Self;
    /// Peak-relative cutoff below which an integrand tail is truncated.
    const TAIL_CUT: Self;
    /// Relative step for central finite differences.
    const FD_STEP: Self;
    /// Threshold under which an eigenvalue (or eigenvalue pair sum) is
    /// treated as a null subspace in spectral estimators.
    const NULL_TOL: Self;
    /// Tolerance on probability normalization checks.
    const PROB_TOL: Self;
    /// Probabilities below this floor are considered numerically zero.
    const P_FLOOR: Self;
    /// Probability derivatives below this floor are considered zero.
    const DP_FLOOR: Self;
    /// Threshold on 1 - |r|^2 below which a Bloch vector counts as pure.
    const BLOCH_PURE_TOL: Self;
    /// Largest radial velocity |r·∂r| tolerated on a pure Bloch state before
    /// the estimator is declared singular.
    const BLOCH_RADIAL_TOL: Self;
    /// Threshold under which a stationary-point curvature is degenerate.
    const CURVATURE_TOL: Self;
    /// Relative interval tolerance for golden-section refinement.
    const GOLDEN_TOL: Self;

    /// Converts an `f64` literal into this scalar type.
    ///
    /// Used for numeric constants inside generic code; conversion of the
    /// literals appearing in this crate is exact in `f64` and rounds once
    /// in `f32`.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 literal must convert")
    }
}

impl Real for f64 {
    const ROOT_TOL: Self = 1e-12;
    const QUAD_TOL: Self = 1e-10;
    const TAIL_CUT: Self = 1e-16;
    const FD_STEP: Self = 1e-5;
    const NULL_TOL: Self = 1e-14;
    const PROB_TOL: Self = 1e-12;
    const P_FLOOR: Self = 1e-300;
    const DP_FLOOR: Self = 1e-150;
    const BLOCH_PURE_TOL: Self = 1e-12;
    const BLOCH_RADIAL_TOL: Self = 1e-8;
    const CURVATURE_TOL: Self = 1e-12;
    const GOLDEN_TOL: Self = 1e-8;
}

impl Real for f32 {
    const ROOT_TOL: Self = 1e-5;
    const QUAD_TOL: Self = 1e-4;
    const TAIL_CUT: Self = 1e-7;
    const FD_STEP: Self = 5e-3;
    const NULL_TOL: Self = 1e-6;
    const PROB_TOL: Self = 1e-4;
    const P_FLOOR: Self = 1e-30;
    const DP_FLOOR: Self = 1e-15;
    const BLOCH_PURE_TOL: Self = 1e-5;
    const BLOCH_RADIAL_TOL: Self = 1e-4;
    const CURVATURE_TOL: Self = 1e-5;
    const GOLDEN_TOL: Self = 1e-4;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_conversion_round_trips() {
        assert_eq!(f64::lit(0.25), 0.25);
        assert_eq!(f32::lit(0.25), 0.25_f32);
    }

    #[test]
    fn tolerances_are_positive_and_ordered() {
        fn check<T: Real>() {
            assert!(T::ROOT_TOL > T::zero());
            assert!(T::QUAD_TOL > T::zero());
            assert!(T::TAIL_CUT > T::zero());
            assert!(T::P_FLOOR < T::PROB_TOL);
        }
        check::<f64>();
        check::<f32>();
    }
}
