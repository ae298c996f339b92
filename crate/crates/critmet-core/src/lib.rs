//! Thermodynamic criticality as a quantum-sensing resource: numerical core.
//!
//! This crate models `N` two-level atoms collectively coupled to a single
//! cavity mode in thermal equilibrium, the dephasing such an ensemble imprints
//! on an external probe qubit, and the classical/quantum Fisher information
//! that dephasing carries about the ensemble parameters. The modules build on
//! each other in that order:
//!
//! - [`dicke`] — equilibrium thermodynamics of the atom-cavity ensemble:
//!   critical inverse temperature, order parameter, free-energy exponent,
//!   photon moments (thermodynamic-limit closed forms and finite-`N`
//!   quadrature), and their parameter derivatives.
//! - [`probe`] — the probe-qubit decoherence factor, effective probe
//!   parameters from a dispersive microscopic mapping, reduced probe states,
//!   and multi-probe (GHZ / Werner) coherence blocks. The [`probe::exact`]
//!   submodule provides a brute-force eigendecomposition oracle for the
//!   decoherence factor at small `N`.
//! - [`fisher`] — classical and quantum Fisher-information estimators: generic
//!   distribution/Bloch/spectral forms and closed-form expressions for the
//!   coupling-sensing scheme, including GHZ and Werner probe states and the
//!   two-parameter effective information.
//! - [`optimize`] — encoding-time maximization, inverse-temperature scans,
//!   power-law window fits, and probe-number scaling fits.
//!
//! Every public routine is generic over the floating-point type through
//! [`scalar::Real`]; the crate root re-exports `f64` aliases for the main
//! parameter structs since double precision is the intended working type.
//! Everything is deterministic: there is no randomness anywhere in the
//! numerical paths, and scan-level parallelism aggregates by grid index.

pub mod dicke;
pub mod error;
pub mod fisher;
pub mod optimize;
pub mod probe;
pub mod quad;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Ensemble parameters at double precision (the intended working type).
pub type DickeParams = dicke::DickeParams<f64>;
/// Probe-qubit parameters at double precision.
pub type ProbeParams = probe::ProbeParams<f64>;
/// Photon-moment bundle at double precision.
pub type PhotonMoments = dicke::PhotonMoments<f64>;
