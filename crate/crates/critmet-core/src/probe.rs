//! Probe-qubit layer: effective probe parameters, the decoherence factor the
//! thermal ensemble imprints on a probe, reduced probe states, and GHZ /
//! Werner multi-probe coherence blocks.
//!
//! A probe qubit dispersively coupled to the cavity acquires no population
//! transfer, only dephasing: in the weak-coupling regime the off-diagonal of
//! the probe's reduced density matrix is multiplied by the decoherence factor
//!
//! ```text
//! ℒ(t) = e^{−i ω_s t} · e^{−2 i λ t ⟨n̂⟩} · e^{−λ² t² ⟨n̂²⟩}
//! ```
//!
//! whose phase carries the mean photon number and whose Gaussian-in-time
//! modulus carries the second moment. All parameter sensitivity of the probe
//! therefore flows through the photon moments of [`crate::dicke`].
//!
//! Multi-probe states enter through their coherence block only: a GHZ state
//! of `ℕ` probes dephases with `ℒ(t)^ℕ`, and a Werner state decomposes into a
//! 2×2 coherent block plus a parameter-independent permutation block that is
//! carried as a scalar weight.

pub mod exact;

use num_complex::Complex;

use crate::dicke::PhotonMoments;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Microscopic precursors of the effective probe parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawProbeParams<T> {
    /// Bare probe splitting `ω_q`.
    pub omega_q: T,
    /// Probe–cavity coupling `g_qc`.
    pub g_qc: T,
    /// Probe–cavity detuning `Δ_q`.
    pub delta_q: T,
    /// Dispersive expansion parameter `χ = g_qc/Δ_q`.
    pub chi: T,
}

/// Effective probe parameters entering the decoherence factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeParams<T> {
    /// Renormalized probe frequency `ω_s`.
    pub omega_s: T,
    /// Effective probe–cavity coupling `λ ≥ 0`.
    pub lambda: T,
    /// Microscopic precursors when built via [`effective_probe_params`].
    pub raw: Option<RawProbeParams<T>>,
    /// Set when `λ/ω_s > 0.2`: the closed-form decoherence factor is derived
    /// for weak coupling, so results outside that regime are indicative only.
    pub weak_coupling_warning: bool,
    /// Set when the dispersive construction is strained (`χ > 0.2` or
    /// `Δ_q/g_qc < 5`); always `false` for directly specified parameters.
    pub dispersive_warning: bool,
}

impl<T: Real> ProbeParams<T> {
    /// Validates and constructs effective probe parameters directly.
    pub fn new(omega_s: T, lambda: T) -> Result<Self> {
        if !omega_s.is_finite() || !lambda.is_finite() {
            return Err(Error::InvalidParams("probe parameters must be finite".into()));
        }
        if omega_s <= T::zero() {
            return Err(Error::InvalidParams("omega_s must be positive".into()));
        }
        if lambda < T::zero() {
            return Err(Error::InvalidParams("lambda must be nonnegative".into()));
        }
        Ok(Self {
            omega_s,
            lambda,
            raw: None,
            weak_coupling_warning: lambda / omega_s > T::lit(0.2),
            dispersive_warning: false,
        })
    }
}

/// Derives effective probe parameters from the microscopic dispersive model.
///
/// With `χ = g_qc/Δ_q`, second-order perturbation theory in the probe–cavity
/// coupling gives
///
/// ```text
/// ω_s = ω_q + 3 g_qc²/Δ_q,        λ = ω χ² + 2 g_qc χ − ω_q χ²,
/// ```
///
/// where `ω` is the cavity frequency. Validity requires `χ ≪ 1`; the returned
/// parameters carry warning flags when `χ > 0.2` or `Δ_q/g_qc < 5`.
pub fn effective_probe_params<T: Real>(
    omega_q: T,
    g_qc: T,
    delta_q: T,
    omega: T,
) -> Result<ProbeParams<T>> {
    if delta_q <= T::zero() {
        return Err(Error::InvalidRegime(
            "dispersive construction requires a positive detuning".into(),
        ));
    }
    if omega_q <= T::zero() || omega <= T::zero() || g_qc < T::zero() {
        return Err(Error::InvalidParams(
            "omega_q and omega must be positive; g_qc must be nonnegative".into(),
        ));
    }
    let chi = g_qc / delta_q;
    let omega_s = omega_q + T::lit(3.0) * g_qc * g_qc / delta_q;
    let lambda = omega * chi * chi + T::lit(2.0) * g_qc * chi - omega_q * chi * chi;
    if lambda < T::zero() {
        return Err(Error::InvalidRegime(
            "effective coupling came out negative; the dispersive expansion does not apply".into(),
        ));
    }
    let dispersive_warning =
        g_qc > T::zero() && (chi > T::lit(0.2) || delta_q / g_qc < T::lit(5.0));
    Ok(ProbeParams {
        omega_s,
        lambda,
        raw: Some(RawProbeParams { omega_q, g_qc, delta_q, chi }),
        weak_coupling_warning: lambda / omega_s > T::lit(0.2),
        dispersive_warning,
    })
}

/// Complex decoherence factor `ℒ(t)` with convenience accessors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceFactor<T> {
    /// The complex value `ℒ(t)`.
    pub value: Complex<T>,
}

impl<T: Real> DecoherenceFactor<T> {
    /// `|ℒ(t)| = e^{−λ²t²⟨n̂²⟩} ∈ (0, 1]`.
    pub fn magnitude(&self) -> T {
        self.value.norm()
    }

    /// Principal-value phase `arg ℒ(t) ∈ (−π, π]`.
    pub fn phase(&self) -> T {
        self.value.arg()
    }
}

/// Phase angle `Θ(t) = (ω_s + 2λ⟨n̂⟩) t` accumulated by the probe coherence.
pub(crate) fn coherence_phase<T: Real>(pp: &ProbeParams<T>, m: &PhotonMoments<T>, t: T) -> T {
    (pp.omega_s + T::lit(2.0) * pp.lambda * m.n_mean) * t
}

/// Decay exponent `x(t) = λ² t² ⟨n̂²⟩` of the coherence modulus.
pub(crate) fn decay_exponent<T: Real>(pp: &ProbeParams<T>, m: &PhotonMoments<T>, t: T) -> T {
    pp.lambda * pp.lambda * t * t * m.n2_mean
}

/// Weak-coupling decoherence factor
/// `ℒ(t) = e^{−i ω_s t} e^{−2iλt⟨n̂⟩} e^{−λ²t²⟨n̂²⟩}`.
///
/// The modulus is monotone non-increasing in `t ≥ 0` and `ℒ(0) = 1`.
pub fn decoherence_factor<T: Real>(
    pp: &ProbeParams<T>,
    m: &PhotonMoments<T>,
    t: T,
) -> DecoherenceFactor<T> {
    assert!(t >= T::zero(), "encoding time must be nonnegative");
    let value = Complex::from_polar(
        (-decay_exponent(pp, m, t)).exp(),
        -coherence_phase(pp, m, t),
    );
    DecoherenceFactor { value }
}

/// Bloch-vector state of a single probe qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState<T> {
    /// Bloch components `(r_x, r_y, r_z)`.
    pub r: [T; 3],
}

impl<T: Real> QubitState<T> {
    /// Euclidean length `|r| ≤ 1`.
    pub fn norm(&self) -> T {
        (self.r[0] * self.r[0] + self.r[1] * self.r[1] + self.r[2] * self.r[2]).sqrt()
    }
}

/// Reduced state of a probe prepared in `(|e⟩ + |g⟩)/√2` after encoding
/// time `t`: a pure dephasing channel, so the populations stay ½ each and
/// the Bloch vector is `r = (Re ℒ(t), −Im ℒ(t), 0)`.
pub fn reduced_state<T: Real>(pp: &ProbeParams<T>, m: &PhotonMoments<T>, t: T) -> QubitState<T> {
    let l = decoherence_factor(pp, m, t).value;
    QubitState { r: [l.re, -l.im, T::zero()] }
}

/// Coherence `ℒ(t)^ℕ` of an `ℕ`-probe GHZ state
/// `(|e…e⟩ + |g…g⟩)/√2`: the off-diagonal of its 2×2 coherent block.
///
/// Computed in polar form, `exp(−ℕ λ²t²⟨n̂²⟩)` and phase `−ℕ Θ(t)`, which is
/// exact for every `ℕ` (no repeated complex multiplication).
pub fn ghz_coherence<T: Real>(
    pp: &ProbeParams<T>,
    m: &PhotonMoments<T>,
    t: T,
    n_probes: u32,
) -> Complex<T> {
    assert!(t >= T::zero(), "encoding time must be nonnegative");
    assert!(n_probes >= 1, "GHZ state needs at least one probe");
    let nn = T::from_u32(n_probes).expect("probe count fits any scalar");
    Complex::from_polar(
        (-nn * decay_exponent(pp, m, t)).exp(),
        -nn * coherence_phase(pp, m, t),
    )
}

/// The coherent 2×2 block of a dephased `ℕ`-probe Werner state plus the
/// scalar weight of its parameter-independent remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WernerBlock<T> {
    /// Each of the two diagonal entries: `w/2^ℕ + (1−w)/2`.
    pub diagonal: T,
    /// Off-diagonal `(1−w)/2 · ℒ(t)^ℕ`.
    pub off_diagonal: Complex<T>,
    /// Total weight `(2^ℕ − 2) w/2^ℕ` of the permutation block, which is
    /// independent of the ensemble parameters and carries no information.
    pub residual_weight: T,
}

impl<T: Real> WernerBlock<T> {
    /// Block trace plus residual weight; equals 1 for a valid state.
    pub fn total_weight(&self) -> T {
        T::lit(2.0) * self.diagonal + self.residual_weight
    }
}

/// Builds the Werner coherence block for admixture `w ∈ [0, 1]`.
///
/// `w = 0` reduces to the GHZ block; `w = 1` is maximally mixed (vanishing
/// off-diagonal). The permutation sector — e.g. for `ℕ = 4` the pattern
/// `|egg…⟩` blocks with their `C(4,1) = 4`-fold orbit and so on — only scales
/// the identity, so it is represented by its total weight alone.
pub fn werner_block<T: Real>(
    pp: &ProbeParams<T>,
    m: &PhotonMoments<T>,
    t: T,
    n_probes: u32,
    w: T,
) -> Result<WernerBlock<T>> {
    if !(w >= T::zero() && w <= T::one()) {
        return Err(Error::InvalidParams("Werner admixture w must lie in [0, 1]".into()));
    }
    let two_pow = T::lit(2.0).powi(n_probes as i32);
    let half = T::lit(0.5);
    let diagonal = w / two_pow + (T::one() - w) * half;
    let off_diagonal = ghz_coherence(pp, m, t, n_probes).scale((T::one() - w) * half);
    let residual_weight = (two_pow - T::lit(2.0)) * w / two_pow;
    Ok(WernerBlock { diagonal, off_diagonal, residual_weight })
}

/// Which multi-probe input state a scaling run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    /// `ℕ` independent probes, each in `(|e⟩+|g⟩)/√2`.
    Uncorrelated,
    /// The maximally entangled state `(|e…e⟩+|g…g⟩)/√2`.
    Ghz,
    /// White-noise admixture `w/2^ℕ · I + (1−w) |GHZ⟩⟨GHZ|`.
    Werner,
}

/// A multi-probe ensemble specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec<T> {
    /// Number of probe qubits `ℕ ≥ 1`.
    pub n_probes: u32,
    /// Input-state family.
    pub kind: EnsembleKind,
    /// Werner admixture; `None` unless `kind` is [`EnsembleKind::Werner`].
    pub w: Option<T>,
}

impl<T: Real> EnsembleSpec<T> {
    /// `ℕ` independent probes.
    pub fn uncorrelated(n_probes: u32) -> Result<Self> {
        Self::validated(n_probes, EnsembleKind::Uncorrelated, None)
    }

    /// An `ℕ`-probe GHZ state.
    pub fn ghz(n_probes: u32) -> Result<Self> {
        Self::validated(n_probes, EnsembleKind::Ghz, None)
    }

    /// An `ℕ`-probe Werner state with admixture `w`.
    pub fn werner(n_probes: u32, w: T) -> Result<Self> {
        Self::validated(n_probes, EnsembleKind::Werner, Some(w))
    }

    fn validated(n_probes: u32, kind: EnsembleKind, w: Option<T>) -> Result<Self> {
        if n_probes == 0 {
            return Err(Error::InvalidParams("ensemble needs at least one probe".into()));
        }
        if kind == EnsembleKind::Werner {
            match w {
                Some(w) if w >= T::zero() && w <= T::one() => {}
                _ => {
                    return Err(Error::InvalidParams(
                        "Werner ensemble requires an admixture w in [0, 1]".into(),
                    ))
                }
            }
        }
        Ok(Self { n_probes, kind, w })
    }
}
