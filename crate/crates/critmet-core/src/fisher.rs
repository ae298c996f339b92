//! Classical and quantum Fisher information for dephasing thermometry-style
//! probes, plus generic estimators for discrete distributions, Bloch vectors,
//! and spectral decompositions.
//!
//! The probe-specific quantities all follow from the decoherence factor of
//! [`crate::probe`]: the coherence modulus `e^{−x(t)}` with
//! `x = λ²t²⟨n̂²⟩` carries second-moment information, the accumulated phase
//! `Θ(t) = (ω_s + 2λ⟨n̂⟩)t` carries first-moment information, and parameter
//! sensitivity enters through the photon-moment derivatives of
//! [`crate::dicke`]. For a single probe the quantum Fisher information with
//! respect to the coupling `g` is
//!
//! ```text
//! ℱ_g(t) = ½ λ²t² [ 8 (∂_g⟨n̂⟩)² e^{−2x} + λ²t² (∂_g⟨n̂²⟩)² (coth x − 1) ]
//! ```
//!
//! and the GHZ / Werner ensemble variants reweight the same two channels.
//! Three generic estimators (discrete classical, Bloch-vector, spectral)
//! provide mutually independent routes to the same numbers; the unit tests
//! exploit that redundancy heavily rather than checking formulas against
//! themselves.

use num_complex::Complex;

use crate::dicke::PhotonMoments;
use crate::error::{Error, Result};
use crate::probe::{coherence_phase, decay_exponent, EnsembleKind, EnsembleSpec, ProbeParams};
use crate::scalar::Real;

/// Classical Fisher information of a discrete distribution, with a
/// divergence flag for estimation problems whose information is unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalFisher<T> {
    /// `F = Σ_i (∂p_i)² / p_i` over the supported outcomes.
    pub value: T,
    /// Set when some outcome has vanishing probability but non-vanishing
    /// sensitivity, which makes the information formally infinite. The
    /// value is `+∞` in that case; this is a flag, not an error.
    pub divergent: bool,
}

/// Classical Fisher information `F = Σ_i (∂_θ p_i)²/p_i` of a discrete
/// distribution `p` with parameter derivatives `dp`.
///
/// Outcomes with `p_i` below the probability floor are skipped when their
/// derivative also vanishes (they carry no information); if such an outcome
/// retains a finite derivative the information diverges and is reported as
/// `+∞` with the [`ClassicalFisher::divergent`] flag set.
pub fn classical_fisher_information<T: Real>(
    probs: &[T],
    dprobs: &[T],
) -> Result<ClassicalFisher<T>> {
    if probs.len() != dprobs.len() {
        return Err(Error::InvalidParams(format!(
            "probability and derivative slices differ in length: {} vs {}",
            probs.len(),
            dprobs.len()
        )));
    }
    let mut total = T::zero();
    for &p in probs {
        if !p.is_finite() || p < -T::PROB_TOL {
            return Err(Error::InvalidDistribution(
                "probabilities must be finite and nonnegative".into(),
            ));
        }
        total += p;
    }
    if (total - T::one()).abs() > T::PROB_TOL {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}, expected 1"
        )));
    }
    let mut fisher = T::zero();
    let mut divergent = false;
    for (&p, &dp) in probs.iter().zip(dprobs) {
        let p = p.max(T::zero());
        if p < T::P_FLOOR {
            if dp.abs() >= T::DP_FLOOR {
                divergent = true;
            }
            continue;
        }
        fisher += dp * dp / p;
    }
    Ok(ClassicalFisher {
        value: if divergent { T::infinity() } else { fisher },
        divergent,
    })
}

/// Quantum Fisher information of a qubit given its Bloch vector `r` and the
/// parameter derivative `∂r`.
///
/// For mixed states (`|r| < 1`) this is `|∂r|² + (r·∂r)²/(1 − |r|²)`; on the
/// pure-state boundary the radial term has a removable limit only when the
/// motion is tangential, so a pure state with a radial velocity beyond
/// tolerance is reported as [`Error::SingularBloch`].
pub fn bloch_qfi<T: Real>(r: &[T; 3], dr: &[T; 3]) -> Result<T> {
    let r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    if r2 > T::one() + T::PROB_TOL {
        return Err(Error::InvalidParams(format!(
            "Bloch vector lies outside the unit ball: |r|^2 = {r2}"
        )));
    }
    let tangential = dr[0] * dr[0] + dr[1] * dr[1] + dr[2] * dr[2];
    let radial = r[0] * dr[0] + r[1] * dr[1] + r[2] * dr[2];
    let gap = T::one() - r2;
    if gap < T::BLOCH_PURE_TOL {
        if radial.abs() < T::BLOCH_RADIAL_TOL {
            return Ok(tangential);
        }
        return Err(Error::SingularBloch {
            radial_velocity: radial.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(tangential + radial * radial / gap)
}

/// Complex inner product `⟨a|b⟩ = Σ_i conj(a_i)·b_i`.
fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).fold(Complex::new(T::zero(), T::zero()), |s, v| s + v)
}

/// Quantum Fisher information from a spectral decomposition
/// `ρ = Σ_l π_l |ψ_l⟩⟨ψ_l|` with parameter derivatives of both the weights
/// and the (orthonormal) eigenvectors:
///
/// ```text
/// F = Σ_l (∂π_l)²/π_l + 4 Σ_l π_l ⟨∂ψ_l|∂ψ_l⟩
///       − 8 Σ_{l,l'} π_l π_l'/(π_l + π_l') |⟨ψ_l|∂ψ_l'⟩|²
/// ```
///
/// The last sum runs over *all* pairs including `l = l'`, which makes the
/// expression invariant under the local phase gauge of each eigenvector.
/// Weights (or pair sums) below the null tolerance are excluded, restricting
/// the estimator to the support of the state. Orthonormality of the supplied
/// eigenbasis is the caller's responsibility.
pub fn spectral_qfi<T: Real>(
    weights: &[T],
    dweights: &[T],
    states: &[Vec<Complex<T>>],
    dstates: &[Vec<Complex<T>>],
) -> Result<T> {
    let n = weights.len();
    if dweights.len() != n || states.len() != n || dstates.len() != n {
        return Err(Error::InvalidParams(
            "weights, derivatives, states, and state derivatives must have equal length".into(),
        ));
    }
    let dim = states.first().map_or(0, Vec::len);
    if states.iter().any(|s| s.len() != dim) || dstates.iter().any(|s| s.len() != dim) {
        return Err(Error::InvalidParams("all eigenvectors must share one dimension".into()));
    }
    let mut total = T::zero();
    for &w in weights {
        if !w.is_finite() || w < -T::PROB_TOL {
            return Err(Error::InvalidDistribution(
                "spectral weights must be finite and nonnegative".into(),
            ));
        }
        total += w;
    }
    if (total - T::one()).abs() > T::PROB_TOL {
        return Err(Error::InvalidDistribution(format!(
            "spectral weights sum to {total}, expected 1"
        )));
    }

    let mut fisher = T::zero();
    for l in 0..n {
        if weights[l] < T::NULL_TOL {
            continue;
        }
        fisher += dweights[l] * dweights[l] / weights[l];
        fisher += T::lit(4.0) * weights[l] * inner(&dstates[l], &dstates[l]).re;
    }
    for l in 0..n {
        for lp in 0..n {
            let pair = weights[l] + weights[lp];
            if pair < T::NULL_TOL {
                continue;
            }
            let overlap = inner(&states[l], &dstates[lp]).norm_sqr();
            fisher -= T::lit(8.0) * weights[l] * weights[lp] / pair * overlap;
        }
    }
    Ok(fisher)
}

/// `coth(x) − 1` for `x > 0`, computed as `2/(e^{2x} − 1)` via `exp_m1`.
///
/// This single expression is accurate to machine precision across the whole
/// range: for small `x` the `exp_m1` expansion keeps the leading `1/x`
/// behaviour exact, and for large `x` it decays gracefully to zero without
/// cancellation.
fn coth_minus_one<T: Real>(x: T) -> T {
    T::lit(2.0) / (x + x).exp_m1()
}

/// Shared kernel: QFI of `ℕ` maximally entangled probes (GHZ for `ℕ > 1`,
/// a single probe for `ℕ = 1`) with respect to the parameter whose moment
/// derivatives are `dn = ∂⟨n̂⟩`, `dn2 = ∂⟨n̂²⟩`.
fn collective_dephasing_qfi<T: Real>(
    lambda: T,
    t: T,
    n2_mean: T,
    dn: T,
    dn2: T,
    n_probes: u32,
) -> T {
    assert!(t >= T::zero(), "encoding time must be nonnegative");
    assert!(n2_mean > T::zero(), "second photon moment must be positive");
    if t == T::zero() || lambda == T::zero() {
        return T::zero();
    }
    let nn = T::from_u32(n_probes).expect("probe count fits any scalar");
    let lt2 = lambda * lambda * t * t;
    let nx = nn * lt2 * n2_mean;
    let phase_channel = T::lit(8.0) * dn * dn * (-(nx + nx)).exp();
    let modulus_channel = lt2 * dn2 * dn2 * coth_minus_one(nx);
    T::lit(0.5) * nn * nn * lt2 * (phase_channel + modulus_channel)
}

/// Single-probe quantum Fisher information for the coupling `g`.
pub fn quantum_fi_g<T: Real>(pp: &ProbeParams<T>, m: &PhotonMoments<T>, t: T) -> T {
    collective_dephasing_qfi(pp.lambda, t, m.n2_mean, m.dg_n, m.dg_n2, 1)
}

/// Single-probe quantum Fisher information for the boson frequency `ω`.
pub fn quantum_fi_omega<T: Real>(pp: &ProbeParams<T>, m: &PhotonMoments<T>, t: T) -> T {
    collective_dephasing_qfi(pp.lambda, t, m.n2_mean, m.dom_n, m.dom_n2, 1)
}

/// Classical Fisher information for `g` of the fixed equatorial measurement
/// `σ_x` on a single dephased probe:
///
/// ```text
/// F_g(t) = M²(2λt ∂_g⟨n̂⟩ sinΘ + λ²t² ∂_g⟨n̂²⟩ cosΘ)² / (1 − M² cos²Θ)
/// ```
///
/// with `M = e^{−x}` and `Θ = (ω_s + 2λ⟨n̂⟩)t`. The measurement is kept
/// fixed (not re-optimized per time), so `F_g ≤ ℱ_g` everywhere, with near
/// saturation only at favourable phases.
pub fn classical_fi_g<T: Real>(pp: &ProbeParams<T>, m: &PhotonMoments<T>, t: T) -> T {
    assert!(t >= T::zero(), "encoding time must be nonnegative");
    if t == T::zero() || pp.lambda == T::zero() {
        return T::zero();
    }
    let theta = coherence_phase(pp, m, t);
    let modulus = (-decay_exponent(pp, m, t)).exp();
    let lt = pp.lambda * t;
    let slope = T::lit(2.0) * lt * m.dg_n * theta.sin() + lt * lt * m.dg_n2 * theta.cos();
    let numerator = modulus * modulus * slope * slope;
    let denominator = T::one() - modulus * modulus * theta.cos() * theta.cos();
    if denominator <= T::zero() {
        // Both factors vanish together only at t = 0 (handled above); any
        // residual nonpositive denominator is pure rounding at x ≈ 0 where
        // the numerator is second-order small.
        return T::zero();
    }
    numerator / denominator
}

/// Quantum Fisher information for `g` of an `ℕ`-probe GHZ state.
///
/// Reduces to [`quantum_fi_g`] at `ℕ = 1`. The phase channel is amplified
/// by `ℕ²` but its coherence decays `ℕ` times faster, so entanglement only
/// pays off over a finite time window.
pub fn ghz_fi_g<T: Real>(pp: &ProbeParams<T>, m: &PhotonMoments<T>, t: T, n_probes: u32) -> T {
    assert!(n_probes >= 1, "GHZ state needs at least one probe");
    collective_dephasing_qfi(pp.lambda, t, m.n2_mean, m.dg_n, m.dg_n2, n_probes)
}

/// How to evaluate the Werner-ensemble Fisher information.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WernerMethod {
    /// Analytic QFI of the 2×2 coherent block (the permutation remainder is
    /// parameter independent and contributes nothing).
    Exact,
    /// Large-`ℕ` limit `(1 − w)·ℱ_GHZ`, which ignores the `w/2^ℕ` admixture
    /// inside the coherent block.
    Asymptotic,
}

/// Quantum Fisher information for `g` of an `ℕ`-probe Werner state with
/// white-noise admixture `w ∈ [0, 1]`.
///
/// The dephased Werner state splits into a 2×2 block on
/// `span{|e…e⟩, |g…g⟩}` with diagonal `d = w/2^ℕ + (1−w)/2` and off-diagonal
/// magnitude `|c| = (1−w)/2·e^{−ℕx}`, plus a parameter-independent
/// permutation sector. Its exact QFI is
///
/// ```text
/// ℱ_W = 2d (∂|c|)²/(d² − |c|²) + 2|c|² (∂ψ)²/d,
/// ```
///
/// with `∂|c| = −|c| ℕλ²t² ∂_g⟨n̂²⟩` and phase slope `∂ψ = −2ℕλt ∂_g⟨n̂⟩`.
/// `w = 0` reproduces the GHZ value and `w = 1` yields zero.
pub fn werner_fi_g<T: Real>(
    pp: &ProbeParams<T>,
    m: &PhotonMoments<T>,
    t: T,
    n_probes: u32,
    w: T,
    method: WernerMethod,
) -> Result<T> {
    if !(w >= T::zero() && w <= T::one()) {
        return Err(Error::InvalidParams("Werner admixture w must lie in [0, 1]".into()));
    }
    assert!(n_probes >= 1, "Werner state needs at least one probe");
    if method == WernerMethod::Asymptotic {
        return Ok((T::one() - w) * ghz_fi_g(pp, m, t, n_probes));
    }
    assert!(t >= T::zero(), "encoding time must be nonnegative");
    if t == T::zero() || pp.lambda == T::zero() {
        return Ok(T::zero());
    }
    let nn = T::from_u32(n_probes).expect("probe count fits any scalar");
    let lt2 = pp.lambda * pp.lambda * t * t;
    let nx = nn * lt2 * m.n2_mean;
    let two_pow = T::lit(2.0).powi(n_probes as i32);
    let half = T::lit(0.5);
    let d = w / two_pow + (T::one() - w) * half;
    let c_mag = (T::one() - w) * half * (-nx).exp();
    let dc = -c_mag * nn * lt2 * m.dg_n2;
    let dpsi = -T::lit(2.0) * nn * pp.lambda * t * m.dg_n;
    let gap = d * d - c_mag * c_mag;
    if gap <= T::zero() {
        // Only reachable through rounding at w = 0, ℕx ≈ 0, where the
        // exact value is itself second-order small.
        return Ok(T::zero());
    }
    Ok(T::lit(2.0) * d * dc * dc / gap + T::lit(2.0) * c_mag * c_mag * dpsi * dpsi / d)
}

/// Quantum Fisher information for `g` of a multi-probe ensemble.
///
/// Uncorrelated probes contribute additively (`ℕ·ℱ_g`); GHZ and Werner
/// ensembles use their dedicated forms. `werner_method` is ignored for the
/// other ensemble kinds.
pub fn ensemble_fi_g<T: Real>(
    pp: &ProbeParams<T>,
    m: &PhotonMoments<T>,
    t: T,
    spec: &EnsembleSpec<T>,
    werner_method: WernerMethod,
) -> Result<T> {
    let nn = T::from_u32(spec.n_probes).expect("probe count fits any scalar");
    match spec.kind {
        EnsembleKind::Uncorrelated => Ok(nn * quantum_fi_g(pp, m, t)),
        EnsembleKind::Ghz => Ok(ghz_fi_g(pp, m, t, spec.n_probes)),
        EnsembleKind::Werner => {
            let w = spec.w.ok_or_else(|| {
                Error::InvalidParams("Werner ensemble requires an admixture w".into())
            })?;
            werner_fi_g(pp, m, t, spec.n_probes, w, werner_method)
        }
    }
}

/// Symmetric 2×2 quantum Fisher information matrix over the parameter pair
/// `ζ = (ω, g)`, with a stably computed determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherMatrix<T> {
    /// `ℱ_ωω` entry.
    pub omega_omega: T,
    /// `ℱ_ωg = ℱ_gω` entry.
    pub omega_g: T,
    /// `ℱ_gg` entry.
    pub g_g: T,
    /// Set when the matrix trace underflows the probability floor, i.e.
    /// no information about either parameter remains at this time.
    pub degenerate: bool,
    det: T,
}

impl<T: Real> FisherMatrix<T> {
    /// Matrix trace `ℱ_ωω + ℱ_gg`.
    pub fn trace(&self) -> T {
        self.omega_omega + self.g_g
    }

    /// Determinant, evaluated in factored form so it is exactly nonnegative
    /// instead of suffering cancellation between near-equal products.
    pub fn determinant(&self) -> T {
        self.det
    }

    /// Scalar multi-parameter figure of merit `Det ℱ / Tr ℱ`, weighting both
    /// parameters equally. Zero (not an error) for a degenerate matrix.
    pub fn effective(&self) -> T {
        if self.degenerate {
            return T::zero();
        }
        self.det / self.trace()
    }
}

/// Builds the two-parameter Fisher matrix for `ζ = (ω, g)` at time `t`:
/// `ℱ_mn = ½λ²t²[8 ∂_m⟨n̂⟩ ∂_n⟨n̂⟩ e^{−2x} + λ²t² ∂_m⟨n̂²⟩ ∂_n⟨n̂²⟩ (coth x − 1)]`.
///
/// Both entries of each rank-one channel share a scalar prefactor, so the
/// determinant reduces to `c₁c₂ (∂_ω⟨n̂⟩∂_g⟨n̂²⟩ − ∂_g⟨n̂⟩∂_ω⟨n̂²⟩)²`, which
/// is evaluated directly in that form.
pub fn fisher_matrix<T: Real>(pp: &ProbeParams<T>, m: &PhotonMoments<T>, t: T) -> FisherMatrix<T> {
    assert!(t >= T::zero(), "encoding time must be nonnegative");
    if t == T::zero() || pp.lambda == T::zero() {
        return FisherMatrix {
            omega_omega: T::zero(),
            omega_g: T::zero(),
            g_g: T::zero(),
            degenerate: true,
            det: T::zero(),
        };
    }
    let lt2 = pp.lambda * pp.lambda * t * t;
    let x = lt2 * m.n2_mean;
    let c1 = T::lit(4.0) * lt2 * (-(x + x)).exp();
    let c2 = T::lit(0.5) * lt2 * lt2 * coth_minus_one(x);
    let omega_omega = c1 * m.dom_n * m.dom_n + c2 * m.dom_n2 * m.dom_n2;
    let omega_g = c1 * m.dom_n * m.dg_n + c2 * m.dom_n2 * m.dg_n2;
    let g_g = c1 * m.dg_n * m.dg_n + c2 * m.dg_n2 * m.dg_n2;
    let cross = m.dom_n * m.dg_n2 - m.dg_n * m.dom_n2;
    let det = c1 * c2 * cross * cross;
    let degenerate = omega_omega + g_g < T::P_FLOOR;
    FisherMatrix { omega_omega, omega_g, g_g, degenerate, det }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke::MomentMethod;
    use crate::probe::decoherence_factor;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// Closed-form moment bundle at the transition point of the standard
    /// ensemble parameters.
    fn bc_moments() -> PhotonMoments<f64> {
        PhotonMoments {
            n_mean: 3.005490852414797,
            n2_mean: 27.09892579184707,
            dg_n: 3105.427625071404,
            dg_n2: 18666.668639976626,
            dom_n: -2818.066246524393,
            dom_n2: -17156.532847063034,
            method: MomentMethod::ClosedForm,
        }
    }

    /// Closed-form moments 5% above the transition temperature scale.
    fn warm_moments() -> PhotonMoments<f64> {
        PhotonMoments {
            n_mean: 20.988383106840026,
            n2_mean: 456.89857512465613,
            dg_n: 2900.9639656011054,
            dg_n2: 121773.08617834779,
            dom_n: 0.0,
            dom_n2: 0.0,
            method: MomentMethod::ClosedForm,
        }
    }

    fn probe() -> ProbeParams<f64> {
        ProbeParams::new(1.5, 0.1).unwrap()
    }

    #[test]
    fn bernoulli_classical_fisher_matches_hand_value() {
        let out = classical_fisher_information(&[0.25, 0.75], &[1.0, -1.0]).unwrap();
        assert_relative_eq!(out.value, 16.0 / 3.0, max_relative = 1e-14);
        assert!(!out.divergent);
    }

    #[test]
    fn three_outcome_classical_fisher_matches_hand_value() {
        // 0.01/0.2 + 0.09/0.3 + 0.04/0.5 = 0.05 + 0.3 + 0.08.
        let out = classical_fisher_information(&[0.2, 0.3, 0.5], &[0.1, -0.3, 0.2]).unwrap();
        assert_relative_eq!(out.value, 0.43, max_relative = 1e-14);
    }

    #[test]
    fn uninformative_zero_probability_outcomes_are_skipped() {
        let out = classical_fisher_information(&[0.5, 0.5, 0.0], &[0.1, -0.1, 0.0]).unwrap();
        assert_relative_eq!(out.value, 0.04, max_relative = 1e-14);
        assert!(!out.divergent);
    }

    #[test]
    fn informative_zero_probability_outcomes_flag_divergence() {
        let out = classical_fisher_information(&[1.0_f64, 0.0], &[-1e-100, 1e-100]).unwrap();
        assert!(out.divergent);
        assert!(out.value.is_infinite() && out.value > 0.0);
    }

    #[test]
    fn classical_fisher_validates_distributions() {
        assert!(matches!(
            classical_fisher_information(&[0.5, 0.5], &[1.0]),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            classical_fisher_information(&[0.5, 0.4], &[1.0, -1.0]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            classical_fisher_information(&[1.2, -0.2], &[1.0, -1.0]),
            Err(Error::InvalidDistribution(_))
        ));
    }

    #[test]
    fn bloch_reference_families() {
        // Equatorial rotation of a mixed state: F = m².
        let m = 0.6;
        let theta = 0.83_f64;
        let r = [m * theta.cos(), m * theta.sin(), 0.0];
        let dr = [-m * theta.sin(), m * theta.cos(), 0.0];
        assert_relative_eq!(bloch_qfi(&r, &dr).unwrap(), 0.36, max_relative = 1e-14);
        // Pure-state rotation: F = |∂r|².
        let r = [theta.cos(), theta.sin(), 0.0];
        let dr = [-theta.sin(), theta.cos(), 0.0];
        assert_relative_eq!(bloch_qfi(&r, &dr).unwrap(), 1.0, max_relative = 1e-12);
        // Radial motion of a mixed state: F = 1 + s²/(1−s²) = 1/(1−s²).
        let s = 0.5;
        assert_relative_eq!(
            bloch_qfi(&[s, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap(),
            4.0 / 3.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn bloch_rejects_radial_motion_on_pure_states() {
        let result = bloch_qfi(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]);
        match result {
            Err(Error::SingularBloch { radial_velocity }) => {
                assert_relative_eq!(radial_velocity, 1.0, max_relative = 1e-12);
            }
            other => panic!("expected SingularBloch, got {other:?}"),
        }
        assert!(bloch_qfi(&[1.1, 0.0, 0.0], &[0.0, 0.0, 0.0]).is_err());
    }

    /// Spectral data of the equatorial rotation family
    /// `r(θ) = m(cosθ, sinθ, 0)`: fixed weights `(1±m)/2`, rotating
    /// eigenvectors `(1, ±e^{iθ})/√2`.
    #[allow(clippy::type_complexity)]
    fn rotation_spectral(
        m: f64,
        theta: f64,
    ) -> (Vec<f64>, Vec<f64>, Vec<Vec<Complex<f64>>>, Vec<Vec<Complex<f64>>>) {
        let isq = std::f64::consts::FRAC_1_SQRT_2;
        let phase = Complex::from_polar(isq, theta);
        let dphase = phase * Complex::new(0.0, 1.0);
        (
            vec![(1.0 + m) / 2.0, (1.0 - m) / 2.0],
            vec![0.0, 0.0],
            vec![
                vec![Complex::new(isq, 0.0), phase],
                vec![Complex::new(isq, 0.0), -phase],
            ],
            vec![vec![Complex::new(0.0, 0.0), dphase], vec![Complex::new(0.0, 0.0), -dphase]],
        )
    }

    #[test]
    fn spectral_matches_bloch_on_reference_families() {
        // Rotation family: both routes give m².
        let (w, dw, v, dv) = rotation_spectral(0.6, 0.83);
        assert_relative_eq!(spectral_qfi(&w, &dw, &v, &dv).unwrap(), 0.36, max_relative = 1e-13);
        // Radial family r = (s, 0, 0): fixed eigenvectors (1, ±1)/√2,
        // moving weights (1±s)/2 — both routes give 1/(1−s²).
        let isq = std::f64::consts::FRAC_1_SQRT_2;
        let plus = vec![Complex::new(isq, 0.0), Complex::new(isq, 0.0)];
        let minus = vec![Complex::new(isq, 0.0), Complex::new(-isq, 0.0)];
        let zero = vec![Complex::new(0.0, 0.0); 2];
        let f = spectral_qfi(
            &[0.75, 0.25],
            &[0.5, -0.5],
            &[plus, minus],
            &[zero.clone(), zero],
        )
        .unwrap();
        assert_relative_eq!(f, 4.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn spectral_is_additive_over_orthogonal_blocks() {
        // Embed the rotation family (F = 0.36) and the radial family
        // (F = 4/3) in orthogonal 2-dim blocks of C⁴ with weight ½ each:
        // cross overlaps vanish, so F = (0.36 + 4/3)/2.
        let (w_a, dw_a, v_a, dv_a) = rotation_spectral(0.6, 0.83);
        let isq = std::f64::consts::FRAC_1_SQRT_2;
        let embed = |front: &[Complex<f64>], back: bool| -> Vec<Complex<f64>> {
            let mut out = vec![Complex::new(0.0, 0.0); 4];
            let offset = if back { 2 } else { 0 };
            out[offset] = front[0];
            out[offset + 1] = front[1];
            out
        };
        let weights = vec![w_a[0] / 2.0, w_a[1] / 2.0, 0.75 / 2.0, 0.25 / 2.0];
        let dweights = vec![dw_a[0] / 2.0, dw_a[1] / 2.0, 0.25, -0.25];
        let states = vec![
            embed(&v_a[0], false),
            embed(&v_a[1], false),
            embed(&[Complex::new(isq, 0.0), Complex::new(isq, 0.0)], true),
            embed(&[Complex::new(isq, 0.0), Complex::new(-isq, 0.0)], true),
        ];
        let zero = vec![Complex::new(0.0, 0.0); 4];
        let dstates = vec![
            embed(&dv_a[0], false),
            embed(&dv_a[1], false),
            zero.clone(),
            zero,
        ];
        let f = spectral_qfi(&weights, &dweights, &states, &dstates).unwrap();
        assert_relative_eq!(f, (0.36 + 4.0 / 3.0) / 2.0, max_relative = 1e-13);
    }

    #[test]
    fn spectral_validates_inputs() {
        let isq = std::f64::consts::FRAC_1_SQRT_2;
        let v = vec![Complex::new(isq, 0.0), Complex::new(isq, 0.0)];
        let zero = vec![Complex::new(0.0, 0.0); 2];
        // Weights not normalized.
        assert!(spectral_qfi(&[0.6, 0.6], &[0.0, 0.0], &[v.clone(), v.clone()], &[
            zero.clone(),
            zero.clone()
        ])
        .is_err());
        // Length mismatch.
        assert!(spectral_qfi(&[1.0], &[0.0, 0.0], &[v.clone()], &[zero.clone()]).is_err());
        // Dimension mismatch.
        assert!(spectral_qfi(
            &[0.5, 0.5],
            &[0.0, 0.0],
            &[v, vec![Complex::new(1.0, 0.0)]],
            &[zero.clone(), zero]
        )
        .is_err());
    }

    #[test]
    fn coth_minus_one_is_accurate_across_scales() {
        // Small argument: series coth(x) − 1 = 1/x − 1 + x/3 − x³/45 + …
        let x = 1e-8;
        let series = 1.0 / x - 1.0 + x / 3.0;
        assert_relative_eq!(coth_minus_one(x), series, max_relative = 1e-12);
        // Moderate argument: direct evaluation is safe to compare against.
        let x = 2.0_f64;
        let direct = x.cosh() / x.sinh() - 1.0;
        assert_relative_eq!(coth_minus_one(x), direct, max_relative = 1e-13);
        // Large argument: 2e^{−2x} asymptote without overflow.
        let x = 20.0_f64;
        assert_relative_eq!(coth_minus_one(x), 2.0 * (-40.0_f64).exp(), max_relative = 1e-13);
        // Extreme argument: graceful underflow to zero.
        assert_eq!(coth_minus_one(800.0), 0.0);
    }

    #[test]
    fn dephasing_qfi_matches_the_bloch_route() {
        // Independent route: differentiate the decoherence factor, map to a
        // Bloch vector, and use the generic qubit estimator.
        let (pp, m) = (probe(), bc_moments());
        for &t in &[0.05, 0.3, 1.0, 1.4226600146629609, 2.5] {
            let l = decoherence_factor(&pp, &m, t).value;
            let lt = pp.lambda * t;
            let dlog = Complex::new(-lt * lt * m.dg_n2, -2.0 * lt * m.dg_n);
            let dl = l * dlog;
            let r = [l.re, -l.im, 0.0];
            let dr = [dl.re, -dl.im, 0.0];
            let via_bloch = bloch_qfi(&r, &dr).unwrap();
            assert_relative_eq!(quantum_fi_g(&pp, &m, t), via_bloch, max_relative = 1e-11);
        }
    }

    #[test]
    fn measured_probe_fisher_matches_the_generic_estimator() {
        // The σ_x measurement has outcome probabilities (1 ± Re ℒ)/2; the
        // closed form must agree with the generic discrete-distribution
        // estimator fed those probabilities.
        let (pp, m) = (probe(), bc_moments());
        for &t in &[0.07, 0.4, 0.9, 1.4226600146629609] {
            let l = decoherence_factor(&pp, &m, t).value;
            let lt = pp.lambda * t;
            let dlog = Complex::new(-lt * lt * m.dg_n2, -2.0 * lt * m.dg_n);
            let dl = l * dlog;
            let probs = [(1.0 + l.re) / 2.0, (1.0 - l.re) / 2.0];
            let dprobs = [dl.re / 2.0, -dl.re / 2.0];
            let generic = classical_fisher_information(&probs, &dprobs).unwrap().value;
            assert_relative_eq!(classical_fi_g(&pp, &m, t), generic, max_relative = 1e-10);
        }
    }

    #[test]
    fn classical_information_never_exceeds_quantum() {
        let (pp, m) = (probe(), bc_moments());
        for i in 1..=60 {
            let t = 0.05 * f64::from(i);
            let fc = classical_fi_g(&pp, &m, t);
            let fq = quantum_fi_g(&pp, &m, t);
            assert!(
                fc <= fq * (1.0 + 1e-12),
                "classical {fc} exceeds quantum {fq} at t = {t}"
            );
        }
    }

    #[test]
    fn frozen_peak_values_at_the_transition() {
        let (pp, m) = (probe(), bc_moments());
        let fq = quantum_fi_g(&pp, &m, 1.4226600146629609);
        assert_relative_eq!(fq, 332228.1546893214, max_relative = 1e-10);
        let matrix = fisher_matrix(&pp, &m, 1.6158937284574924);
        assert_relative_eq!(matrix.effective(), 4.3021059303454985, max_relative = 1e-10);
    }

    #[test]
    fn frozen_deep_decay_tail_values() {
        let (pp, m) = (probe(), warm_moments());
        assert_relative_eq!(
            quantum_fi_g(&pp, &m, 5.0),
            5.710095923462467e-91,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            classical_fi_g(&pp, &m, 5.0),
            5.629555258338879e-91,
            max_relative = 1e-9
        );
    }

    #[test]
    fn information_vanishes_at_zero_time_and_at_long_times() {
        let (pp, m) = (probe(), bc_moments());
        assert_eq!(quantum_fi_g(&pp, &m, 0.0), 0.0);
        assert_eq!(classical_fi_g(&pp, &m, 0.0), 0.0);
        assert_eq!(ghz_fi_g(&pp, &m, 0.0, 4), 0.0);
        // x(60) ≈ 976: both channels underflow to exactly zero.
        assert_eq!(quantum_fi_g(&pp, &m, 60.0), 0.0);
        assert_eq!(classical_fi_g(&pp, &m, 60.0), 0.0);
        // And a decoupled probe learns nothing at any time.
        let idle = ProbeParams::new(1.5, 0.0).unwrap();
        assert_eq!(quantum_fi_g(&idle, &m, 1.0), 0.0);
    }

    #[test]
    fn ghz_reduces_to_single_probe() {
        let (pp, m) = (probe(), bc_moments());
        for &t in &[0.2, 0.9, 1.7] {
            assert_relative_eq!(
                ghz_fi_g(&pp, &m, t, 1),
                quantum_fi_g(&pp, &m, t),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn werner_limits_recover_ghz_and_nothing() {
        let (pp, m) = (probe(), bc_moments());
        let t = 0.9;
        for n_probes in [1, 3, 7] {
            let at_zero = werner_fi_g(&pp, &m, t, n_probes, 0.0, WernerMethod::Exact).unwrap();
            assert_relative_eq!(at_zero, ghz_fi_g(&pp, &m, t, n_probes), max_relative = 1e-13);
            let at_one = werner_fi_g(&pp, &m, t, n_probes, 1.0, WernerMethod::Exact).unwrap();
            assert_eq!(at_one, 0.0);
        }
        assert!(werner_fi_g(&pp, &m, t, 3, 1.5, WernerMethod::Exact).is_err());
    }

    #[test]
    fn werner_exact_matches_spectral_decomposition() {
        // Independent route: build the explicit 8-dimensional spectral data
        // of a 3-probe Werner state and feed the generic estimator.
        let (pp, m) = (probe(), bc_moments());
        let (t, w, nn) = (0.9, 0.3, 3.0);
        let lt2 = pp.lambda * pp.lambda * t * t;
        let nx = nn * lt2 * m.n2_mean;
        let theta = (pp.omega_s + 2.0 * pp.lambda * m.n_mean) * t;
        let d = w / 8.0 + (1.0 - w) / 2.0;
        let c_mag = (1.0 - w) / 2.0 * (-nx).exp();
        let dc_mag = -c_mag * nn * lt2 * m.dg_n2;
        let phi = -nn * theta;
        let dphi = -nn * 2.0 * pp.lambda * t * m.dg_n;
        let isq = std::f64::consts::FRAC_1_SQRT_2;

        let mut weights = vec![d + c_mag, d - c_mag];
        let mut dweights = vec![dc_mag, -dc_mag];
        let mut states: Vec<Vec<Complex<f64>>> = Vec::new();
        let mut dstates: Vec<Vec<Complex<f64>>> = Vec::new();
        // Eigenvectors (|000⟩ ± e^{−iφ}|111⟩)/√2 in an 8-dim basis where
        // index 0 is |000⟩ and index 7 is |111⟩.
        for sign in [1.0, -1.0] {
            let mut v = vec![Complex::new(0.0, 0.0); 8];
            v[0] = Complex::new(isq, 0.0);
            v[7] = Complex::from_polar(isq, -phi) * sign;
            let mut dv = vec![Complex::new(0.0, 0.0); 8];
            dv[7] = v[7] * Complex::new(0.0, -dphi);
            states.push(v);
            dstates.push(dv);
        }
        // Six parameter-independent permutation eigenstates of weight w/8.
        for j in 1..7 {
            let mut v = vec![Complex::new(0.0, 0.0); 8];
            v[j] = Complex::new(1.0, 0.0);
            states.push(v);
            dstates.push(vec![Complex::new(0.0, 0.0); 8]);
            weights.push(w / 8.0);
            dweights.push(0.0);
        }

        let via_spectral = spectral_qfi(&weights, &dweights, &states, &dstates).unwrap();
        let exact = werner_fi_g(&pp, &m, t, 3, w, WernerMethod::Exact).unwrap();
        assert_relative_eq!(exact, via_spectral, max_relative = 1e-11);
    }

    #[test]
    fn werner_asymptotic_approaches_exact_for_many_probes() {
        let (pp, m) = (probe(), bc_moments());
        let t = 0.4;
        let exact = werner_fi_g(&pp, &m, t, 12, 0.5, WernerMethod::Exact).unwrap();
        let asymptotic = werner_fi_g(&pp, &m, t, 12, 0.5, WernerMethod::Asymptotic).unwrap();
        assert!(exact > 0.0);
        assert_relative_eq!(asymptotic, exact, max_relative = 1e-2);
        // At small ℕ the admixture term matters and the two differ more.
        let exact_small = werner_fi_g(&pp, &m, t, 2, 0.5, WernerMethod::Exact).unwrap();
        let asym_small = werner_fi_g(&pp, &m, t, 2, 0.5, WernerMethod::Asymptotic).unwrap();
        assert!((asym_small - exact_small).abs() / exact_small > 1e-2);
    }

    #[test]
    fn uncorrelated_ensemble_matches_tensor_product_spectral() {
        // Two independent probes: build the exact 4-dimensional spectral
        // data of ρ ⊗ ρ with product-rule derivatives and compare against
        // additivity (2× the single-probe value).
        let (pp, m) = (probe(), bc_moments());
        let t = 0.7;
        let l = decoherence_factor(&pp, &m, t).value;
        let mag = l.norm();
        let theta = (pp.omega_s + 2.0 * pp.lambda * m.n_mean) * t;
        let lt2 = pp.lambda * pp.lambda * t * t;
        let dmag = -mag * lt2 * m.dg_n2;
        let dtheta = 2.0 * pp.lambda * t * m.dg_n;
        let isq = std::f64::consts::FRAC_1_SQRT_2;

        // Single-probe eigensystem: ρ₁ = [[½, ℒ/2], [ℒ̄/2, ½]] has
        // eigenvectors (1, ±e^{iΘ})/√2 and eigenvalues (1 ± |ℒ|)/2.
        let phase = Complex::from_polar(isq, theta);
        let dphase = phase * Complex::new(0.0, dtheta);
        let vs = [
            vec![Complex::new(isq, 0.0), phase],
            vec![Complex::new(isq, 0.0), -phase],
        ];
        let dvs = [
            vec![Complex::new(0.0, 0.0), dphase],
            vec![Complex::new(0.0, 0.0), -dphase],
        ];
        let ws = [(1.0 + mag) / 2.0, (1.0 - mag) / 2.0];
        let dws = [dmag / 2.0, -dmag / 2.0];

        let kron = |a: &[Complex<f64>], b: &[Complex<f64>]| -> Vec<Complex<f64>> {
            let mut out = Vec::with_capacity(4);
            for x in a {
                for y in b {
                    out.push(x * y);
                }
            }
            out
        };

        let mut weights = Vec::new();
        let mut dweights = Vec::new();
        let mut states = Vec::new();
        let mut dstates = Vec::new();
        for s in 0..2 {
            for q in 0..2 {
                weights.push(ws[s] * ws[q]);
                dweights.push(dws[s] * ws[q] + ws[s] * dws[q]);
                states.push(kron(&vs[s], &vs[q]));
                let mut dv = kron(&dvs[s], &vs[q]);
                for (slot, extra) in dv.iter_mut().zip(kron(&vs[s], &dvs[q])) {
                    *slot += extra;
                }
                dstates.push(dv);
            }
        }

        let via_spectral = spectral_qfi(&weights, &dweights, &states, &dstates).unwrap();
        let spec = EnsembleSpec::uncorrelated(2).unwrap();
        let additive = ensemble_fi_g(&pp, &m, t, &spec, WernerMethod::Exact).unwrap();
        assert_relative_eq!(additive, 2.0 * quantum_fi_g(&pp, &m, t), max_relative = 1e-15);
        assert_relative_eq!(via_spectral, additive, max_relative = 1e-11);
    }

    #[test]
    fn ensemble_dispatch_covers_all_kinds() {
        let (pp, m) = (probe(), bc_moments());
        let t = 0.8;
        let unc = EnsembleSpec::uncorrelated(5).unwrap();
        assert_relative_eq!(
            ensemble_fi_g(&pp, &m, t, &unc, WernerMethod::Exact).unwrap(),
            5.0 * quantum_fi_g(&pp, &m, t),
            max_relative = 1e-15
        );
        let ghz = EnsembleSpec::ghz(5).unwrap();
        assert_relative_eq!(
            ensemble_fi_g(&pp, &m, t, &ghz, WernerMethod::Exact).unwrap(),
            ghz_fi_g(&pp, &m, t, 5),
            max_relative = 1e-15
        );
        let werner = EnsembleSpec::werner(5, 0.25).unwrap();
        assert_relative_eq!(
            ensemble_fi_g(&pp, &m, t, &werner, WernerMethod::Exact).unwrap(),
            werner_fi_g(&pp, &m, t, 5, 0.25, WernerMethod::Exact).unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn fisher_matrix_entries_are_consistent() {
        let (pp, m) = (probe(), bc_moments());
        let t = 1.1;
        let matrix = fisher_matrix(&pp, &m, t);
        assert_relative_eq!(matrix.g_g, quantum_fi_g(&pp, &m, t), max_relative = 1e-13);
        assert_relative_eq!(matrix.omega_omega, quantum_fi_omega(&pp, &m, t), max_relative = 1e-13);
        assert!(!matrix.degenerate);
        assert!(matrix.determinant() >= 0.0);
        assert_relative_eq!(
            matrix.effective(),
            matrix.determinant() / matrix.trace(),
            max_relative = 1e-15
        );
        // Cross-check the factored determinant on a well-conditioned
        // synthetic bundle where the textbook formula is safe.
        let synthetic = PhotonMoments {
            n_mean: 2.0,
            n2_mean: 9.0,
            dg_n: 3.0,
            dg_n2: 1.0,
            dom_n: -1.0,
            dom_n2: 4.0,
            method: MomentMethod::ClosedForm,
        };
        let mx = fisher_matrix(&pp, &synthetic, 0.8);
        let textbook = mx.omega_omega * mx.g_g - mx.omega_g * mx.omega_g;
        assert_relative_eq!(mx.determinant(), textbook, max_relative = 1e-10);
    }

    #[test]
    fn fisher_matrix_degenerates_gracefully() {
        let (pp, m) = (probe(), bc_moments());
        let at_zero = fisher_matrix(&pp, &m, 0.0);
        assert!(at_zero.degenerate);
        assert_eq!(at_zero.effective(), 0.0);
        assert_eq!(at_zero.trace(), 0.0);
        // Deep decay: entries underflow, flag set, effective stays finite.
        let late = fisher_matrix(&pp, &m, 80.0);
        assert!(late.degenerate);
        assert_eq!(late.effective(), 0.0);
    }

    #[test]
    fn equal_diagonal_matrix_halves_in_the_effective_scalar() {
        // With the cross channel suppressed, ℱ = diag(a, a) must give
        // ℱ_eff = a/2. Engineer it: only the phase channel active (dn2 = 0)
        // and equal-magnitude mean derivatives.
        let pp = probe();
        let m = PhotonMoments {
            n_mean: 2.0,
            n2_mean: 9.0,
            dg_n: 3.0,
            dg_n2: 0.0,
            dom_n: 3.0,
            dom_n2: 0.0,
            method: MomentMethod::ClosedForm,
        };
        let mx = fisher_matrix(&pp, &m, 0.6);
        assert_relative_eq!(mx.omega_omega, mx.g_g, max_relative = 1e-15);
        // Fully correlated channels: determinant (hence effective) vanish.
        assert_eq!(mx.determinant(), 0.0);
        assert_eq!(mx.effective(), 0.0);
        // Now decorrelate via the modulus channel on ω only.
        let m2 = PhotonMoments { dom_n: 0.0, dom_n2: 5.0, ..m };
        let mx2 = fisher_matrix(&pp, &m2, 0.6);
        assert_abs_diff_eq!(mx2.omega_g, 0.0, epsilon = 1e-20);
        let a = mx2.g_g;
        let b = mx2.omega_omega;
        assert_relative_eq!(mx2.effective(), a * b / (a + b), max_relative = 1e-13);
    }
}
