//! Optimization and fitting: encoding-time maximization, temperature scans
//! of the probe Fisher information, critical-exponent power-law fits,
//! fully optimized precision bounds, and probe-number scaling fits.
//!
//! Conventions shared by everything here:
//!
//! - Encoding times are searched on `[0, t_max]` with
//!   `t_max = 5/(λ√⟨n̂²⟩)`, i.e. out to decay exponent `x = 25`, far beyond
//!   any information maximum (the modulus channel peaks near `x ≈ 0.79`,
//!   the phase channel at `x = ½`).
//! - A coarse grid locates the global maximum (dense enough to prevent
//!   aliasing between the oscillation-free envelopes used here), then a
//!   golden-section pass refines the bracket; ties resolve to the smaller
//!   time.
//! - Temperature grids are expressed as ratios `β/β_c` so results transfer
//!   between parameter sets.

use rayon::prelude::*;

use crate::dicke::{
    moment_derivatives, resolve_moment_method, DickeParams, MomentChoice, MomentMethod,
    PhotonMoments,
};
use crate::error::{Error, Result};
use crate::fisher::{
    classical_fi_g, ensemble_fi_g, fisher_matrix, quantum_fi_g, WernerMethod,
};
use crate::probe::{EnsembleKind, EnsembleSpec, ProbeParams};
use crate::scalar::Real;

/// Inverse golden ratio `(√5 − 1)/2`, the section step of the refinement.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of a one-dimensional encoding-time maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeOptimum<T> {
    /// Maximizing encoding time.
    pub t_opt: T,
    /// Objective value at the optimum.
    pub value: T,
}

/// Maximizes `fi(t)` over `t ∈ [0, t_max]`.
///
/// A `grid_points`-point uniform grid (including both endpoints) locates the
/// best bracket; golden-section search then refines it to relative width
/// [`Real::GOLDEN_TOL`]. Ties resolve to the smaller time. An objective that
/// never rises above its `t = 0` value of zero has no information maximum
/// and is reported as [`Error::FlatFunction`].
pub fn maximize_over_time<T, F>(fi: F, t_max: T, grid_points: usize) -> Result<TimeOptimum<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !(t_max.is_finite() && t_max > T::zero()) {
        return Err(Error::InvalidParams(format!("t_max must be positive and finite, got {t_max}")));
    }
    if grid_points < 3 {
        return Err(Error::InvalidParams(format!(
            "time grid needs at least 3 points, got {grid_points}"
        )));
    }
    let count = T::from_usize(grid_points - 1).expect("grid size fits any scalar");
    let node = |i: usize| -> T {
        T::from_usize(i).expect("grid index fits any scalar") / count * t_max
    };
    let mut best_i = 0;
    let mut best = TimeOptimum { t_opt: T::zero(), value: fi(T::zero()) };
    for i in 1..grid_points {
        let t = node(i);
        let v = fi(t);
        if v > best.value {
            best_i = i;
            best = TimeOptimum { t_opt: t, value: v };
        }
    }
    if best_i == 0 && best.value <= T::zero() {
        return Err(Error::FlatFunction);
    }

    let lo = if best_i == 0 { T::zero() } else { node(best_i - 1) };
    let hi = if best_i + 1 >= grid_points { t_max } else { node(best_i + 1) };
    let refined = golden_max(&fi, lo, hi, T::GOLDEN_TOL * t_max);
    if refined.value > best.value
        || (refined.value == best.value && refined.t_opt < best.t_opt)
    {
        best = refined;
    }
    Ok(best)
}

/// Golden-section maximization on `[a, b]`; ties resolve leftward.
fn golden_max<T, F>(f: &F, mut a: T, mut b: T, tol: T) -> TimeOptimum<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    let invphi = T::lit(INV_PHI);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        TimeOptimum { t_opt: c, value: fc }
    } else {
        TimeOptimum { t_opt: d, value: fd }
    }
}

/// Encoding-time search window `t_max = 5/(λ√⟨n̂²⟩)`, i.e. decay exponent
/// `x = 25` at the window edge.
pub fn time_window<T: Real>(pp: &ProbeParams<T>, m: &PhotonMoments<T>) -> Result<T> {
    if pp.lambda <= T::zero() {
        return Err(Error::InvalidParams(
            "time optimization requires a positive probe coupling".into(),
        ));
    }
    if m.n2_mean <= T::zero() {
        return Err(Error::InvalidParams("second photon moment must be positive".into()));
    }
    Ok(T::lit(5.0) / (pp.lambda * m.n2_mean.sqrt()))
}

/// Uniform grid of inverse-temperature ratios `β/β_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaGrid<T> {
    /// First ratio (inclusive).
    pub start_ratio: T,
    /// Last ratio (inclusive).
    pub end_ratio: T,
    /// Number of grid points (≥ 2).
    pub points: usize,
}

impl<T: Real> BetaGrid<T> {
    /// Validates and constructs a ratio grid.
    pub fn new(start_ratio: T, end_ratio: T, points: usize) -> Result<Self> {
        if !(start_ratio.is_finite() && end_ratio.is_finite()) || start_ratio <= T::zero() {
            return Err(Error::InvalidParams("ratio grid bounds must be positive and finite".into()));
        }
        if end_ratio <= start_ratio {
            return Err(Error::InvalidParams(format!(
                "ratio grid needs end > start, got [{start_ratio}, {end_ratio}]"
            )));
        }
        if points < 2 {
            return Err(Error::InvalidParams(format!(
                "ratio grid needs at least 2 points, got {points}"
            )));
        }
        Ok(Self { start_ratio, end_ratio, points })
    }

    /// The grid ratios. Endpoint fractions are formed as `i/(points−1)`
    /// first, so round fractions (½, ¼, …) — and with them landmark ratios
    /// like `β/β_c = 1` on symmetric grids — are hit exactly.
    pub fn ratios(&self) -> Vec<T> {
        let count = T::from_usize(self.points - 1).expect("grid size fits any scalar");
        (0..self.points)
            .map(|i| {
                let f = T::from_usize(i).expect("grid index fits any scalar") / count;
                self.start_ratio + (self.end_ratio - self.start_ratio) * f
            })
            .collect()
    }
}

/// One row of a temperature scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaScanPoint<T> {
    /// `β/β_c`.
    pub beta_ratio: T,
    /// Absolute inverse temperature.
    pub beta: T,
    /// Encoding time maximizing the single-probe quantum Fisher information.
    pub t_opt: T,
    /// Classical (σ_x-measured) Fisher information at `t_opt`.
    pub classical: T,
    /// Quantum Fisher information for `g` at `t_opt`.
    pub quantum: T,
    /// Two-parameter figure `Det ℱ/Tr ℱ`, maximized over its own time.
    pub effective: T,
    /// Moment route used at this temperature.
    pub method: MomentMethod,
}

/// A temperature scan of the probe Fisher information.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaScan<T> {
    /// Critical inverse temperature of the scanned parameter set.
    pub beta_c: T,
    /// Scan rows, ordered by increasing `β/β_c`.
    pub points: Vec<BetaScanPoint<T>>,
}

impl<T: Real> BetaScan<T> {
    /// Row maximizing the quantum Fisher information (first on ties).
    pub fn peak_quantum(&self) -> Option<&BetaScanPoint<T>> {
        self.points
            .iter()
            .fold(None, |best: Option<&BetaScanPoint<T>>, pt| match best {
                Some(b) if pt.quantum <= b.quantum => Some(b),
                _ => Some(pt),
            })
    }

    /// Row maximizing the two-parameter effective figure (first on ties).
    pub fn peak_effective(&self) -> Option<&BetaScanPoint<T>> {
        self.points
            .iter()
            .fold(None, |best: Option<&BetaScanPoint<T>>, pt| match best {
                Some(b) if pt.effective <= b.effective => Some(b),
                _ => Some(pt),
            })
    }
}

/// Scans `β/β_c` over `grid`, optimizing the encoding time at every
/// temperature.
///
/// Per row: resolve the moment route (`choice` with derivative-bearing
/// auto dispatch), compute the moment bundle, maximize the single-probe
/// quantum Fisher information over `t ∈ [0, 5/(λ√⟨n̂²⟩)]`, evaluate the
/// σ_x classical information at that same `t_opt`, and maximize the
/// two-parameter effective figure over its own time. Temperatures where the
/// objective is identically zero (e.g. closed-form `g`-derivatives in the
/// normal phase) produce a row of zeros rather than an error.
pub fn beta_scan<T: Real>(
    p: &DickeParams<T>,
    pp: &ProbeParams<T>,
    grid: &BetaGrid<T>,
    choice: MomentChoice,
    time_points: usize,
) -> Result<BetaScan<T>> {
    let beta_c = p.critical_beta()?;
    let points = grid
        .ratios()
        .into_par_iter()
        .map(|ratio| -> Result<BetaScanPoint<T>> {
            let p_b = p.with_beta(ratio * beta_c)?;
            let method = resolve_moment_method(&p_b, choice, true);
            let m = moment_derivatives(&p_b, method)?;
            let t_max = time_window(pp, &m)?;
            let quantum_opt =
                match maximize_over_time(|t| quantum_fi_g(pp, &m, t), t_max, time_points) {
                    Ok(opt) => opt,
                    Err(Error::FlatFunction) => TimeOptimum { t_opt: T::zero(), value: T::zero() },
                    Err(e) => return Err(e),
                };
            let effective_opt = match maximize_over_time(
                |t| fisher_matrix(pp, &m, t).effective(),
                t_max,
                time_points,
            ) {
                Ok(opt) => opt,
                Err(Error::FlatFunction) => TimeOptimum { t_opt: T::zero(), value: T::zero() },
                Err(e) => return Err(e),
            };
            Ok(BetaScanPoint {
                beta_ratio: ratio,
                beta: p_b.beta,
                t_opt: quantum_opt.t_opt,
                classical: classical_fi_g(pp, &m, quantum_opt.t_opt),
                quantum: quantum_opt.value,
                effective: effective_opt.value,
                method,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BetaScan { beta_c, points })
}

/// Which side of the transition a power-law fit addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Disordered side, `β/β_c < 1`: fits `F ∝ (β/β_c)^{+μ}`.
    Normal,
    /// Ordered side, `β/β_c > 1`: fits `F ∝ (β/β_c)^{−ν}`.
    Superradiant,
}

/// Least-squares power law through a window of scan rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit<T> {
    /// Branch the fit was taken on.
    pub branch: Branch,
    /// Positive exponent (`μ` on the normal side, `ν` on the ordered side).
    pub exponent: T,
    /// Prefactor `A` of `F ≈ A (β/β_c)^{±exponent}`.
    pub amplitude: T,
    /// Root-mean-square residual in `ln F`.
    pub rms_residual: T,
    /// Number of scan rows inside the window.
    pub points_used: usize,
    /// Ratio window actually used (inclusive).
    pub window: (T, T),
}

/// Fits `ln F` against `ln(β/β_c)` over the scan rows whose ratio falls in
/// `window` (inclusive, with a 1e-12 slack so grid landmarks are not lost to
/// rounding), on the quantum-information column.
///
/// The window must lie strictly inside the requested branch (`< 1` for
/// normal, `> 1` for superradiant); rows with non-positive information are
/// excluded. Fewer than three usable rows is [`Error::InsufficientPoints`].
pub fn fit_power_law<T: Real>(
    scan: &BetaScan<T>,
    branch: Branch,
    window: (T, T),
) -> Result<PowerLawFit<T>> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite()) || lo <= T::zero() || hi <= lo {
        return Err(Error::InvalidParams(format!("invalid fit window [{lo}, {hi}]")));
    }
    match branch {
        Branch::Normal if hi >= T::one() => {
            return Err(Error::InvalidParams(
                "normal-branch window must lie strictly below the transition".into(),
            ))
        }
        Branch::Superradiant if lo <= T::one() => {
            return Err(Error::InvalidParams(
                "superradiant-branch window must lie strictly above the transition".into(),
            ))
        }
        _ => {}
    }
    let slack = T::lit(1e-12);
    let data: Vec<(T, T)> = scan
        .points
        .iter()
        .filter(|pt| {
            pt.beta_ratio >= lo - slack && pt.beta_ratio <= hi + slack && pt.quantum > T::zero()
        })
        .map(|pt| (pt.beta_ratio.ln(), pt.quantum.ln()))
        .collect();
    if data.len() < 3 {
        return Err(Error::InsufficientPoints { got: data.len(), required: 3 });
    }
    let (slope, intercept, rms) = linear_least_squares(&data);
    let exponent = match branch {
        Branch::Normal => slope,
        Branch::Superradiant => -slope,
    };
    Ok(PowerLawFit {
        branch,
        exponent,
        amplitude: intercept.exp(),
        rms_residual: rms,
        points_used: data.len(),
        window,
    })
}

/// Ordinary least squares `y ≈ slope·x + intercept`; returns
/// `(slope, intercept, rms residual)`.
fn linear_least_squares<T: Real>(data: &[(T, T)]) -> (T, T, T) {
    let n = T::from_usize(data.len()).expect("point count fits any scalar");
    let mut sx = T::zero();
    let mut sy = T::zero();
    for &(x, y) in data {
        sx += x;
        sy += y;
    }
    let mx = sx / n;
    let my = sy / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for &(x, y) in data {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = T::zero();
    for &(x, y) in data {
        let r = y - slope * x - intercept;
        ss += r * r;
    }
    (slope, intercept, (ss / n).sqrt())
}

/// Fully optimized precision bound for one ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UltimatePrecision<T> {
    /// Optimal `β/β_c`.
    pub beta_ratio: T,
    /// Optimal inverse temperature.
    pub beta: T,
    /// Optimal encoding time.
    pub t_opt: T,
    /// Ensemble quantum Fisher information at the joint optimum.
    pub fi: T,
    /// Moment route used at the optimal temperature.
    pub method: MomentMethod,
}

/// Joint `(β, t)` optimization of the ensemble quantum Fisher information.
///
/// A temperature grid with per-point time optimization locates the global
/// maximum; a golden-section pass between the neighbouring grid points then
/// refines the temperature, and the refinement is kept only if it actually
/// improves on the sampled maximum — so discontinuous information peaks
/// (the derivative jump at `β_c`) are never refined away.
pub fn ultimate_precision<T: Real>(
    p: &DickeParams<T>,
    pp: &ProbeParams<T>,
    ensemble: &EnsembleSpec<T>,
    grid: &BetaGrid<T>,
    choice: MomentChoice,
    time_points: usize,
    werner_method: WernerMethod,
) -> Result<UltimatePrecision<T>> {
    if ensemble.kind == EnsembleKind::Werner {
        match ensemble.w {
            Some(w) if w >= T::zero() && w <= T::one() => {}
            _ => {
                return Err(Error::InvalidParams(
                    "Werner ensemble requires an admixture w in [0, 1]".into(),
                ))
            }
        }
    }
    let beta_c = p.critical_beta()?;
    let evaluate = |ratio: T| -> Result<(TimeOptimum<T>, MomentMethod)> {
        let p_b = p.with_beta(ratio * beta_c)?;
        let method = resolve_moment_method(&p_b, choice, true);
        let m = moment_derivatives(&p_b, method)?;
        let t_max = time_window(pp, &m)?;
        let opt = match maximize_over_time(
            |t| ensemble_fi_g(pp, &m, t, ensemble, werner_method).unwrap_or_else(|_| T::zero()),
            t_max,
            time_points,
        ) {
            Ok(opt) => opt,
            Err(Error::FlatFunction) => TimeOptimum { t_opt: T::zero(), value: T::zero() },
            Err(e) => return Err(e),
        };
        Ok((opt, method))
    };

    let ratios = grid.ratios();
    let coarse = ratios
        .par_iter()
        .map(|&ratio| evaluate(ratio).map(|(opt, method)| (ratio, opt, method)))
        .collect::<Result<Vec<_>>>()?;
    let mut best = coarse[0].clone();
    for row in &coarse[1..] {
        if row.1.value > best.1.value {
            best = row.clone();
        }
    }

    // Local temperature refinement between the neighbours of the coarse
    // winner; kept only on strict improvement.
    let idx = ratios.iter().position(|&r| r == best.0).unwrap_or(0);
    let lo = if idx == 0 { ratios[0] } else { ratios[idx - 1] };
    let hi = if idx + 1 >= ratios.len() { ratios[ratios.len() - 1] } else { ratios[idx + 1] };
    if hi > lo {
        let refined = golden_max(
            &|ratio: T| match evaluate(ratio) {
                Ok((opt, _)) => opt.value,
                Err(_) => T::zero(),
            },
            lo,
            hi,
            T::GOLDEN_TOL * (hi - lo),
        );
        if refined.value > best.1.value {
            let ratio = refined.t_opt;
            let (opt, method) = evaluate(ratio)?;
            best = (ratio, opt, method);
        }
    }

    let (ratio, opt, method) = best;
    Ok(UltimatePrecision {
        beta_ratio: ratio,
        beta: ratio * beta_c,
        t_opt: opt.t_opt,
        fi: opt.value,
        method,
    })
}

/// One probe-number point of a scaling run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint<T> {
    /// Probe count `ℕ`.
    pub n_probes: u32,
    /// Time-optimized ensemble quantum Fisher information.
    pub fi: T,
    /// Maximizing encoding time.
    pub t_opt: T,
}

/// Time-optimized ensemble information as a function of the probe count, at
/// the fixed temperature carried by `p`.
///
/// The moment bundle is computed once (it does not depend on `ℕ`); each
/// probe count is then optimized over the shared encoding-time window.
pub fn ensemble_scaling<T: Real>(
    p: &DickeParams<T>,
    pp: &ProbeParams<T>,
    kind: EnsembleKind,
    w: Option<T>,
    probe_counts: &[u32],
    choice: MomentChoice,
    time_points: usize,
    werner_method: WernerMethod,
) -> Result<Vec<ScalingPoint<T>>> {
    if probe_counts.is_empty() {
        return Err(Error::InvalidParams("scaling run needs at least one probe count".into()));
    }
    let method = resolve_moment_method(p, choice, true);
    let m = moment_derivatives(p, method)?;
    let t_max = time_window(pp, &m)?;
    probe_counts
        .par_iter()
        .map(|&n_probes| -> Result<ScalingPoint<T>> {
            let spec = match kind {
                EnsembleKind::Uncorrelated => EnsembleSpec::uncorrelated(n_probes)?,
                EnsembleKind::Ghz => EnsembleSpec::ghz(n_probes)?,
                EnsembleKind::Werner => EnsembleSpec::werner(
                    n_probes,
                    w.ok_or_else(|| {
                        Error::InvalidParams("Werner scaling requires an admixture w".into())
                    })?,
                )?,
            };
            let opt = maximize_over_time(
                |t| ensemble_fi_g(pp, &m, t, &spec, werner_method).unwrap_or_else(|_| T::zero()),
                t_max,
                time_points,
            )?;
            Ok(ScalingPoint { n_probes, fi: opt.value, t_opt: opt.t_opt })
        })
        .collect()
}

/// Through-origin linear fit `F(ℕ) ≈ slope·ℕ` of a scaling run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit<T> {
    /// Fitted information per probe.
    pub slope: T,
    /// Coefficient of determination about the data mean.
    pub r_squared: T,
    /// Number of points entering the fit.
    pub points_used: usize,
}

/// Fits `F = slope·ℕ` by least squares through the origin and reports `R²`
/// about the mean. Requires at least four points.
pub fn scaling_fit<T: Real>(points: &[ScalingPoint<T>]) -> Result<ScalingFit<T>> {
    if points.len() < 4 {
        return Err(Error::InsufficientPoints { got: points.len(), required: 4 });
    }
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    let mut sy = T::zero();
    for pt in points {
        let x = T::from_u32(pt.n_probes).expect("probe count fits any scalar");
        sxy += x * pt.fi;
        sxx += x * x;
        sy += pt.fi;
    }
    let slope = sxy / sxx;
    let mean = sy / T::from_usize(points.len()).expect("point count fits any scalar");
    let mut ss_res = T::zero();
    let mut ss_tot = T::zero();
    for pt in points {
        let x = T::from_u32(pt.n_probes).expect("probe count fits any scalar");
        let r = pt.fi - slope * x;
        ss_res += r * r;
        let d = pt.fi - mean;
        ss_tot += d * d;
    }
    let r_squared = if ss_tot > T::zero() { T::one() - ss_res / ss_tot } else { T::one() };
    Ok(ScalingFit { slope, r_squared, points_used: points.len() })
}
