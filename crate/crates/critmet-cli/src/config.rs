//! Run configuration: flat `key = value` file, command-line overrides, and
//! workload-aware defaults, resolved and validated before any computation.

use std::fmt::Write as _;
use std::path::PathBuf;

use critmet_core::dicke::{DickeParams, MomentChoice};
use critmet_core::fisher::WernerMethod;
use critmet_core::optimize::BetaGrid;
use critmet_core::probe::{effective_probe_params, ProbeParams};

/// Which subcommand the configuration is resolved for; fixes the
/// workload-specific defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workload {
    Thermo,
    FiDynamics,
    FiScan,
    Scaling,
    Multiparam,
}

impl Workload {
    pub fn name(self) -> &'static str {
        match self {
            Workload::Thermo => "thermo",
            Workload::FiDynamics => "fi-dynamics",
            Workload::FiScan => "fi-scan",
            Workload::Scaling => "scaling",
            Workload::Multiparam => "multiparam",
        }
    }

    /// Probe-count scaling runs default to a much weaker probe coupling, so
    /// entangled ensembles are resolved over the whole count range instead of
    /// saturating within the first few probes.
    fn default_lambda(self, epsilon: f64) -> f64 {
        match self {
            Workload::Scaling => 1e-3 * epsilon,
            _ => 0.1 * epsilon,
        }
    }
}

/// Values set on the command line, which override the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub method: Option<MomentChoice>,
    pub beta_ratio: Option<f64>,
    pub plot: bool,
}

/// Fully resolved, validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub workload: Workload,
    pub epsilon: f64,
    pub g: f64,
    pub omega: f64,
    pub n_atoms: u32,
    pub beta_ratio: f64,
    pub probe: ProbeParams<f64>,
    pub raw_probe: Option<(f64, f64, f64)>,
    pub method: MomentChoice,
    pub beta_grid: BetaGrid<f64>,
    pub time_points: usize,
    pub n_probes: Vec<u32>,
    pub w: f64,
    pub werner_method: WernerMethod,
    pub fit_normal: (f64, f64),
    pub fit_super: (f64, f64),
    pub out_dir: PathBuf,
    pub plot: bool,
    pub threads: Option<usize>,
    /// Critical inverse temperature of the resolved ensemble parameters.
    pub beta_c: f64,
}

/// Raw (pre-default) settings accumulated from the config file.
#[derive(Debug, Default)]
struct Settings {
    epsilon: Option<f64>,
    g: Option<f64>,
    omega: Option<f64>,
    n_atoms: Option<u32>,
    beta_ratio: Option<f64>,
    lambda: Option<f64>,
    omega_s: Option<f64>,
    omega_q: Option<f64>,
    g_qc: Option<f64>,
    delta_q: Option<f64>,
    method: Option<MomentChoice>,
    beta_start: Option<f64>,
    beta_end: Option<f64>,
    beta_points: Option<usize>,
    time_points: Option<usize>,
    n_probes: Option<Vec<u32>>,
    w: Option<f64>,
    werner_method: Option<WernerMethod>,
    fit_normal_lo: Option<f64>,
    fit_normal_hi: Option<f64>,
    fit_super_lo: Option<f64>,
    fit_super_hi: Option<f64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    plot: Option<bool>,
}

fn put<T>(slot: &mut Option<T>, value: T, key: &str, line: usize) -> Result<(), String> {
    if slot.is_some() {
        return Err(format!("duplicate key '{key}' on line {line}"));
    }
    *slot = Some(value);
    Ok(())
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64, String> {
    value
        .parse::<f64>()
        .map_err(|_| format!("key '{key}' on line {line}: '{value}' is not a number"))
}

fn parse_usize(key: &str, value: &str, line: usize) -> Result<usize, String> {
    value
        .parse::<usize>()
        .map_err(|_| format!("key '{key}' on line {line}: '{value}' is not a nonnegative integer"))
}

fn parse_u32(key: &str, value: &str, line: usize) -> Result<u32, String> {
    value
        .parse::<u32>()
        .map_err(|_| format!("key '{key}' on line {line}: '{value}' is not a nonnegative integer"))
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("key '{key}' on line {line}: expected true or false, got '{other}'")),
    }
}

pub fn parse_method(value: &str) -> Result<MomentChoice, String> {
    match value {
        "closed" => Ok(MomentChoice::Closed),
        "quadrature" => Ok(MomentChoice::Quadrature),
        "auto" => Ok(MomentChoice::Auto),
        other => Err(format!("unknown moment method '{other}' (closed|quadrature|auto)")),
    }
}

fn parse_werner_method(value: &str) -> Result<WernerMethod, String> {
    match value {
        "exact" => Ok(WernerMethod::Exact),
        "asymptotic" => Ok(WernerMethod::Asymptotic),
        other => Err(format!("unknown werner_method '{other}' (exact|asymptotic)")),
    }
}

fn parse_probe_counts(key: &str, value: &str, line: usize) -> Result<Vec<u32>, String> {
    let counts: Result<Vec<u32>, String> = value
        .split(',')
        .map(|item| parse_u32(key, item.trim(), line))
        .collect();
    let counts = counts?;
    if counts.is_empty() {
        return Err(format!("key '{key}' on line {line}: probe-count list is empty"));
    }
    Ok(counts)
}

fn method_label(method: MomentChoice) -> &'static str {
    match method {
        MomentChoice::Closed => "closed",
        MomentChoice::Quadrature => "quadrature",
        MomentChoice::Auto => "auto",
    }
}

fn werner_label(method: WernerMethod) -> &'static str {
    match method {
        WernerMethod::Exact => "exact",
        WernerMethod::Asymptotic => "asymptotic",
    }
}

/// Parses the flat config-file format: one `key = value` per line, `#`
/// comments, blank lines ignored. Unknown and duplicate keys are errors.
fn parse_file(text: &str) -> Result<Settings, String> {
    let mut s = Settings::default();
    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(format!("line {line}: expected 'key = value', got '{trimmed}'"));
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "epsilon" => put(&mut s.epsilon, parse_f64(key, value, line)?, key, line)?,
            "g" => put(&mut s.g, parse_f64(key, value, line)?, key, line)?,
            "omega" => put(&mut s.omega, parse_f64(key, value, line)?, key, line)?,
            "n_atoms" => put(&mut s.n_atoms, parse_u32(key, value, line)?, key, line)?,
            "beta_ratio" => put(&mut s.beta_ratio, parse_f64(key, value, line)?, key, line)?,
            "lambda" => put(&mut s.lambda, parse_f64(key, value, line)?, key, line)?,
            "omega_s" => put(&mut s.omega_s, parse_f64(key, value, line)?, key, line)?,
            "omega_q" => put(&mut s.omega_q, parse_f64(key, value, line)?, key, line)?,
            "g_qc" => put(&mut s.g_qc, parse_f64(key, value, line)?, key, line)?,
            "delta_q" => put(&mut s.delta_q, parse_f64(key, value, line)?, key, line)?,
            "method" => put(
                &mut s.method,
                parse_method(value).map_err(|e| format!("line {line}: {e}"))?,
                key,
                line,
            )?,
            "beta_start" => put(&mut s.beta_start, parse_f64(key, value, line)?, key, line)?,
            "beta_end" => put(&mut s.beta_end, parse_f64(key, value, line)?, key, line)?,
            "beta_points" => put(&mut s.beta_points, parse_usize(key, value, line)?, key, line)?,
            "time_points" => put(&mut s.time_points, parse_usize(key, value, line)?, key, line)?,
            "n_probes" => {
                put(&mut s.n_probes, parse_probe_counts(key, value, line)?, key, line)?
            }
            "w" => put(&mut s.w, parse_f64(key, value, line)?, key, line)?,
            "werner_method" => put(
                &mut s.werner_method,
                parse_werner_method(value).map_err(|e| format!("line {line}: {e}"))?,
                key,
                line,
            )?,
            "fit_normal_lo" => put(&mut s.fit_normal_lo, parse_f64(key, value, line)?, key, line)?,
            "fit_normal_hi" => put(&mut s.fit_normal_hi, parse_f64(key, value, line)?, key, line)?,
            "fit_super_lo" => put(&mut s.fit_super_lo, parse_f64(key, value, line)?, key, line)?,
            "fit_super_hi" => put(&mut s.fit_super_hi, parse_f64(key, value, line)?, key, line)?,
            "out" => put(&mut s.out, PathBuf::from(value), key, line)?,
            "threads" => put(&mut s.threads, parse_usize(key, value, line)?, key, line)?,
            "plot" => put(&mut s.plot, parse_bool(key, value, line)?, key, line)?,
            other => return Err(format!("unknown key '{other}' on line {line}")),
        }
    }
    Ok(s)
}

impl RunConfig {
    /// Resolves defaults, config file, command-line overrides, and the
    /// `CRITMET_THREADS` environment value (in increasing precedence) into a
    /// validated configuration.
    pub fn resolve(
        workload: Workload,
        file: Option<&str>,
        over: &Overrides,
        threads_env: Option<&str>,
    ) -> Result<Self, String> {
        let s = match file {
            Some(text) => parse_file(text)?,
            None => Settings::default(),
        };

        let epsilon = s.epsilon.unwrap_or(1.0);
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(format!("epsilon must be positive and finite, got {epsilon}"));
        }
        let g = s.g.unwrap_or(0.3 * epsilon);
        let omega = s
            .omega
            .unwrap_or_else(|| 4.0 * (0.5 * epsilon).tanh() * g * g / epsilon);
        let n_atoms = s.n_atoms.unwrap_or(50);
        let beta_ratio = over.beta_ratio.or(s.beta_ratio).unwrap_or(1.0);
        if !(beta_ratio.is_finite() && beta_ratio > 0.0) {
            return Err(format!("beta_ratio must be positive and finite, got {beta_ratio}"));
        }

        // Ensemble parameters must validate, with a transition, before any
        // computation starts.
        let base = DickeParams::new(epsilon, omega, g, n_atoms, 1.0)
            .map_err(|e| format!("invalid ensemble parameters: {e}"))?;
        let beta_c = base
            .critical_beta()
            .map_err(|e| format!("invalid ensemble parameters: {e}"))?;

        // Probe parameters: either direct (omega_s, lambda) or derived from
        // the dispersive precursors (omega_q, g_qc, delta_q) — not both.
        let raw_keys = [s.omega_q, s.g_qc, s.delta_q];
        let raw_count = raw_keys.iter().filter(|v| v.is_some()).count();
        let (probe, raw_probe) = if raw_count == 3 {
            if s.lambda.is_some() || s.omega_s.is_some() {
                return Err(
                    "set either omega_s/lambda or the dispersive trio omega_q/g_qc/delta_q, \
                     not both"
                        .into(),
                );
            }
            let (omega_q, g_qc, delta_q) =
                (s.omega_q.unwrap(), s.g_qc.unwrap(), s.delta_q.unwrap());
            let probe = effective_probe_params(omega_q, g_qc, delta_q, omega)
                .map_err(|e| format!("invalid dispersive probe parameters: {e}"))?;
            (probe, Some((omega_q, g_qc, delta_q)))
        } else if raw_count == 0 {
            let lambda = s.lambda.unwrap_or_else(|| workload.default_lambda(epsilon));
            let omega_s = s.omega_s.unwrap_or(1.5 * epsilon);
            let probe = ProbeParams::new(omega_s, lambda)
                .map_err(|e| format!("invalid probe parameters: {e}"))?;
            (probe, None)
        } else {
            return Err(
                "dispersive probe parameters need all three of omega_q, g_qc, delta_q".into()
            );
        };

        let method = over.method.or(s.method).unwrap_or(MomentChoice::Auto);

        let beta_start = s.beta_start.unwrap_or(0.5);
        let beta_end = s.beta_end.unwrap_or(1.5);
        let beta_points = s.beta_points.unwrap_or(101);
        let beta_grid = BetaGrid::new(beta_start, beta_end, beta_points)
            .map_err(|e| format!("invalid temperature grid: {e}"))?;

        let time_points = s.time_points.unwrap_or(400);
        if time_points < 2 {
            return Err(format!("time_points must be at least 2, got {time_points}"));
        }

        let n_probes = s.n_probes.unwrap_or_else(|| (1..=10).collect());
        if n_probes.iter().any(|&n| n == 0) {
            return Err("n_probes entries must be at least 1".into());
        }

        let w = s.w.unwrap_or(0.5);
        if !(0.0..=1.0).contains(&w) {
            return Err(format!("w must lie in [0, 1], got {w}"));
        }
        let werner_method = s.werner_method.unwrap_or(WernerMethod::Exact);

        let fit_normal = (s.fit_normal_lo.unwrap_or(0.75), s.fit_normal_hi.unwrap_or(0.95));
        let fit_super = (s.fit_super_lo.unwrap_or(1.01), s.fit_super_hi.unwrap_or(1.10));
        if !(fit_normal.0 > 0.0 && fit_normal.0 < fit_normal.1 && fit_normal.1 < 1.0) {
            return Err(format!(
                "fit_normal window [{}, {}] must satisfy 0 < lo < hi < 1",
                fit_normal.0, fit_normal.1
            ));
        }
        if !(fit_super.0 > 1.0 && fit_super.0 < fit_super.1 && fit_super.1.is_finite()) {
            return Err(format!(
                "fit_super window [{}, {}] must satisfy 1 < lo < hi",
                fit_super.0, fit_super.1
            ));
        }

        let out_dir = over.out.clone().or(s.out).unwrap_or_else(|| PathBuf::from("."));
        let plot = over.plot || s.plot.unwrap_or(false);

        let threads = match threads_env {
            Some(text) => Some(
                text.parse::<usize>()
                    .ok()
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| {
                        format!("CRITMET_THREADS must be a positive integer, got '{text}'")
                    })?,
            ),
            None => s.threads,
        };
        if threads == Some(0) {
            return Err("threads must be at least 1".into());
        }

        Ok(RunConfig {
            workload,
            epsilon,
            g,
            omega,
            n_atoms,
            beta_ratio,
            probe,
            raw_probe,
            method,
            beta_grid,
            time_points,
            n_probes,
            w,
            werner_method,
            fit_normal,
            fit_super,
            out_dir,
            plot,
            threads,
            beta_c,
        })
    }

    /// Ensemble parameters at inverse temperature `ratio · β_c`.
    pub fn dicke_at(&self, ratio: f64) -> Result<DickeParams<f64>, critmet_core::Error> {
        DickeParams::new(self.epsilon, self.omega, self.g, self.n_atoms, ratio * self.beta_c)
    }

    /// The `#`-prefixed reproducibility header embedded in every CSV: the
    /// full resolved configuration in a fixed order, derived landmarks, any
    /// validity warnings, and the unit conventions.
    pub fn echo_header(&self) -> String {
        let mut h = String::new();
        let _ = writeln!(h, "# critmet {}", self.workload.name());
        let _ = writeln!(h, "# config (resolved):");
        let _ = writeln!(h, "#   epsilon = {}", self.epsilon);
        let _ = writeln!(h, "#   g = {}", self.g);
        let _ = writeln!(h, "#   omega = {}", self.omega);
        let _ = writeln!(h, "#   n_atoms = {}", self.n_atoms);
        let _ = writeln!(h, "#   beta_ratio = {}", self.beta_ratio);
        if let Some((omega_q, g_qc, delta_q)) = self.raw_probe {
            let _ = writeln!(h, "#   omega_q = {omega_q}");
            let _ = writeln!(h, "#   g_qc = {g_qc}");
            let _ = writeln!(h, "#   delta_q = {delta_q}");
        }
        let _ = writeln!(h, "#   lambda = {}", self.probe.lambda);
        let _ = writeln!(h, "#   omega_s = {}", self.probe.omega_s);
        let _ = writeln!(h, "#   method = {}", method_label(self.method));
        let _ = writeln!(h, "#   beta_start = {}", self.beta_grid.start_ratio);
        let _ = writeln!(h, "#   beta_end = {}", self.beta_grid.end_ratio);
        let _ = writeln!(h, "#   beta_points = {}", self.beta_grid.points);
        let _ = writeln!(h, "#   time_points = {}", self.time_points);
        let counts: Vec<String> = self.n_probes.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(h, "#   n_probes = {}", counts.join(","));
        let _ = writeln!(h, "#   w = {}", self.w);
        let _ = writeln!(h, "#   werner_method = {}", werner_label(self.werner_method));
        let _ = writeln!(h, "#   fit_normal_lo = {}", self.fit_normal.0);
        let _ = writeln!(h, "#   fit_normal_hi = {}", self.fit_normal.1);
        let _ = writeln!(h, "#   fit_super_lo = {}", self.fit_super.0);
        let _ = writeln!(h, "#   fit_super_hi = {}", self.fit_super.1);
        let _ = writeln!(h, "#   out = {}", self.out_dir.display());
        match self.threads {
            Some(n) => {
                let _ = writeln!(h, "#   threads = {n}");
            }
            None => {
                let _ = writeln!(h, "#   threads = auto");
            }
        }
        let _ = writeln!(h, "#   plot = {}", self.plot);
        let _ = writeln!(h, "# derived: beta_c = {}", self.beta_c);
        if self.probe.weak_coupling_warning {
            let _ = writeln!(
                h,
                "# warning: lambda/omega_s > 0.2; the weak-coupling decoherence factor is \
                 indicative only in this regime"
            );
        }
        if self.probe.dispersive_warning {
            let _ = writeln!(
                h,
                "# warning: dispersive reduction is strained (chi > 0.2 or delta_q/g_qc < 5)"
            );
        }
        let _ = writeln!(
            h,
            "# units: frequencies and couplings in units of epsilon; time in 1/epsilon; \
             Fisher information in inverse squared units of the estimated parameter"
        );
        h
    }
}
