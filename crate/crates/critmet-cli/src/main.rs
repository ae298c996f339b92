//! `critmet`: CSV-emitting scans of the criticality-enhanced sensing
//! pipeline — ensemble thermodynamics, probe-dephasing Fisher information
//! dynamics, temperature scans with power-law fits, probe-count scaling,
//! and the two-parameter effective figure.
//!
//! Exit codes: 0 on success, 2 on configuration errors (including usage),
//! 3 on numerical failure. Output files are written once, at the end, and
//! any already-written file of a failing run is removed.

mod config;
mod plot;

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use config::{Overrides, RunConfig, Workload};
use critmet_core::dicke::{
    moment_derivatives, order_parameter_jz, photon_moment_closed, photon_moment_quadrature,
    resolve_moment_method, solve_order_parameter, MomentChoice, MomentMethod,
};
use critmet_core::fisher::{classical_fi_g, fisher_matrix, quantum_fi_g};
use critmet_core::optimize::{
    beta_scan, ensemble_scaling, fit_power_law, maximize_over_time, scaling_fit, time_window,
    BetaScan, BetaScanPoint, Branch,
};
use critmet_core::probe::EnsembleKind;
use plot::Series;

/// Error in the two CLI failure classes; each maps to a process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration (exit code 2).
    Config(String),
    /// Numerical or I/O failure during a valid run (exit code 3).
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

impl From<critmet_core::Error> for CliError {
    fn from(e: critmet_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "critmet",
    version,
    about = "Criticality-enhanced sensing scans: ensemble thermodynamics, probe dephasing, \
             and Fisher-information figures, emitted as CSV"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Flat `key = value` configuration file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV (and optional SVG) files
    #[arg(long)]
    out: Option<PathBuf>,
    /// Moment evaluation route
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Temperature as a fraction of the critical inverse temperature
    #[arg(long)]
    beta_ratio: Option<f64>,
    /// Also emit an SVG line plot next to each CSV
    #[arg(long)]
    plot: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    /// Saddle-point closed forms
    Closed,
    /// Finite-size quadrature
    Quadrature,
    /// Per-point automatic dispatch
    Auto,
}

impl From<MethodArg> for MomentChoice {
    fn from(arg: MethodArg) -> Self {
        match arg {
            MethodArg::Closed => MomentChoice::Closed,
            MethodArg::Quadrature => MomentChoice::Quadrature,
            MethodArg::Auto => MomentChoice::Auto,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MultiparamMode {
    /// Effective information versus encoding time at fixed temperature
    Dynamics,
    /// Time-optimized effective information across the transition
    Scan,
}

#[derive(Subcommand)]
enum Cmd {
    /// Temperature scan of the order parameter and photon moments
    Thermo(CommonArgs),
    /// Fisher-information dynamics in the encoding time at fixed temperature
    FiDynamics(CommonArgs),
    /// Time-optimized Fisher information across the transition, with
    /// power-law fits on both branches
    FiScan(CommonArgs),
    /// Ensemble Fisher information versus probe count, with linear fits
    Scaling(CommonArgs),
    /// Two-parameter effective Fisher information (determinant over trace)
    Multiparam {
        #[command(flatten)]
        common: CommonArgs,
        /// Dynamics at fixed temperature, or a temperature scan
        #[arg(long, value_enum, default_value_t = MultiparamMode::Scan)]
        mode: MultiparamMode,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(written) => {
            for path in written {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{err}");
            match err {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Runtime(_) => ExitCode::from(3),
            }
        }
    }
}

fn run(cli: Cli) -> CliResult<Vec<PathBuf>> {
    let (workload, common, mode) = match cli.command {
        Cmd::Thermo(c) => (Workload::Thermo, c, MultiparamMode::Scan),
        Cmd::FiDynamics(c) => (Workload::FiDynamics, c, MultiparamMode::Scan),
        Cmd::FiScan(c) => (Workload::FiScan, c, MultiparamMode::Scan),
        Cmd::Scaling(c) => (Workload::Scaling, c, MultiparamMode::Scan),
        Cmd::Multiparam { common, mode } => (Workload::Multiparam, common, mode),
    };

    let file_text = match &common.config {
        Some(path) => Some(fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config file {}: {e}", path.display()))
        })?),
        None => None,
    };
    let over = Overrides {
        out: common.out.clone(),
        method: common.method.map(MomentChoice::from),
        beta_ratio: common.beta_ratio,
        plot: common.plot,
    };
    let threads_env = std::env::var("CRITMET_THREADS").ok();
    let cfg = RunConfig::resolve(workload, file_text.as_deref(), &over, threads_env.as_deref())
        .map_err(CliError::Config)?;

    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("cannot size the thread pool: {e}")))?;
    }

    let outputs = match workload {
        Workload::Thermo => thermo(&cfg),
        Workload::FiDynamics => fi_dynamics(&cfg),
        Workload::FiScan => fi_scan(&cfg),
        Workload::Scaling => scaling(&cfg),
        Workload::Multiparam => multiparam(&cfg, mode),
    }?;
    write_outputs(&cfg, outputs)
}

/// Assembles a CSV document: reproducibility header, exactly one column
/// line, data rows, then any trailing `#` summary lines.
fn csv_document(cfg: &RunConfig, columns: &str, rows: &[String], footer: &[String]) -> String {
    let mut doc = cfg.echo_header();
    doc.push_str(columns);
    doc.push('\n');
    for row in rows {
        doc.push_str(row);
        doc.push('\n');
    }
    for line in footer {
        doc.push_str(line);
        doc.push('\n');
    }
    doc
}

/// Writes every output file, creating the output directory on demand. If a
/// write fails midway, the files already written by this run are removed so
/// no partial artifact survives.
fn write_outputs(cfg: &RunConfig, outputs: Vec<(String, String)>) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| {
        CliError::Runtime(format!(
            "cannot create output directory {}: {e}",
            cfg.out_dir.display()
        ))
    })?;
    let mut written: Vec<PathBuf> = Vec::new();
    for (name, content) in outputs {
        let path = cfg.out_dir.join(name);
        if let Err(e) = fs::write(&path, content) {
            let message = format!("cannot write {}: {e}", path.display());
            for w in &written {
                let _ = fs::remove_file(w);
            }
            return Err(CliError::Runtime(message));
        }
        written.push(path);
    }
    Ok(written)
}

/// Photon moments without derivatives, by the row's resolved route.
fn plain_moments(
    p: &critmet_core::dicke::DickeParams<f64>,
    method: MomentMethod,
) -> Result<(f64, f64), critmet_core::Error> {
    match method {
        MomentMethod::ClosedForm => {
            Ok((photon_moment_closed(p, 1)?, photon_moment_closed(p, 2)?))
        }
        MomentMethod::Quadrature | MomentMethod::FiniteDifference => {
            Ok((photon_moment_quadrature(p, 1)?, photon_moment_quadrature(p, 2)?))
        }
    }
}

fn thermo(cfg: &RunConfig) -> CliResult<Vec<(String, String)>> {
    struct Row {
        ratio: f64,
        z0: f64,
        j_z: f64,
        n_mean: f64,
        n2_mean: f64,
        method: MomentMethod,
    }

    let ratios = cfg.beta_grid.ratios();
    let rows = ratios
        .par_iter()
        .map(|&ratio| -> Result<Row, critmet_core::Error> {
            let p = cfg.dicke_at(ratio)?;
            let sol = solve_order_parameter(&p)?;
            let j_z = order_parameter_jz(&p)?;
            let method = resolve_moment_method(&p, cfg.method, false);
            let (n_mean, n2_mean) = plain_moments(&p, method)?;
            Ok(Row { ratio, z0: sol.z0, j_z, n_mean, n2_mean, method })
        })
        .collect::<Result<Vec<Row>, _>>()?;

    let lines: Vec<String> = rows
        .iter()
        .map(|r| {
            format!("{},{},{},{},{},{}", r.ratio, r.z0, r.j_z, r.n_mean, r.n2_mean, r.method.label())
        })
        .collect();
    let csv = csv_document(cfg, "beta_ratio,z0,j_z,n_mean,n2_mean,method", &lines, &[]);

    let mut outputs = vec![("thermo.csv".to_string(), csv)];
    if cfg.plot {
        let series = |label: &str, select: fn(&Row) -> f64| Series {
            label: label.to_string(),
            points: rows.iter().map(|r| (r.ratio, select(r))).collect(),
        };
        let svg = plot::line_plot(
            "order parameter and photon moments",
            "beta/beta_c",
            "value",
            &[
                series("z0", |r| r.z0),
                series("j_z", |r| r.j_z),
                series("n_mean", |r| r.n_mean),
                series("n2_mean", |r| r.n2_mean),
            ],
        );
        outputs.push(("thermo.svg".to_string(), svg));
    }
    Ok(outputs)
}

/// Uniform encoding-time grid over the information-bearing window.
fn time_axis(t_max: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| t_max * i as f64 / (points - 1) as f64)
        .collect()
}

fn fi_dynamics(cfg: &RunConfig) -> CliResult<Vec<(String, String)>> {
    let p = cfg.dicke_at(cfg.beta_ratio)?;
    let method = resolve_moment_method(&p, cfg.method, true);
    let m = moment_derivatives(&p, method)?;
    let t_max = time_window(&cfg.probe, &m)?;

    let rows: Vec<(f64, f64, f64)> = time_axis(t_max, cfg.time_points)
        .par_iter()
        .map(|&t| (t, classical_fi_g(&cfg.probe, &m, t), quantum_fi_g(&cfg.probe, &m, t)))
        .collect();

    let lines: Vec<String> =
        rows.iter().map(|(t, fc, fq)| format!("{t},{fc},{fq}")).collect();
    let footer = vec![format!("# moment method used: {}", m.method.label())];
    let csv = csv_document(cfg, "t,f_classical,f_quantum", &lines, &footer);

    let mut outputs = vec![("fi_dynamics.csv".to_string(), csv)];
    if cfg.plot {
        let svg = plot::line_plot(
            "Fisher information dynamics",
            "t",
            "Fisher information",
            &[
                Series {
                    label: "f_classical".into(),
                    points: rows.iter().map(|&(t, fc, _)| (t, fc)).collect(),
                },
                Series {
                    label: "f_quantum".into(),
                    points: rows.iter().map(|&(t, _, fq)| (t, fq)).collect(),
                },
            ],
        );
        outputs.push(("fi_dynamics.svg".to_string(), svg));
    }
    Ok(outputs)
}

fn fi_scan(cfg: &RunConfig) -> CliResult<Vec<(String, String)>> {
    let p = cfg.dicke_at(1.0)?;
    let scan = beta_scan(&p, &cfg.probe, &cfg.beta_grid, cfg.method, cfg.time_points)?;

    let lines: Vec<String> = scan
        .points
        .iter()
        .map(|pt| format!("{},{},{},{}", pt.beta_ratio, pt.t_opt, pt.classical, pt.quantum))
        .collect();

    let mut footer = Vec::new();
    let mut methods: Vec<&str> = scan.points.iter().map(|pt| pt.method.label()).collect();
    methods.dedup();
    footer.push(format!("# moment methods used: {}", methods.join(",")));
    footer.push(
        "# note: t_opt maximizes the quantum information; the classical column is evaluated \
         at that same time"
            .to_string(),
    );

    type Select = fn(&BetaScanPoint<f64>) -> f64;
    let curves: [(&str, Select); 2] =
        [("classical", |pt| pt.classical), ("quantum", |pt| pt.quantum)];
    let branches =
        [("normal", Branch::Normal, cfg.fit_normal), ("superradiant", Branch::Superradiant, cfg.fit_super)];
    for (curve_name, select) in curves {
        for (branch_name, branch, window) in branches {
            let remapped = BetaScan {
                beta_c: scan.beta_c,
                points: scan
                    .points
                    .iter()
                    .map(|pt| BetaScanPoint { quantum: select(pt), ..*pt })
                    .collect(),
            };
            let line = match fit_power_law(&remapped, branch, window) {
                Ok(fit) => format!(
                    "# fit curve={curve_name} branch={branch_name} window=[{},{}] \
                     exponent={} amplitude={} rms_residual={} points={}",
                    window.0, window.1, fit.exponent, fit.amplitude, fit.rms_residual,
                    fit.points_used
                ),
                Err(e) => format!(
                    "# fit curve={curve_name} branch={branch_name} window=[{},{}] failed: {e}",
                    window.0, window.1
                ),
            };
            footer.push(line);
        }
    }

    if let Some(peak) = scan.peak_quantum() {
        footer.push(format!(
            "# peak quantum: f_max_quantum={} at beta_ratio={} (t_opt={})",
            peak.quantum, peak.beta_ratio, peak.t_opt
        ));
        footer.push(format!(
            "# peak quantum/classical ratio = {}",
            peak.quantum / peak.classical
        ));
    }
    if let Some(peak) = scan
        .points
        .iter()
        .fold(None::<&BetaScanPoint<f64>>, |best, pt| match best {
            Some(b) if pt.classical <= b.classical => Some(b),
            _ => Some(pt),
        })
    {
        footer.push(format!(
            "# peak classical: f_max_classical={} at beta_ratio={}",
            peak.classical, peak.beta_ratio
        ));
    }

    let csv = csv_document(
        cfg,
        "beta_ratio,t_opt,f_max_classical,f_max_quantum",
        &lines,
        &footer,
    );

    let mut outputs = vec![("fi_scan.csv".to_string(), csv)];
    if cfg.plot {
        let svg = plot::line_plot(
            "time-optimized Fisher information across the transition",
            "beta/beta_c",
            "Fisher information",
            &[
                Series {
                    label: "f_max_classical".into(),
                    points: scan.points.iter().map(|pt| (pt.beta_ratio, pt.classical)).collect(),
                },
                Series {
                    label: "f_max_quantum".into(),
                    points: scan.points.iter().map(|pt| (pt.beta_ratio, pt.quantum)).collect(),
                },
            ],
        );
        outputs.push(("fi_scan.svg".to_string(), svg));
    }
    Ok(outputs)
}

fn scaling(cfg: &RunConfig) -> CliResult<Vec<(String, String)>> {
    let p = cfg.dicke_at(cfg.beta_ratio)?;
    let run = |kind: EnsembleKind, w: Option<f64>| {
        ensemble_scaling(
            &p,
            &cfg.probe,
            kind,
            w,
            &cfg.n_probes,
            cfg.method,
            cfg.time_points,
            cfg.werner_method,
        )
    };
    let unc = run(EnsembleKind::Uncorrelated, None)?;
    let werner = run(EnsembleKind::Werner, Some(cfg.w))?;
    let ghz = run(EnsembleKind::Ghz, None)?;

    let lines: Vec<String> = (0..cfg.n_probes.len())
        .map(|i| format!("{},{},{},{}", unc[i].n_probes, unc[i].fi, werner[i].fi, ghz[i].fi))
        .collect();

    let mut footer = Vec::new();
    for (name, points) in [("f_unc", &unc), ("f_werner", &werner), ("f_ghz", &ghz)] {
        let line = match scaling_fit(points) {
            Ok(fit) => format!(
                "# fit column={name} slope={} r_squared={} points={}",
                fit.slope, fit.r_squared, fit.points_used
            ),
            Err(e) => format!("# fit column={name} failed: {e}"),
        };
        footer.push(line);
    }

    let csv = csv_document(cfg, "n_probes,f_unc,f_werner,f_ghz", &lines, &footer);

    let mut outputs = vec![("scaling.csv".to_string(), csv)];
    if cfg.plot {
        let to_series = |label: &str, points: &[critmet_core::optimize::ScalingPoint<f64>]| Series {
            label: label.to_string(),
            points: points.iter().map(|pt| (f64::from(pt.n_probes), pt.fi)).collect(),
        };
        let svg = plot::line_plot(
            "ensemble information versus probe count",
            "n_probes",
            "Fisher information",
            &[to_series("f_unc", &unc), to_series("f_werner", &werner), to_series("f_ghz", &ghz)],
        );
        outputs.push(("scaling.svg".to_string(), svg));
    }
    Ok(outputs)
}

fn multiparam(cfg: &RunConfig, mode: MultiparamMode) -> CliResult<Vec<(String, String)>> {
    match mode {
        MultiparamMode::Dynamics => {
            let p = cfg.dicke_at(cfg.beta_ratio)?;
            let method = resolve_moment_method(&p, cfg.method, true);
            let m = moment_derivatives(&p, method)?;
            let t_max = time_window(&cfg.probe, &m)?;
            let rows: Vec<(f64, f64)> = time_axis(t_max, cfg.time_points)
                .par_iter()
                .map(|&t| (t, fisher_matrix(&cfg.probe, &m, t).effective()))
                .collect();
            let lines: Vec<String> = rows.iter().map(|(t, f)| format!("{t},{f}")).collect();
            let footer = vec![format!("# moment method used: {}", m.method.label())];
            let csv = csv_document(cfg, "t,f_eff", &lines, &footer);

            let mut outputs = vec![("multiparam_dynamics.csv".to_string(), csv)];
            if cfg.plot {
                let svg = plot::line_plot(
                    "effective two-parameter information dynamics",
                    "t",
                    "f_eff",
                    &[Series { label: "f_eff".into(), points: rows }],
                );
                outputs.push(("multiparam_dynamics.svg".to_string(), svg));
            }
            Ok(outputs)
        }
        MultiparamMode::Scan => {
            struct Row {
                ratio: f64,
                t_opt: f64,
                f_eff: f64,
                method: MomentMethod,
            }
            let rows = cfg
                .beta_grid
                .ratios()
                .par_iter()
                .map(|&ratio| -> Result<Row, critmet_core::Error> {
                    let p = cfg.dicke_at(ratio)?;
                    let method = resolve_moment_method(&p, cfg.method, true);
                    let m = moment_derivatives(&p, method)?;
                    let t_max = time_window(&cfg.probe, &m)?;
                    let objective = |t: f64| fisher_matrix(&cfg.probe, &m, t).effective();
                    match maximize_over_time(objective, t_max, cfg.time_points) {
                        Ok(opt) => Ok(Row { ratio, t_opt: opt.t_opt, f_eff: opt.value, method }),
                        // An identically zero figure (e.g. closed-form route
                        // in the disordered phase) is a zero row, not an
                        // error: scans must cross such regions.
                        Err(critmet_core::Error::FlatFunction) => {
                            Ok(Row { ratio, t_opt: 0.0, f_eff: 0.0, method })
                        }
                        Err(e) => Err(e),
                    }
                })
                .collect::<Result<Vec<Row>, _>>()?;

            let lines: Vec<String> =
                rows.iter().map(|r| format!("{},{},{}", r.ratio, r.t_opt, r.f_eff)).collect();
            let mut methods: Vec<&str> = rows.iter().map(|r| r.method.label()).collect();
            methods.dedup();
            let mut footer = vec![format!("# moment methods used: {}", methods.join(","))];
            if let Some(peak) = rows.iter().fold(None::<&Row>, |best, r| match best {
                Some(b) if r.f_eff <= b.f_eff => Some(b),
                _ => Some(r),
            }) {
                footer.push(format!(
                    "# peak: f_eff_max={} at beta_ratio={} (t_opt={})",
                    peak.f_eff, peak.ratio, peak.t_opt
                ));
            }
            let csv = csv_document(cfg, "beta_ratio,t_opt,f_eff_max", &lines, &footer);

            let mut outputs = vec![("multiparam_scan.csv".to_string(), csv)];
            if cfg.plot {
                let svg = plot::line_plot(
                    "time-optimized effective information across the transition",
                    "beta/beta_c",
                    "f_eff_max",
                    &[Series {
                        label: "f_eff_max".into(),
                        points: rows.iter().map(|r| (r.ratio, r.f_eff)).collect(),
                    }],
                );
                outputs.push(("multiparam_scan.svg".to_string(), svg));
            }
            Ok(outputs)
        }
    }
}
