//! Command-line front end: single-point reports, grid sweeps with CSV/JSON
//! output, and the self-check oracle battery.
//!
//! Exit codes: 0 success; 1 validation failure; 2 invalid configuration;
//! 3 unstable point (point command); 4 unwritable output.

mod config;
mod output;

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cavmag::sweep::{run_grid, run_point, GridResult, PointStatus};
use cavmag::validate::{run_battery, ValidateConfig};

use config::{load_config_file, AxisSpec, ParamOverrides, RunConfig};

const EXIT_VALIDATE_FAILED: u8 = 1;
const EXIT_BAD_CONFIG: u8 = 2;
const EXIT_UNSTABLE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "cavmag",
    version,
    about = "Steady-state entanglement and squeezing of a driven two-cavity/one-magnon system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the full pipeline at a single parameter point.
    Point(PointArgs),
    /// Scan a 1-D or 2-D parameter grid and write CSV plus a JSON summary.
    Sweep(SweepArgs),
    /// Run the independent-oracle battery and report pass/fail per oracle.
    Validate(ValidateArgs),
}

/// Physical parameters. Unset flags fall back to the config file, then to
/// the built-in defaults (the experimental working point).
#[derive(Args, Clone, Default)]
struct ParamFlags {
    /// Key=value config file; flags override it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Cavity-1 frequency omega1/2pi in GHz [default: 10]
    #[arg(long, value_name = "GHZ")]
    omega1: Option<f64>,
    /// Magnon linewidth kappa_m/2pi in MHz [default: 1]
    #[arg(long, value_name = "MHZ")]
    kappa_m: Option<f64>,
    /// Cavity-1 linewidth kappa1/2pi in MHz [default: 5]
    #[arg(long, value_name = "MHZ")]
    kappa1: Option<f64>,
    /// Cavity-2 linewidth kappa2/2pi in MHz [default: 5]
    #[arg(long, value_name = "MHZ")]
    kappa2: Option<f64>,
    /// Magnon/cavity-1 coupling g1/2pi in MHz [default: 20]
    #[arg(long, value_name = "MHZ")]
    g1: Option<f64>,
    /// Magnon/cavity-2 coupling g2/2pi in MHz [default: 20]
    #[arg(long, value_name = "MHZ")]
    g2: Option<f64>,
    /// Cavity-1 detuning in kappa_m units [default: -20]
    #[arg(long, value_name = "KM", allow_hyphen_values = true)]
    delta1: Option<f64>,
    /// Cavity-2 detuning in kappa_m units [default: 35]
    #[arg(long, value_name = "KM", allow_hyphen_values = true)]
    delta2: Option<f64>,
    /// Magnon detuning in kappa_m units [default: 45]
    #[arg(long, value_name = "KM", allow_hyphen_values = true)]
    delta_m: Option<f64>,
    /// Drive Rabi frequency in kappa_m units [default: 10]
    #[arg(long, value_name = "KM")]
    eps_p: Option<f64>,
    /// Parametric gain of the squeezed drive in kappa_m units [default: 2.5]
    #[arg(long, value_name = "KM")]
    gain: Option<f64>,
    /// Bath temperature in mK [default: 10]
    #[arg(long, value_name = "MK")]
    temperature: Option<f64>,
    /// YIG sphere diameter in micrometres [default: 250]
    #[arg(long, value_name = "UM")]
    sphere_diameter: Option<f64>,
    /// Spin density in m^-3 [default: 4.22e27]
    #[arg(long, value_name = "M3")]
    spin_density: Option<f64>,
    /// Spin quantum number [default: 2.5]
    #[arg(long, value_name = "S")]
    spin_number: Option<f64>,
}

impl ParamFlags {
    fn overrides(&self) -> ParamOverrides {
        ParamOverrides {
            omega1_ghz: self.omega1,
            kappa_m_mhz: self.kappa_m,
            kappa1_mhz: self.kappa1,
            kappa2_mhz: self.kappa2,
            g1_mhz: self.g1,
            g2_mhz: self.g2,
            delta1_km: self.delta1,
            delta2_km: self.delta2,
            delta_m_km: self.delta_m,
            eps_p_km: self.eps_p,
            gain_km: self.gain,
            temperature_mk: self.temperature,
            sphere_diameter_um: self.sphere_diameter,
            spin_density: self.spin_density,
            spin_number: self.spin_number,
        }
    }
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Print the full result as JSON instead of the aligned report.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Figure preset: fig2, fig3, fig4, fig5ab, fig5c, fig5d, fig6, fig7a, fig7b.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// First axis as param:min:max:count[:log].
    #[arg(long, value_name = "SPEC")]
    axis1: Option<AxisSpec>,
    /// Second axis (optional; omit for a 1-D sweep).
    #[arg(long, value_name = "SPEC")]
    axis2: Option<AxisSpec>,
    /// CSV output path [default: sweep.csv]
    #[arg(long, value_name = "PATH")]
    out_csv: Option<PathBuf>,
    /// JSON summary path [default: sweep_summary.json]
    #[arg(long, value_name = "PATH")]
    out_json: Option<PathBuf>,
    /// Worker threads for the scan (0 = all cores).
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Override every oracle tolerance with this value.
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,
    /// Random draws for the mean-field route comparison [default: 1000]
    #[arg(long, value_name = "N")]
    mean_field_draws: Option<usize>,
    /// Random draws for the Lyapunov-vs-integration comparison [default: 200]
    #[arg(long, value_name = "N")]
    lyapunov_draws: Option<usize>,
    /// RNG seed for the random ensembles.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
}

fn fail_config(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_BAD_CONFIG)
}

fn fail_io(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_IO)
}

fn resolve_config(flags: &ParamFlags, from_flags: RunConfig) -> Result<RunConfig, ExitCode> {
    let base = match &flags.config {
        Some(path) => load_config_file(path).map_err(fail_config)?,
        None => RunConfig::default(),
    };
    Ok(base.merged_with(from_flags))
}

fn cmd_point(args: &PointArgs) -> ExitCode {
    let cfg = match resolve_config(
        &args.params,
        RunConfig {
            params: args.params.overrides(),
            ..RunConfig::default()
        },
    ) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let params = cfg.params.to_params();
    if let Err(e) = params.validate() {
        return fail_config(e);
    }
    let result = run_point(&params);
    if args.json {
        match serde_json::to_string_pretty(&result) {
            Ok(s) => println!("{s}"),
            Err(e) => return fail_io(e),
        }
    } else {
        print!("{}", output::point_report(&result));
    }
    match result.status {
        PointStatus::Stable => ExitCode::SUCCESS,
        PointStatus::Unstable => ExitCode::from(EXIT_UNSTABLE),
        PointStatus::Failed(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_BAD_CONFIG)
        }
    }
}

#[derive(Serialize)]
struct SweepSummaryDoc<'a> {
    spec: &'a cavmag::sweep::GridSpec,
    summary: &'a cavmag::sweep::GridSummary,
}

fn write_outputs(grid: &GridResult, csv_path: &Path, json_path: &Path) -> Result<(), ExitCode> {
    let csv_file = std::fs::File::create(csv_path)
        .map_err(|e| fail_io(format!("cannot write {}: {e}", csv_path.display())))?;
    let mut w = BufWriter::new(csv_file);
    output::write_csv(&mut w, grid)
        .and_then(|()| w.flush())
        .map_err(|e| fail_io(format!("cannot write {}: {e}", csv_path.display())))?;

    let doc = SweepSummaryDoc {
        spec: &grid.spec,
        summary: &grid.summary,
    };
    let json_file = std::fs::File::create(json_path)
        .map_err(|e| fail_io(format!("cannot write {}: {e}", json_path.display())))?;
    let mut w = BufWriter::new(json_file);
    serde_json::to_writer_pretty(&mut w, &doc)
        .map_err(std::io::Error::other)
        .and_then(|()| {
            writeln!(w)?;
            w.flush()
        })
        .map_err(|e| fail_io(format!("cannot write {}: {e}", json_path.display())))?;
    Ok(())
}

fn run_grid_with_workers(
    spec: &cavmag::sweep::GridSpec,
    workers: usize,
) -> cavmag::Result<GridResult> {
    #[cfg(feature = "parallel")]
    if workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| cavmag::Error::InvalidGrid(format!("thread pool: {e}")))?;
        return pool.install(|| run_grid(spec));
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
    run_grid(spec)
}

fn cmd_sweep(args: &SweepArgs) -> ExitCode {
    let from_flags = RunConfig {
        params: args.params.overrides(),
        preset: args.preset.clone(),
        axis1: args.axis1.as_ref().map(|a| a.0),
        axis2: args.axis2.as_ref().map(|a| a.0),
        out_csv: args.out_csv.clone(),
        out_json: args.out_json.clone(),
        workers: args.workers,
    };
    let cfg = match resolve_config(&args.params, from_flags) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let spec = match cfg.to_grid_spec() {
        Ok(s) => s,
        Err(e) => return fail_config(e),
    };

    let grid = match run_grid_with_workers(&spec, cfg.workers.unwrap_or(0)) {
        Ok(g) => g,
        Err(e) => return fail_config(e),
    };

    let csv_path = cfg.out_csv.unwrap_or_else(|| PathBuf::from("sweep.csv"));
    let json_path = cfg
        .out_json
        .unwrap_or_else(|| PathBuf::from("sweep_summary.json"));
    if let Err(code) = write_outputs(&grid, &csv_path, &json_path) {
        return code;
    }

    let s = &grid.summary;
    println!(
        "{} points: {} stable, {} masked unstable, {} failed",
        s.total, s.stable, s.unstable, s.failed
    );
    for (name, arg) in [
        ("E_a1m", &s.e_a1m),
        ("E_a2m", &s.e_a2m),
        ("E_a1a2", &s.e_a1a2),
        ("R_tau_min", &s.r_tau_min),
        ("sq_x_dB", &s.sq_x_db),
        ("sq_y_dB", &s.sq_y_db),
        ("sq_Y2_dB", &s.sq_y2_db),
    ] {
        if let Some(a) = arg {
            let ax2 = a
                .axis2
                .map(|v| format!(", axis2 = {v:.4}"))
                .unwrap_or_default();
            println!("max {name} = {:.6} at axis1 = {:.4}{ax2}", a.value, a.axis1);
        }
    }
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    ExitCode::SUCCESS
}

fn cmd_validate(args: &ValidateArgs) -> ExitCode {
    let mut cfg = ValidateConfig::default();
    if let Some(n) = args.mean_field_draws {
        cfg.mean_field_draws = n;
    }
    if let Some(n) = args.lyapunov_draws {
        cfg.lyapunov_draws = n;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = args.tol {
        cfg.tol_tmsv = tol;
        cfg.tol_mean_field = tol;
        cfg.tol_lyapunov = tol;
        cfg.tol_passive = tol;
        cfg.tol_threshold = tol;
        cfg.tol_physicality = tol;
    }
    let reports = run_battery(&cfg);
    let mut all_passed = true;
    for r in &reports {
        println!(
            "{} {} — {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
        all_passed &= r.passed;
    }
    if all_passed {
        println!("all {} oracles passed", reports.len());
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VALIDATE_FAILED)
    }
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match &cli.command {
        Command::Point(args) => cmd_point(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Validate(args) => cmd_validate(args),
    }
}
