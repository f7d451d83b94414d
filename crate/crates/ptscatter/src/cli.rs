//! Command-line interface: one entry point for reproducing every dataset.
//!
//! Subcommands: `sweep`, `atr`, `ssb`, `manifold` (parameterized runs),
//! `configs` and `figures` (canonical reproductions at reference
//! parameters), `verify` (the invariant suite). Physical inputs come either
//! from a strict-schema JSON file (`--config run.json`) or from individual
//! flags in display units (eV, μm).
//!
//! Exit codes: 0 success, 1 invalid input (bad flags, bad JSON, bad device
//! grammar, unreadable/unwritable paths), 2 numerical failure during
//! evaluation, 3 verification failure. Diagnostics go to standard error;
//! data goes to files under `--out` (or to standard output for `verify`).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::{atr_dataset, manifold_dataset, ssb_dataset, sweep_dataset, Dataset};
use crate::error::Error;
use crate::phase::{
    find_atrs, find_critical_energy, trace_ssb_manifold, MANIFOLD_DEFAULT_LENGTHS,
};
use crate::runconfig::parse_run_config;
use crate::scattering::PhysParams;
use crate::spinflip::DeviceConfig;
use crate::sweep::{
    params_metadata, reproduce_figures, reproduce_table1, run_sweep_with_workers, Figure,
    Outputs, SweepSpec,
};
use crate::verify::run_verify;

#[derive(Parser)]
#[command(
    name = "ptscatter",
    version,
    about = "Scattering from a PT-symmetric gain/loss bilayer wrapped by spin flippers",
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Sweep observables over an energy grid and write sweep.csv
    Sweep(RunArgs),
    /// Locate anisotropic transmission resonances and write atr.csv
    Atr(RunArgs),
    /// Locate symmetry-breaking crossings and write ssb.csv
    Ssb(RunArgs),
    /// Trace the critical-gain manifold over the standard lengths and write manifold.csv
    Manifold(RunArgs),
    /// Classify all sixteen device configurations and write table1.csv
    Configs(OutArgs),
    /// Rebuild a canonical figure dataset at the reference parameters
    Figures {
        /// Which figure dataset to rebuild
        #[arg(long, value_enum)]
        which: WhichFigure,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the full invariant suite; nonzero exit if any check fails
    Verify,
}

/// Physics and grid inputs shared by the parameterized subcommands.
#[derive(Args)]
pub struct RunArgs {
    /// JSON run-configuration file; replaces the individual physics flags
    #[arg(
        long,
        value_name = "FILE",
        conflicts_with_all = ["vr", "vi", "l", "mass", "emin", "emax", "n", "device"]
    )]
    pub config: Option<PathBuf>,
    /// Barrier height V_R in eV
    #[arg(long, value_name = "EV")]
    pub vr: Option<f64>,
    /// Gain/loss strength V_I in eV
    #[arg(long, value_name = "EV")]
    pub vi: Option<f64>,
    /// Total device length in micrometres
    #[arg(long, value_name = "UM")]
    pub l: Option<f64>,
    /// Effective-mass ratio m*/m_e [default: 1]
    #[arg(long, value_name = "RATIO")]
    pub mass: Option<f64>,
    /// Energy grid lower edge in eV
    #[arg(long, value_name = "EV")]
    pub emin: Option<f64>,
    /// Energy grid upper edge in eV
    #[arg(long, value_name = "EV")]
    pub emax: Option<f64>,
    /// Number of grid points [default: 4000; manifold: 60]
    #[arg(long, value_name = "N")]
    pub n: Option<usize>,
    /// Device configuration, e.g. M, L0M, L1MR2 [default: M]
    #[arg(long, value_name = "CONFIG")]
    pub device: Option<String>,
    /// Output directory, created if missing [default: . or the JSON out_dir]
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for grid evaluation
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub workers: usize,
}

/// Output directory for the canned reproductions.
#[derive(Args)]
pub struct OutArgs {
    /// Output directory, created if missing
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum WhichFigure {
    Fig2,
    Fig3,
    Fig4,
}

impl From<WhichFigure> for Figure {
    fn from(w: WhichFigure) -> Figure {
        match w {
            WhichFigure::Fig2 => Figure::Fig2,
            WhichFigure::Fig3 => Figure::Fig3,
            WhichFigure::Fig4 => Figure::Fig4,
        }
    }
}

/// Exit code for a library error: bad input versus numerical failure.
fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Grammar { .. } | Error::Schema { .. } | Error::InvalidSpec { .. } => 1,
        _ => 2,
    }
}

/// A failure carrying its process exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure {
            code: exit_code(&err),
            message: err.to_string(),
        }
    }
}

fn invalid(message: String) -> Failure {
    Failure { code: 1, message }
}

type CliResult = std::result::Result<(), Failure>;

/// Parse argv and dispatch; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap routes help to stdout and diagnostics to stderr itself.
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Atr(args) => cmd_atr(&args),
        Command::Ssb(args) => cmd_ssb(&args),
        Command::Manifold(args) => cmd_manifold(&args),
        Command::Configs(out) => cmd_configs(&out.out),
        Command::Figures { which, out } => cmd_figures(which.into(), &out.out),
        Command::Verify => return cmd_verify(),
    };
    match outcome {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("ptscatter: {}", failure.message);
            failure.code
        }
    }
}

/// Inputs resolved from either the JSON file or the individual flags.
struct Resolved {
    params: PhysParams,
    config: DeviceConfig,
    e_min: f64,
    e_max: f64,
    n_points: usize,
    out_dir: PathBuf,
}

impl RunArgs {
    fn resolve(&self, default_n: usize) -> std::result::Result<Resolved, Failure> {
        if self.workers == 0 {
            return Err(invalid("--workers must be at least 1".into()));
        }
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|err| invalid(format!("cannot read {}: {err}", path.display())))?;
            let rc = parse_run_config(&text)?;
            let spec = rc.to_sweep_spec()?;
            return Ok(Resolved {
                params: spec.params,
                config: spec.config,
                e_min: spec.e_min,
                e_max: spec.e_max,
                n_points: spec.n_points,
                out_dir: self.out.clone().unwrap_or_else(|| rc.out_dir.into()),
            });
        }
        let mut missing = Vec::new();
        for (flag, given) in [
            ("--vr", self.vr.is_some()),
            ("--vi", self.vi.is_some()),
            ("--l", self.l.is_some()),
            ("--emin", self.emin.is_some()),
            ("--emax", self.emax.is_some()),
        ] {
            if !given {
                missing.push(flag);
            }
        }
        if !missing.is_empty() {
            return Err(invalid(format!(
                "missing required flags: {} (or pass --config FILE)",
                missing.join(" ")
            )));
        }
        let params = PhysParams::new(
            self.vr.unwrap(),
            self.vi.unwrap(),
            self.l.unwrap(),
            self.mass.unwrap_or(1.0),
            1.0,
        )?;
        let config: DeviceConfig = self.device.as_deref().unwrap_or("M").parse()?;
        Ok(Resolved {
            params,
            config,
            e_min: self.emin.unwrap(),
            e_max: self.emax.unwrap(),
            n_points: self.n.unwrap_or(default_n),
            out_dir: self.out.clone().unwrap_or_else(|| PathBuf::from(".")),
        })
    }
}

/// Write one dataset under `dir`, reporting the path on standard error.
fn emit(dataset: &Dataset, dir: &Path) -> CliResult {
    std::fs::create_dir_all(dir)
        .map_err(|err| invalid(format!("cannot create {}: {err}", dir.display())))?;
    let path = dataset
        .write_to(dir)
        .map_err(|err| invalid(format!("cannot write under {}: {err}", dir.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn grid_metadata(kind: &str, n: usize, e_min: f64, e_max: f64) -> String {
    format!("{kind}: {n} points over [{e_min}, {e_max}) eV")
}

fn cmd_sweep(args: &RunArgs) -> CliResult {
    let r = args.resolve(4000)?;
    let spec = SweepSpec {
        params: r.params,
        config: r.config,
        e_min: r.e_min,
        e_max: r.e_max,
        n_points: r.n_points,
        outputs: Outputs::default(),
    };
    let records = run_sweep_with_workers(&spec, args.workers)?;
    let dataset = sweep_dataset(
        &records,
        vec![
            params_metadata(&r.params, r.config),
            grid_metadata("energy grid", r.n_points, r.e_min, r.e_max),
        ],
    );
    emit(&dataset, &r.out_dir)
}

fn cmd_atr(args: &RunArgs) -> CliResult {
    let r = args.resolve(4000)?;
    let events = find_atrs(&r.params, (r.e_min, r.e_max), r.n_points)?;
    if events.is_empty() {
        eprintln!("no transmission resonances in the search range");
    }
    let dataset = atr_dataset(
        &events,
        r.params.e0,
        vec![
            params_metadata(&r.params, r.config),
            grid_metadata("search grid", r.n_points, r.e_min, r.e_max),
        ],
    );
    emit(&dataset, &r.out_dir)
}

fn cmd_ssb(args: &RunArgs) -> CliResult {
    let r = args.resolve(4000)?;
    let crossings = find_critical_energy(&r.params, (r.e_min, r.e_max), r.n_points)?;
    if crossings.is_empty() {
        eprintln!("no symmetry-breaking crossing in the search range");
    }
    let dataset = ssb_dataset(
        &crossings,
        r.params.e0,
        vec![
            params_metadata(&r.params, r.config),
            grid_metadata("search grid", r.n_points, r.e_min, r.e_max),
        ],
    );
    emit(&dataset, &r.out_dir)
}

fn cmd_manifold(args: &RunArgs) -> CliResult {
    let r = args.resolve(60)?;
    let step = (r.e_max - r.e_min) / r.n_points as f64;
    let e_grid: Vec<f64> = (0..r.n_points)
        .map(|i| r.e_min + step * (i + 1) as f64)
        .collect();
    let curves = trace_ssb_manifold(&MANIFOLD_DEFAULT_LENGTHS, r.params.v_real, &e_grid, &r.params)?;
    let dataset = manifold_dataset(
        &curves,
        r.params.e0,
        vec![
            params_metadata(&r.params, r.config),
            format!(
                "energy grid: {} points over ({}, {}] eV; lengths {:?} um",
                r.n_points, r.e_min, r.e_max, MANIFOLD_DEFAULT_LENGTHS
            ),
        ],
    );
    emit(&dataset, &r.out_dir)
}

fn cmd_configs(out: &Path) -> CliResult {
    let report = reproduce_table1()?;
    let dataset = crate::dataset::table1_dataset(&report);
    emit(&dataset, out)
}

fn cmd_figures(which: Figure, out: &Path) -> CliResult {
    for dataset in reproduce_figures(which)? {
        emit(&dataset, out)?;
    }
    Ok(())
}

fn cmd_verify() -> i32 {
    let report = run_verify();
    for line in report.render_lines() {
        println!("{line}");
    }
    if report.all_passed() {
        eprintln!("all {} checks passed", report.outcomes.len());
        0
    } else {
        eprintln!("{} check(s) failed", report.failures().len());
        3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_flags_are_named() {
        let args = RunArgs {
            config: None,
            vr: Some(0.3),
            vi: None,
            l: None,
            mass: None,
            emin: None,
            emax: None,
            n: None,
            device: None,
            out: None,
            workers: 1,
        };
        let err = args.resolve(4000).err().expect("must fail");
        assert_eq!(err.code, 1);
        for flag in ["--vi", "--l", "--emin", "--emax"] {
            assert!(err.message.contains(flag), "{} missing from: {}", flag, err.message);
        }
        assert!(!err.message.contains("--vr"));
    }

    #[test]
    fn zero_workers_is_invalid_input() {
        let args = RunArgs {
            config: None,
            vr: Some(0.3),
            vi: Some(0.005),
            l: Some(0.5),
            mass: None,
            emin: Some(0.31),
            emax: Some(1.0),
            n: None,
            device: None,
            out: None,
            workers: 0,
        };
        assert_eq!(args.resolve(4000).err().expect("must fail").code, 1);
    }

    #[test]
    fn error_kinds_map_to_documented_exit_codes() {
        assert_eq!(exit_code(&Error::Grammar { input: "L3M".into() }), 1);
        assert_eq!(
            exit_code(&Error::Schema {
                message: "unknown field".into()
            }),
            1
        );
        assert_eq!(
            exit_code(&Error::InvalidSpec {
                message: "bad grid".into()
            }),
            1
        );
        assert_eq!(
            exit_code(&Error::NoConvergence {
                iterations: 100,
                residual: 1.0
            }),
            2
        );
        assert_eq!(
            exit_code(&Error::SingularDenominator {
                context: "slab",
                magnitude: 0.0
            }),
            2
        );
    }

    #[test]
    fn cli_declares_all_subcommands() {
        use clap::CommandFactory;
        let cmd = Cli::command();
        let names: Vec<&str> = cmd.get_subcommands().map(|s| s.get_name()).collect();
        for want in ["sweep", "atr", "ssb", "manifold", "configs", "figures", "verify"] {
            assert!(names.contains(&want), "missing subcommand {want}");
        }
    }
}
