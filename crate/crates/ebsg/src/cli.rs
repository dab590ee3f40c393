//! Command-line front end.
//!
//! Three subcommands:
//!
//! - `solve --config <path> [--out-dir <path>]` — integrate one configured
//!   run, write a knot-profile CSV per snapshot, and print a one-line summary.
//! - `table <2|3|4> [--tolerance-scale <f>]` — recompute a published
//!   benchmark table row by row, printing computed beside published values;
//!   exits with code 3 when any row misses its tolerance.
//! - `sweep-p --config <path> --min <f> --max <f> --count <n>` — rerun the
//!   configured problem over a log-spaced grid of tension values and report
//!   the best one.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! failure, 3 benchmark tolerance failure.

use crate::basis::Mesh;
use crate::config::{ConfigError, RunConfig};
use crate::problems::{
    courant_number, linf_error, peak_concentration, tables, AdvectedGaussian, DiffusingPulse,
};
use crate::solver::{run, run_batch, Discretization, RunOutput, RunRequest, SolverError};
use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Errors surfaced to the user, each with a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed invocation (bad flags, arguments, or option values).
    #[error("{0}")]
    Usage(String),
    /// The configuration file could not be read.
    #[error("cannot read {path}: {source}")]
    Io {
        /// Offending path.
        path: PathBuf,
        /// Underlying I/O error.
        #[source]
        source: std::io::Error,
    },
    /// The configuration file is invalid.
    #[error("configuration error in {path}: {source}")]
    Config {
        /// Offending path.
        path: PathBuf,
        /// Underlying configuration error.
        #[source]
        source: ConfigError,
    },
    /// The solver rejected the run or failed numerically.
    #[error("numerical failure: {0}")]
    Solver(#[from] SolverError),
    /// A benchmark table row exceeded its tolerance.
    #[error("table {table}: {failed} of {total} rows outside tolerance")]
    ToleranceExceeded {
        /// Which table was checked.
        table: u8,
        /// Rows outside tolerance.
        failed: usize,
        /// Total rows checked.
        total: usize,
    },
}

impl CliError {
    /// The process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Config { .. } => 1,
            CliError::Solver(_) => 2,
            CliError::ToleranceExceeded { .. } => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ebsg",
    version,
    about = "Exponential B-spline Galerkin solver for the 1-D advection-diffusion equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configured run and write knot-profile CSV files.
    Solve {
        /// Path to a flat `key = value` configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Directory for the profile CSV files (created if missing).
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Recompute a published benchmark table and check every row.
    Table {
        /// Which table: 2 (advection peaks), 3 (advection errors), 4 (pulse errors).
        #[arg(value_parser = clap::value_parser!(u8).range(2..=4))]
        table: u8,
        /// Multiplier on the per-table tolerance (0.02 absolute for table 2,
        /// 15% relative for tables 3 and 4).
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
    /// Sweep the tension parameter over a log-spaced grid and report the
    /// value with the smallest final error.
    SweepP {
        /// Path to a flat `key = value` configuration file (its `p` is
        /// replaced by each sweep sample).
        #[arg(long)]
        config: PathBuf,
        /// Smallest tension sample (> 0).
        #[arg(long)]
        min: f64,
        /// Largest tension sample (≥ min).
        #[arg(long)]
        max: f64,
        /// Number of samples (≥ 1).
        #[arg(long)]
        count: usize,
    },
}

/// Parses `args` (including the program name) and executes the selected
/// command. `--help`/`--version` print and return success.
pub fn run_cli<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            return Err(CliError::Usage(e.render().to_string()));
        }
    };
    match cli.command {
        Command::Solve { config, out_dir } => cmd_solve(&config, &out_dir),
        Command::Table {
            table,
            tolerance_scale,
        } => cmd_table(table, tolerance_scale),
        Command::SweepP {
            config,
            min,
            max,
            count,
        } => cmd_sweep_p(&config, min, max, count),
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    RunConfig::parse(&text).map_err(|source| CliError::Config {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes one snapshot as `profile_t{time}.csv` with LF line endings and
/// shortest round-trip number formatting; output is byte-deterministic for a
/// given run.
fn write_profile(
    dir: &Path,
    mesh: &Mesh,
    time: f64,
    nodal: &[f64],
    exact: &(dyn Fn(f64, f64) -> f64 + Send + Sync),
) -> Result<PathBuf, CliError> {
    let mut csv = String::with_capacity(32 * nodal.len());
    csv.push_str("x,numeric,exact,abs_error\n");
    for (j, value) in nodal.iter().enumerate() {
        let x = mesh.knot(j as i64);
        let reference = exact(x, time);
        writeln!(csv, "{x},{value},{reference},{}", (value - reference).abs()).unwrap();
    }
    let path = dir.join(format!("profile_t{time}.csv"));
    std::fs::write(&path, csv).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn cmd_solve(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let cfg = load_config(config_path)?;
    let resolved = cfg.resolve();
    let start = std::time::Instant::now();
    let output = run(&resolved.spec, &resolved.disc, cfg.t_final, &cfg.snapshots)?;
    let runtime = start.elapsed().as_secs_f64();

    let mesh =
        Mesh::new(resolved.domain.0, resolved.domain.1, cfg.n).expect("run succeeded on this mesh");
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    for snap in &output.snapshots {
        write_profile(
            out_dir,
            &mesh,
            snap.time,
            &snap.nodal,
            resolved.exact.as_ref(),
        )?;
    }

    let last = output.final_snapshot();
    let linf = linf_error(&mesh, &last.nodal, |x| (resolved.exact)(x, last.time));
    let (peak, peak_x) = peak_concentration(&mesh, &last.nodal);
    let cr = courant_number(resolved.spec.velocity, cfg.dt, mesh.h());
    println!(
        "Cr={cr} h={} dt={} p={} Linf={linf} peak={peak} peak_x={peak_x} runtime_s={runtime:.3}",
        mesh.h(),
        cfg.dt,
        cfg.p
    );
    Ok(())
}

/// Runs the rows of one benchmark table (concurrently when the `parallel`
/// feature is on) and returns the outputs in row order.
fn run_rows(requests: Vec<RunRequest>) -> Result<Vec<RunOutput>, CliError> {
    run_batch(&requests)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::from)
}

fn cmd_table(table: u8, tolerance_scale: f64) -> Result<(), CliError> {
    if !(tolerance_scale.is_finite() && tolerance_scale > 0.0) {
        return Err(CliError::Usage(format!(
            "--tolerance-scale must be positive and finite, got {tolerance_scale}"
        )));
    }
    let mut report = String::new();
    let (failed, total) = match table {
        2 => {
            let prob = AdvectedGaussian::default();
            let spec = prob.problem_spec();
            let tol = 0.02 * tolerance_scale;
            let requests: Vec<RunRequest> = tables::PEAK_ROWS
                .iter()
                .map(|row| RunRequest {
                    spec: spec.clone(),
                    disc: row.discretization(),
                    t_final: tables::ADVECTION_TIME,
                    snapshot_times: Vec::new(),
                })
                .collect();
            let outputs = run_rows(requests)?;
            let mut failed = 0;
            for (row, out) in tables::PEAK_ROWS.iter().zip(&outputs) {
                let mesh = Mesh::new(prob.domain.0, prob.domain.1, row.elements).unwrap();
                let (peak, _) = peak_concentration(&mesh, &out.final_snapshot().nodal);
                let deviation = (peak - row.published_peak).abs();
                let ok = deviation <= tol;
                failed += usize::from(!ok);
                writeln!(
                    report,
                    "Cr={} n={} p={} computed_peak={peak} published_peak={} deviation={deviation} tolerance={tol} status={}",
                    row.courant,
                    row.elements,
                    row.tension,
                    row.published_peak,
                    if ok { "ok" } else { "over" }
                )
                .unwrap();
            }
            (failed, tables::PEAK_ROWS.len())
        }
        3 => {
            let prob = AdvectedGaussian::default();
            let spec = prob.problem_spec();
            let tol = 0.15 * tolerance_scale;
            let requests: Vec<RunRequest> = tables::ADVECTION_ERROR_ROWS
                .iter()
                .map(|row| RunRequest {
                    spec: spec.clone(),
                    disc: row.discretization(),
                    t_final: tables::ADVECTION_TIME,
                    snapshot_times: Vec::new(),
                })
                .collect();
            let outputs = run_rows(requests)?;
            let mut failed = 0;
            for (row, out) in tables::ADVECTION_ERROR_ROWS.iter().zip(&outputs) {
                let mesh = Mesh::new(prob.domain.0, prob.domain.1, row.elements).unwrap();
                let linf = linf_error(&mesh, &out.final_snapshot().nodal, |x| {
                    prob.exact(x, tables::ADVECTION_TIME)
                });
                let rel = (linf - row.published_linf).abs() / row.published_linf;
                let ok = rel <= tol;
                failed += usize::from(!ok);
                writeln!(
                    report,
                    "Cr={} n={} dt={} p={} computed_linf={linf} published_linf={} rel_deviation={rel} tolerance={tol} status={}",
                    row.courant,
                    row.elements,
                    row.dt,
                    row.tension,
                    row.published_linf,
                    if ok { "ok" } else { "over" }
                )
                .unwrap();
            }
            (failed, tables::ADVECTION_ERROR_ROWS.len())
        }
        4 => {
            let prob = DiffusingPulse::default();
            let spec = prob.problem_spec();
            let tol = 0.15 * tolerance_scale;
            let requests: Vec<RunRequest> = tables::PULSE_ERROR_ROWS
                .iter()
                .map(|row| RunRequest {
                    spec: spec.clone(),
                    disc: row.discretization(),
                    t_final: tables::PULSE_TIME,
                    snapshot_times: Vec::new(),
                })
                .collect();
            let outputs = run_rows(requests)?;
            let mut failed = 0;
            for (row, out) in tables::PULSE_ERROR_ROWS.iter().zip(&outputs) {
                let mesh = Mesh::new(prob.domain.0, prob.domain.1, row.elements).unwrap();
                let linf = linf_error(&mesh, &out.final_snapshot().nodal, |x| {
                    prob.exact(x, tables::PULSE_TIME)
                });
                let rel = (linf - row.published_linf).abs() / row.published_linf;
                let ok = rel <= tol;
                failed += usize::from(!ok);
                writeln!(
                    report,
                    "Cr={} n={} p={} computed_linf={linf} published_linf={} rel_deviation={rel} tolerance={tol} status={}",
                    row.courant,
                    row.elements,
                    tables::PULSE_TENSION,
                    row.published_linf,
                    if ok { "ok" } else { "over" }
                )
                .unwrap();
            }
            (failed, tables::PULSE_ERROR_ROWS.len())
        }
        _ => unreachable!("clap restricts the table number to 2..=4"),
    };
    write!(
        report,
        "table={table} rows_within_tolerance={}/{total}",
        total - failed
    )
    .unwrap();
    println!("{report}");
    if failed > 0 {
        return Err(CliError::ToleranceExceeded {
            table,
            failed,
            total,
        });
    }
    Ok(())
}

/// `count` log-uniformly spaced values covering `[min, max]`; a single sample
/// sits at `min`.
fn log_spaced(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    let ratio = max / min;
    (0..count)
        .map(|i| min * ratio.powf(i as f64 / (count - 1) as f64))
        .collect()
}

fn cmd_sweep_p(config_path: &Path, min: f64, max: f64, count: usize) -> Result<(), CliError> {
    if !(min.is_finite() && min > 0.0) {
        return Err(CliError::Usage(format!(
            "--min must be positive, got {min}"
        )));
    }
    if !(max.is_finite() && max >= min) {
        return Err(CliError::Usage(format!(
            "--max must be at least --min ({min}), got {max}"
        )));
    }
    if count == 0 {
        return Err(CliError::Usage("--count must be at least 1".to_string()));
    }
    let cfg = load_config(config_path)?;
    let resolved = cfg.resolve();
    let samples = log_spaced(min, max, count);
    let requests: Vec<RunRequest> = samples
        .iter()
        .map(|&p| RunRequest {
            spec: resolved.spec.clone(),
            disc: Discretization { p, ..resolved.disc },
            t_final: cfg.t_final,
            snapshot_times: Vec::new(),
        })
        .collect();
    let outputs = run_rows(requests)?;
    let mesh = Mesh::new(resolved.domain.0, resolved.domain.1, cfg.n)
        .expect("runs succeeded on this mesh");
    let mut table = String::from("p,Linf\n");
    let mut best: Option<(f64, f64)> = None;
    for (p, out) in samples.iter().zip(&outputs) {
        let last = out.final_snapshot();
        let linf = linf_error(&mesh, &last.nodal, |x| (resolved.exact)(x, last.time));
        writeln!(table, "{p},{linf}").unwrap();
        if best.is_none_or(|(_, b)| linf < b) {
            best = Some((*p, linf));
        }
    }
    let (best_p, best_linf) = best.expect("at least one sample");
    write!(table, "best_p={best_p} Linf={best_linf}").unwrap();
    println!("{table}");
    Ok(())
}
