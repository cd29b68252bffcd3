//! The subcommands. Each returns the files it wrote so that callers and tests
//! can inspect them.

use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use preytaxis_core::analysis::{self, SweepRow};
use preytaxis_core::bifurcation;
use preytaxis_core::solver::{self, Grid, Termination};
use preytaxis_core::stability;
use preytaxis_core::Error as MathError;
use thiserror::Error;

use crate::config::{ConfigError, LengthRange, RunConfig};
use crate::output;

/// Exit status of a successful command.
pub const EXIT_OK: i32 = 0;
/// Usage or configuration error.
pub const EXIT_CONFIG: i32 = 2;
/// The mathematics is undefined for the given parameters.
pub const EXIT_MATH: i32 = 3;
/// A runtime guard stopped a simulation.
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Math(MathError),
    #[error("{0}")]
    Runtime(String),
    #[error("writing {path}: {msg}")]
    Io { path: PathBuf, msg: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Math(_) => EXIT_MATH,
            CliError::Runtime(_) | CliError::Io { .. } => EXIT_RUNTIME,
        }
    }
}

impl From<MathError> for CliError {
    fn from(e: MathError) -> Self {
        match e {
            MathError::NonPositiveParameter(_)
            | MathError::NonFiniteParameter(_)
            | MathError::ZeroMode
            | MathError::InvalidConfig(_)
            | MathError::KmaxTooLarge { .. }
            | MathError::AmplitudeTooLarge => CliError::Usage(e.to_string()),
            MathError::NonFiniteState { .. } | MathError::BlowupGuard { .. } | MathError::StepSizeUnderflow { .. } => {
                CliError::Runtime(e.to_string())
            }
            _ => CliError::Math(e),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io { path: path.to_path_buf(), msg: e.to_string() }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Io { path: path.to_path_buf(), msg: e.to_string() }
}

fn open(out: &Path, name: &str) -> Result<(PathBuf, csv::Writer<std::io::BufWriter<fs::File>>), CliError> {
    output::create(out, name).map_err(|e| CliError::Io { path: out.join(name), msg: e.to_string() })
}

fn checked(cfg: &RunConfig) -> Result<preytaxis_core::Parameters, CliError> {
    Ok(cfg.parameters.validate()?)
}

fn kmax_of(cfg: &RunConfig, p: &preytaxis_core::Parameters) -> Result<u32, CliError> {
    match cfg.kmax {
        Some(k) => Ok(k),
        None => Ok(stability::tail_kmax(p, &cfg.sensitivity)?),
    }
}

pub fn thresholds(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let p = checked(cfg)?;
    let kmax = kmax_of(cfg, &p)?;
    let table = stability::chi_zero(&p, &cfg.sensitivity, kmax)?;
    let (path, mut w) = open(out, &format!("{}_thresholds.csv", cfg.scenario))?;
    output::write_thresholds(&mut w, &table).map_err(csv_err(&path))?;
    println!(
        "chi0 = {} at k = {} ({})",
        output::sig(table.chi0, output::TABLE_DIGITS),
        table.k_star,
        table.kind
    );
    Ok(vec![path])
}

/// Work is split across threads by length; rows come back in length order.
pub fn sweep(cfg: &RunConfig, range: Option<LengthRange>, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    checked(cfg)?;
    let range = range
        .or(cfg.lengths)
        .ok_or_else(|| CliError::Usage("sweep needs --L A:B or analysis.lengths".into()))?;
    let lengths = range.lengths();
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(lengths.len());
    let chunk = lengths.len().div_ceil(workers);
    let results: Vec<Result<SweepRow, MathError>> = thread::scope(|scope| {
        let handles: Vec<_> = lengths
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&l| analysis::sweep_row(&cfg.parameters, &cfg.sensitivity, l, cfg.kmax))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let (path, mut w) = open(out, &format!("{}_sweep.csv", cfg.scenario))?;
    output::write_sweep(&mut w, &rows).map_err(csv_err(&path))?;
    Ok(vec![path])
}

/// Pitchfork coefficient of mode `k` (default: the critical mode) and the
/// branch verdicts.
pub fn k2(cfg: &RunConfig, k: Option<u32>, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let p = checked(cfg)?;
    let s = &cfg.sensitivity;
    let kmax = kmax_of(cfg, &p)?;
    let k = match k {
        Some(0) => return Err(CliError::Usage("--k must be at least 1".into())),
        Some(k) => k,
        None => stability::chi_zero(&p, s, kmax)?.k_star,
    };
    let result = bifurcation::compute_k2(&p, s, k)?;
    let verdicts = bifurcation::branch_verdict(&p, s, kmax.max(k))?;

    let (ledger, mut w) = open(out, &format!("{}_k2_k{k}.csv", cfg.scenario))?;
    output::write_k2_ledger(&mut w, &result).map_err(csv_err(&ledger))?;
    let (vpath, mut w) = open(out, &format!("{}_verdicts.csv", cfg.scenario))?;
    output::write_verdicts(&mut w, &verdicts).map_err(csv_err(&vpath))?;

    let mine = verdicts
        .iter()
        .find(|v| v.k == k && v.kind == bifurcation::BranchKind::SteadyState)
        .expect("verdicts cover k");
    println!("K2({k}) = {}; steady branch {} ({})", output::sig(result.k2, output::TABLE_DIGITS), mine.stability, mine.reason);
    Ok(vec![ledger, vpath])
}

/// Runs the scenario, writes its artifacts and classifies the outcome. A run
/// stopped by a guard or a monitor still writes everything, then fails with
/// [`EXIT_RUNTIME`].
pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let p = checked(cfg)?;
    let s = &cfg.sensitivity;
    let grid = Grid::new(p.length, cfg.grid_n)?;
    let init = &cfg.initial;
    let state0 = solver::initial_cosine(&p, &grid, init.amplitude, init.mode, init.convention)?;
    let run = solver::integrate(&p, s, &grid, &state0, &cfg.solver)?;

    fs::create_dir_all(out).map_err(io_err(out))?;
    let log_path = out.join(format!("{}_monitor.log", cfg.scenario));
    output::write_log(&log_path, &run.log).map_err(io_err(&log_path))?;
    let mut written = vec![log_path];

    let (path, mut w) = open(out, &format!("{}_snapshots.csv", cfg.scenario))?;
    output::write_snapshots(&mut w, &grid, &run).map_err(csv_err(&path))?;
    written.push(path);
    let (path, mut w) = open(out, &format!("{}_probes.csv", cfg.scenario))?;
    output::write_probes(&mut w, &run).map_err(csv_err(&path))?;
    written.push(path);

    let report = analysis::classify(&run, &grid, &cfg.classify)?;
    let (path, mut w) = open(out, &format!("{}_report.csv", cfg.scenario))?;
    output::write_report(&mut w, &run, &report).map_err(csv_err(&path))?;
    written.push(path);
    println!("{} after t = {} ({})", report.pattern, output::sig(run.last().t, 6), run.termination);

    match run.termination {
        Termination::BlowupGuard | Termination::Violation => {
            let what = run.log.iter().rev().find(|e| e.is_violation() || matches!(e, solver::MonitorEvent::Blowup { .. }));
            let msg = what.map_or_else(|| run.termination.to_string(), |e| e.to_string());
            Err(CliError::Runtime(msg))
        }
        Termination::Steady | Termination::EndTime => Ok(written),
    }
}

/// Cosine spectra of the columns of a profile CSV. The first column holds the
/// cell centres; every other column is a profile on the configured domain.
pub fn spectrum(cfg: &RunConfig, profile: &Path, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let p = checked(cfg)?;
    let mut rdr = csv::Reader::from_path(profile).map_err(|e| CliError::Usage(format!("{}: {e}", profile.display())))?;
    let bad = |e: csv::Error| CliError::Usage(format!("{}: {e}", profile.display()));
    let headers = rdr.headers().map_err(bad)?.clone();
    if headers.len() < 2 {
        return Err(CliError::Usage("profile needs an x column and at least one value column".into()));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut columns = vec![Vec::new(); names.len()];
    for rec in rdr.records() {
        let rec = rec.map_err(bad)?;
        for (col, field) in columns.iter_mut().zip(rec.iter().skip(1)) {
            let x: f64 = field
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{}: `{field}` is not a number", profile.display())))?;
            col.push(x);
        }
    }
    let n = columns[0].len();
    let grid = Grid::new(p.length, n)?;
    let kmax = match cfg.classify.kmax {
        Some(k) => k,
        None => (n - 1) / 2,
    };
    let spectra = columns
        .iter()
        .map(|c| analysis::cosine_spectrum(c, &grid, kmax))
        .collect::<Result<Vec<_>, _>>()?;
    let (path, mut w) = open(out, &format!("{}_spectrum.csv", cfg.scenario))?;
    output::write_spectrum(&mut w, &names, &spectra).map_err(csv_err(&path))?;
    Ok(vec![path])
}
