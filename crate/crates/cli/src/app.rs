//! Command-line front end: argument parsing, command dispatch and exit codes.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use safecov_core::simulation::{run_scenario, ControllerMode, RunTrace, ScenarioConfig};

use crate::config::{checksum, load_config};
use crate::report::{render_summaries, Assertion, RunManifest, RunSummary};
use crate::snapshot::{emit_snapshot, record_at, DEFAULT_SNAPSHOT_TIMES};
use crate::trace::{emit_trace, sig9, write_atomic};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_UNSAFE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "safecov", version, about = "Safe adaptive multi-agent coverage simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario and write its trace, snapshots and manifest.
    Run {
        config: PathBuf,
        /// Override the controller mode from the config.
        #[arg(long)]
        mode: Option<ControllerMode>,
        /// Output directory (default: out/<name>-<mode>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the integration step.
        #[arg(long)]
        dt: Option<f64>,
        /// Snapshot times in seconds, comma separated.
        #[arg(long, value_delimiter = ',')]
        snapshots: Option<Vec<f64>>,
    },
    /// Run nominal and filtered modes from the same start and report both.
    Compare {
        config: PathBuf,
        /// Output directory (default: out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Load and validate a scenario without running it.
    Validate { config: PathBuf },
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> i32 {
    match cli.command {
        Command::Validate { config } => validate(&config),
        Command::Run {
            config,
            mode,
            out,
            dt,
            snapshots,
        } => run(&config, mode, out, dt, snapshots),
        Command::Compare { config, out, dt } => compare(&config, out, dt),
    }
}

fn load(path: &Path, mode: Option<ControllerMode>, dt: Option<f64>) -> Result<ScenarioConfig, i32> {
    let mut config = load_config(path).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_CONFIG
    })?;
    if mode.is_some() || dt.is_some() {
        if let Some(m) = mode {
            config.mode = m;
        }
        if let Some(dt) = dt {
            config.dt = dt;
        }
        config.validate().map_err(|e| {
            eprintln!("error: {} (after command-line overrides): {e}", path.display());
            EXIT_CONFIG
        })?;
    }
    Ok(config)
}

fn validate(path: &Path) -> i32 {
    match load(path, None, None) {
        Ok(config) => {
            println!(
                "{}: ok ({} agents, {} steps, mode {}, checksum {})",
                config.name,
                config.agent_count(),
                config.steps(),
                config.mode.as_str(),
                checksum(&config)
            );
            EXIT_OK
        }
        Err(code) => code,
    }
}

struct Outcome {
    trace: RunTrace,
    summary: RunSummary,
    code: i32,
    seconds: f64,
}

fn simulate(config: &ScenarioConfig) -> Outcome {
    let start = Instant::now();
    let result = run_scenario(config);
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(trace) => {
            let summary = RunSummary::new(config, &trace, None);
            let code = if summary.assertion == Assertion::Fail {
                EXIT_UNSAFE
            } else {
                EXIT_OK
            };
            Outcome {
                trace,
                summary,
                code,
                seconds,
            }
        }
        Err(abort) => {
            let msg = abort.to_string();
            let trace = *abort.partial;
            let summary = RunSummary::new(config, &trace, Some(msg));
            Outcome {
                trace,
                summary,
                code: EXIT_DEGENERATE,
                seconds,
            }
        }
    }
}

fn io_fail(path: &Path, e: impl std::fmt::Display) -> i32 {
    eprintln!("error: {}: {e}", path.display());
    EXIT_IO
}

/// Writes the trace (when non-empty) and manifest for one mode into `dir`.
fn write_mode_outputs(
    config: &ScenarioConfig,
    outcome: &Outcome,
    dir: &Path,
    snapshot_times: &[f64],
    mut outputs: Vec<String>,
) -> Result<(), i32> {
    fs::create_dir_all(dir).map_err(|e| io_fail(dir, e))?;
    if !outcome.trace.records.is_empty() {
        let csv = dir.join("trace.csv");
        emit_trace(&outcome.trace.records, &csv).map_err(|e| io_fail(&csv, e))?;
        outputs.push("trace.csv".into());
        for &t in snapshot_times {
            let record = match record_at(&outcome.trace, t, config.dt, config.horizon) {
                Ok(r) => r,
                Err(_) => continue,
            };
            let name = format!("snapshot_t{}.svg", sig9(t));
            let path = dir.join(&name);
            let label = format!("{} t = {} s", config.mode.as_str(), sig9(record.t));
            emit_snapshot(record, &config.domain, &config.density, config.r_safe, &path, &label)
                .map_err(|e| io_fail(&path, e))?;
            outputs.push(name);
        }
    }
    outputs.push("manifest.toml".into());
    let manifest = RunManifest {
        scenario: config.name.clone(),
        checksum: checksum(config),
        mode: config.mode,
        outputs,
        safety_assertion: outcome.summary.assertion,
        exit_code: outcome.code,
        duration_s: outcome.seconds,
    };
    let path = dir.join("manifest.toml");
    write_atomic(&path, manifest.to_toml().as_bytes()).map_err(|e| io_fail(&path, e))
}

fn run(
    path: &Path,
    mode: Option<ControllerMode>,
    out: Option<PathBuf>,
    dt: Option<f64>,
    snapshots: Option<Vec<f64>>,
) -> i32 {
    let config = match load(path, mode, dt) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let times = match snapshots {
        Some(ts) => {
            if let Some(bad) = ts.iter().find(|&&t| !(t >= 0.0 && t <= config.horizon)) {
                eprintln!("error: --snapshots: {bad} is outside [0, {}]", config.horizon);
                return EXIT_CONFIG;
            }
            ts
        }
        None => DEFAULT_SNAPSHOT_TIMES
            .iter()
            .copied()
            .filter(|&t| t <= config.horizon)
            .collect(),
    };
    let dir = out.unwrap_or_else(|| PathBuf::from("out").join(format!("{}-{}", config.name, config.mode.as_str())));
    let outcome = simulate(&config);
    if let Err(code) = write_mode_outputs(&config, &outcome, &dir, &times, Vec::new()) {
        return code;
    }
    print!("{}", render_summaries(&config.name, &checksum(&config), std::slice::from_ref(&outcome.summary)));
    if let Some(msg) = &outcome.summary.aborted {
        eprintln!("error: {msg}");
    }
    outcome.code
}

fn compare(path: &Path, out: Option<PathBuf>, dt: Option<f64>) -> i32 {
    let base = match load(path, None, dt) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let mut configs = Vec::new();
    for mode in [ControllerMode::Nominal, ControllerMode::Cbf] {
        let mut c = base.clone();
        c.mode = mode;
        if let Err(e) = c.validate() {
            eprintln!("error: {} ({} mode): {e}", path.display(), mode.as_str());
            return EXIT_CONFIG;
        }
        configs.push(c);
    }
    let outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || simulate(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    });
    let dir = out.unwrap_or_else(|| PathBuf::from("out").join(&base.name));
    let times: Vec<f64> = DEFAULT_SNAPSHOT_TIMES
        .iter()
        .copied()
        .filter(|&t| t <= base.horizon)
        .collect();
    for (config, outcome) in configs.iter().zip(&outcomes) {
        if let Err(code) = write_mode_outputs(config, outcome, &dir.join(config.mode.as_str()), &times, Vec::new()) {
            return code;
        }
    }
    let summaries: Vec<RunSummary> = outcomes.iter().map(|o| o.summary.clone()).collect();
    let report = render_summaries(&base.name, &checksum(&base), &summaries);
    let report_path = dir.join("report.txt");
    if let Err(e) = write_atomic(&report_path, report.as_bytes()) {
        return io_fail(&report_path, e);
    }
    print!("{report}");
    if outcomes.iter().any(|o| o.code == EXIT_DEGENERATE) {
        EXIT_DEGENERATE
    } else if outcomes.iter().any(|o| o.code == EXIT_UNSAFE) {
        EXIT_UNSAFE
    } else {
        EXIT_OK
    }
}
