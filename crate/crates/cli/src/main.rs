//! `kglab <subcommand> [--config <path>] --out <dir> [--threads N] [--d3]`
//!
//! Exit status: 0 on success, 2 on invalid input or usage, 3 when a study
//! aborts numerically, 1 on I/O failure.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{SecondsFormat, Utc};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use kglab::experiments::{
    conjecture_study, convergence_study, decay_study, growth_study, linear_flow_error_study, simulate, StudyConfig,
};

use output::Written;

#[derive(Parser)]
#[command(name = "kglab", version, about = "Studies of the discrete nonlinear Klein-Gordon equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single run with an energy trace (energy.csv).
    Simulate(RunArgs),
    /// Continuum-limit convergence in h (convergence.csv).
    Converge(RunArgs),
    /// Linear-flow error against the continuous propagators (linear.csv).
    Linear(RunArgs),
    /// Long-time Sobolev growth envelopes (growth.csv).
    Growth(RunArgs),
    /// Sup-norm decay of lattice kernels (decay.csv).
    Decay(RunArgs),
    /// Decay of the rescaled oscillatory integral across h (conjecture.csv).
    Conjecture(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with [study.<name>] sections; defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (all cores by default).
    #[arg(long)]
    threads: Option<usize>,
    /// Include the three-dimensional decay rows.
    #[arg(long)]
    d3: bool,
}

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<kglab::Error> for Failure {
    fn from(e: kglab::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Runs every configuration of one study and writes its tables.
fn execute(configs: &[StudyConfig], out: &Path, written: &mut Written) -> Result<Value, Failure> {
    macro_rules! collect {
        ($variant:ident, $run:expr) => {
            configs
                .iter()
                .filter_map(|c| match c {
                    StudyConfig::$variant(c) => Some($run(c)),
                    _ => None,
                })
                .collect::<kglab::Result<Vec<_>>>()?
        };
    }
    let kind = configs.first().map_or("simulate", StudyConfig::name);
    let certificates = match kind {
        "convergence" => {
            let results = collect!(Convergence, convergence_study);
            written.write(out, "convergence.csv", &output::convergence_csv(&results)).map_err(io)?;
            json!(results
                .iter()
                .map(|r| json!({
                    "label": r.label,
                    "box_length": r.box_length,
                    "orders": r.orders,
                    "monotone": r.monotone,
                    "reference": r.reference,
                    "reference_passed": r.reference.passed(),
                }))
                .collect::<Vec<_>>())
        }
        "linear" => {
            let results = collect!(Linear, linear_flow_error_study);
            written.write(out, "linear.csv", &output::linear_csv(&results)).map_err(io)?;
            json!(results
                .iter()
                .map(|r| json!({
                    "box_length": r.box_length,
                    "orders": r.orders,
                    "envelopes": r.envelopes,
                    "envelopes_passed": r.envelopes.iter().all(|e| e.passed()),
                }))
                .collect::<Vec<_>>())
        }
        "growth" => {
            let results = collect!(Growth, growth_study);
            written.write(out, "growth.csv", &output::growth_csv(&results)).map_err(io)?;
            json!(results
                .iter()
                .map(|r| json!({
                    "energy_drift": r.energy_drift,
                    "summaries": r.summaries,
                    "stabilized": r.summaries.iter().map(|s| s.stabilized()).collect::<Vec<_>>(),
                }))
                .collect::<Vec<_>>())
        }
        "decay" => {
            let results: Vec<_> = collect!(Decay, decay_study).into_iter().flatten().collect();
            let (table, series) = output::decay_csv(&results);
            written.write(out, "decay.csv", &table).map_err(io)?;
            written.write(out, "decay_series.csv", &series).map_err(io)?;
            json!(results
                .iter()
                .map(|o| json!({
                    "model": o.model,
                    "d": o.dim,
                    "points_per_axis": o.points,
                    "fit": o.fit,
                    "pass": o.passed(),
                }))
                .collect::<Vec<_>>())
        }
        "conjecture" => {
            let results = collect!(Conjecture, conjecture_study);
            let (table, series) = output::conjecture_csv(&results);
            written.write(out, "conjecture.csv", &table).map_err(io)?;
            written.write(out, "conjecture_series.csv", &series).map_err(io)?;
            let rules: Vec<Value> = configs
                .iter()
                .filter_map(|c| match c {
                    StudyConfig::Conjecture(c) => Some(json!({ "rule": c.rule, "v_box": c.v_box })),
                    _ => None,
                })
                .collect();
            json!({
                "quadrature": rules,
                "rows": results.iter().flat_map(|r| r.rows.iter().map(|row| json!({
                    "h": row.h, "fit": row.fit, "argmax_on_boundary": row.argmax_on_boundary,
                }))).collect::<Vec<_>>(),
                "unit_step_in_band": results.iter().map(|r| r.unit_step_in_band()).collect::<Vec<_>>(),
            })
        }
        _ => {
            let results = collect!(Simulate, simulate);
            written.write(out, "energy.csv", &output::energy_csv(&results)).map_err(io)?;
            json!(results
                .iter()
                .map(|r| json!({ "dt": r.dt, "box_length": r.box_length, "max_relative_drift": r.max_drift() }))
                .collect::<Vec<_>>())
        }
    };
    Ok(certificates)
}

fn run(command: &str, args: &RunArgs) -> Result<(), Failure> {
    let started = now();
    let doc = config::read_document(args.config.as_deref())?;
    let study = config::study_for(command);
    let configs = config::study_configs(&doc, study, args.d3)?;
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(Failure::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Io(e.to_string()))?;
    }
    std::fs::create_dir_all(&args.out).map_err(io)?;

    let mut written = Written::default();
    let outcome = execute(&configs, &args.out, &mut written);
    let (status, certificates) = match &outcome {
        Ok(c) => (json!({ "status": "ok" }), c.clone()),
        Err(f) => (json!({ "status": "failed", "exit_code": f.code(), "message": f.message() }), Value::Null),
    };
    let manifest = json!({
        "tool": "kglab",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": command,
        "started": started,
        "finished": now(),
        "threads": rayon::current_num_threads(),
        "config": configs,
        "studies": { study: status },
        "files": written.to_json(),
        "certificates": { study: certificates },
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Io(e.to_string()))? + "\n";
    std::fs::write(args.out.join("manifest.json"), text).map_err(io)?;
    outcome.map(|_| ())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (name, args) = match &cli.command {
        Command::Simulate(a) => ("simulate", a),
        Command::Converge(a) => ("converge", a),
        Command::Linear(a) => ("linear", a),
        Command::Growth(a) => ("growth", a),
        Command::Decay(a) => ("decay", a),
        Command::Conjecture(a) => ("conjecture", a),
    };
    match run(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
