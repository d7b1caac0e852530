use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

mod commands;
mod config;

use commands::{Output, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("ConfigInvalid: {0}")]
    ConfigInvalid(String),
    #[error("{0}")]
    Core(#[from] heightlab::error::Error),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Parser)]
#[command(name = "heightlab", version, about = "Heights, Weil functions and exceptional sets over number fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the places above the configured primes and audit the product formula
    Places(RunArgs),
    /// Heights of the configured or enumerated points
    Height(RunArgs),
    /// Local Weil functions of every (place, form) at each point
    Weil(RunArgs),
    /// Twisted heights at a single Q with the per-place breakdown
    Twisted(RunArgs),
    /// Solutions of the parametric inequality across a grid of Q
    Sweep(RunArgs),
    /// Filter points by a schmidt, fw or parametric system and cover the solutions
    Solve(RunArgs),
    /// Split Schmidt-type solutions into scattering classes
    Scatter(RunArgs),
    /// Filtration constants and dimension profiles on P^n
    Ruvojta(RunArgs),
    /// Identity checks: height/Weil decomposition, twisted identity, product formula
    Audit(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Decimal digits for root refinement and p-adic lifting
    #[arg(long)]
    precision: Option<u32>,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
    /// Directory for the report and CSV table; the report goes to stdout otherwise
    #[arg(long)]
    out: Option<PathBuf>,
}

const DEFAULT_PRECISION: u32 = 40;

impl Command {
    fn parts(&self) -> (&'static str, &RunArgs) {
        match self {
            Command::Places(a) => ("places", a),
            Command::Height(a) => ("height", a),
            Command::Weil(a) => ("weil", a),
            Command::Twisted(a) => ("twisted", a),
            Command::Sweep(a) => ("sweep", a),
            Command::Solve(a) => ("solve", a),
            Command::Scatter(a) => ("scatter", a),
            Command::Ruvojta(a) => ("ruvojta", a),
            Command::Audit(a) => ("audit", a),
        }
    }
}

fn write_csv(path: &Path, table: &Table) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(e.to_string()))?;
    w.write_record(&table.header).map_err(|e| CliError::Io(e.to_string()))?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn run(name: &str, args: &RunArgs) -> Result<Output, CliError> {
    let text = fs::read_to_string(&args.config).map_err(|e| CliError::Io(format!("{}: {e}", args.config.display())))?;
    let loaded = config::load(&text)?;
    let cfg = &loaded.config;
    let digits = args.precision.or(cfg.precision).unwrap_or(DEFAULT_PRECISION);
    if digits == 0 {
        return Err(CliError::ConfigInvalid("precision: must be positive".into()));
    }
    let slack = cfg.slack()?;
    let work = || match name {
        "places" => commands::places_cmd(cfg, digits),
        "height" => commands::height_cmd(cfg),
        "weil" => commands::weil_cmd(cfg, digits),
        "twisted" => commands::twisted_cmd(cfg, digits),
        "sweep" => commands::sweep_cmd(cfg, digits),
        "solve" => commands::solve_cmd(cfg, digits),
        "scatter" => commands::scatter_cmd(cfg, digits),
        "ruvojta" => commands::ruvojta_cmd(cfg),
        _ => commands::audit_cmd(cfg, digits),
    };
    let mut output = match args.jobs {
        Some(0) => return Err(CliError::ConfigInvalid("--jobs must be positive".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let body = std::mem::take(&mut output.body);
    output.body = json!({
        "schema": 1,
        "command": name,
        "mode": cfg.mode.name(),
        "config_digest": loaded.digest,
        "precision": digits,
        "slack": slack.to_string(),
        "indeterminate": output.indeterminate,
        "result": body,
    });
    Ok(output)
}

fn emit(name: &str, args: &RunArgs, output: &Output) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&output.body).expect("reports serialize") + "\n";
    match &args.out {
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(CliError::Io(e.to_string())),
                _ => {}
            }
        }
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            let report = dir.join(format!("{name}.json"));
            fs::write(&report, text).map_err(|e| CliError::Io(format!("{}: {e}", report.display())))?;
            if let Some(t) = &output.table {
                write_csv(&dir.join(format!("{name}.csv")), t)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = cli.command.parts();
    let output = match run(name, args) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = emit(name, args, &output) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if let Some(f) = &output.failure {
        eprintln!("check failed: {f}");
        return ExitCode::from(1);
    }
    if output.indeterminate {
        eprintln!("some verdicts are indeterminate at precision {}", output.body["precision"]);
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
