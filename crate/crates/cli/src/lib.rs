//! Command-line front end: `ujd estimate | compare | sweep | reference | check-model`.
//!
//! Runs are described by an optional TOML file; flags override file values.
//! Results go to CSV (17 significant digits) with a plain-text summary beside it.

pub mod config;
pub mod emit;
pub mod run;

use std::path::PathBuf;

use clap::{Args, Parser};

pub use config::{load_config, parse_config, Command, ModelId, Overrides, PayoffId, RunConfig};
pub use emit::{emit_results, read_csv, write_csv, Row};
pub use run::{execute, Outcome};

/// Failure categories, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<unbiased_jd::Error> for CliError {
    fn from(e: unbiased_jd::Error) -> Self {
        if e.is_numerical() {
            return CliError::Numerical(e.to_string());
        }
        let key = match &e {
            unbiased_jd::Error::InvalidParameter { name, .. } => name.to_string(),
            unbiased_jd::Error::Domain { what, .. } => what.to_string(),
            _ => "run".to_string(),
        };
        CliError::Config { key, msg: e.to_string() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ujd", version, about = "Unbiased Monte Carlo for jump-diffusions")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// TOML run specification; flags override its values.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Args, Default)]
pub struct Flags {
    #[arg(long, value_enum)]
    pub model: Option<ModelId>,
    #[arg(long, value_enum)]
    pub payoff: Option<PayoffId>,
    #[arg(long, allow_negative_numbers = true)]
    pub strike: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub sigma_a: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Euler step count; replaces the configured (M, p) pairs by one pair.
    #[arg(long)]
    pub euler_steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// CSV destination; the summary goes to the same path with a .txt extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        let f = &self.flags;
        Overrides {
            command: Some(self.command),
            model: f.model,
            payoff: f.payoff,
            strike: f.strike,
            horizon: f.horizon,
            trials: f.trials,
            sigma_a: f.sigma_a,
            gamma: f.gamma,
            epsilon: f.epsilon,
            euler_steps: f.euler_steps,
            seed: f.seed,
            workers: f.workers,
            out: f.out.clone(),
        }
    }
}

/// Parses, executes and writes one run.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(cli.config.as_deref(), &cli.overrides())?;
    for n in &cfg.notes {
        eprintln!("note: {n}");
    }
    let out = execute(&cfg)?;
    if !out.report.is_empty() {
        print!("{}", out.report);
    }
    if out.rows.is_empty() {
        return Ok(());
    }
    match &cfg.out {
        Some(path) => {
            let side = emit_results(&out.rows, &cfg.notes, path)?;
            log::info!("wrote {} and {}", path.display(), side.display());
            eprint!("{}", emit::summary(&out.rows, &[]));
        }
        None => {
            write_csv(std::io::stdout().lock(), &out.rows)?;
            eprint!("{}", emit::summary(&out.rows, &[]));
        }
    }
    Ok(())
}
