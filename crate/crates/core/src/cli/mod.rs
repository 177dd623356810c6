//! `sharpmult` command line: a JSON run configuration in, CSV and JSON reports out.
//!
//! Exit status is 0 on success, 1 on invalid input or a failed explicit check,
//! and 2 when `analyze-symbol` flags a divergent condition.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use commands::Outcome;
pub use config::{load_config, parse_config, CommandKind, ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "sharpmult",
    version,
    about = "Fourier multiplier conditions, lemma checks and operator norm estimates"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON run configuration; every field has a default.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Samples per axis (the suite grid for check-lemmas).
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Box side length (the suite box for check-lemmas).
    #[arg(long = "box", global = true)]
    pub box_side: Option<f64>,
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Estimate operator norms outside the region |1/p−1/2| < s/n.
    #[arg(long, global = true)]
    pub override_region: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hörmander-type conditions of a symbol, scale by scale.
    AnalyzeSymbol,
    /// Seeded checks of the supporting inequalities.
    CheckLemmas {
        /// Comma-separated suite names.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        #[arg(long)]
        cases: Option<usize>,
    },
    /// Empirical operator norm lower bounds against the Lorentz condition.
    EstimateOpnorm,
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::AnalyzeSymbol => CommandKind::AnalyzeSymbol,
            Command::CheckLemmas { .. } => CommandKind::CheckLemmas,
            Command::EstimateOpnorm => CommandKind::EstimateOpnorm,
        }
    }
}

/// Loads the config file and applies command-line overrides.
pub fn resolve_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut config = match &cli.global.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    let g = &cli.global;
    let lemmas = matches!(cli.command, Command::CheckLemmas { .. });
    if let Some(out) = &g.output {
        config.output_dir = out.clone();
    }
    if let Some(seed) = g.seed {
        config.seed = seed;
    }
    if let Some(dim) = g.dim {
        config.dim = dim;
    }
    if let Some(n) = g.resolution {
        if lemmas {
            config.lemmas.resolution = n;
        } else {
            config.samples_per_dim = n;
        }
    }
    if let Some(l) = g.box_side {
        if lemmas {
            config.lemmas.box_side = l;
        } else {
            config.box_side = l;
        }
    }
    if g.override_region {
        config.opnorm.override_region = true;
    }
    if let Command::CheckLemmas { suite, cases } = &cli.command {
        if !suite.is_empty() {
            config.lemmas.suites = suite
                .iter()
                .map(|name| name.trim().parse())
                .collect::<crate::Result<_>>()?;
        }
        if cases.is_some() {
            config.lemmas.cases = *cases;
        }
    }
    Ok(config)
}

pub fn execute(cli: &Cli) -> anyhow::Result<Outcome> {
    let config = resolve_config(cli)?;
    config.validate(cli.command.kind())?;
    match cli.command {
        Command::AnalyzeSymbol => commands::analyze_symbol(&config),
        Command::CheckLemmas { .. } => commands::check_lemmas(&config),
        Command::EstimateOpnorm => commands::estimate_opnorm(&config),
    }
}

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for path in &outcome.files {
                println!("wrote {}", path.display());
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
