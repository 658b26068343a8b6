//! Command-line frontend: config-driven estimation, exact bias, Monte Carlo
//! sweeps and MI curves, with tables in csv or json-lines.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output::{emit, Format, Table};

#[derive(Debug, Parser)]
#[command(
    name = "entest",
    version,
    about = "Entropy and mutual information estimation for undersampled discrete data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// Flat key = value config file.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Override a config key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output path (default stdout).
    #[arg(long, short)]
    pub output: Option<String>,
    /// csv or json-lines.
    #[arg(long)]
    pub format: Option<String>,
    /// Add the wall-clock time to the metadata (breaks byte-reproducibility).
    #[arg(long)]
    pub timestamp: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate entropy from one count vector.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated counts, e.g. 2,1.
        #[arg(long, allow_hyphen_values = true)]
        counts: Option<String>,
        /// File holding the counts, separated by commas or whitespace.
        #[arg(long)]
        counts_file: Option<String>,
        /// naive, grassberger or schuermann.
        #[arg(long)]
        estimator: Option<String>,
        /// binomial or poisson (schuermann only).
        #[arg(long)]
        regime: Option<String>,
        /// psi_N or log_N (grassberger only).
        #[arg(long)]
        leading_term: Option<String>,
        /// explicit, optimal_from_p or all_ones.
        #[arg(long)]
        a_strategy: Option<String>,
        /// Comma-separated parameters for a_strategy = explicit.
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        /// True distribution (oracle mode for optimal_from_p).
        #[arg(long)]
        p: Option<String>,
    },
    /// Exact bias of the binomial-regime estimator, closed form and enumerated.
    BiasExact {
        #[command(flatten)]
        common: Common,
        /// True distribution, comma-separated; fractions like 1/3 allowed.
        #[arg(long)]
        p: Option<String>,
        /// One tuple size or a comma-separated list.
        #[arg(long)]
        n: Option<String>,
        /// explicit, optimal_from_p or all_ones.
        #[arg(long)]
        a_strategy: Option<String>,
        /// Comma-separated parameters for a_strategy = explicit.
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
    },
    /// Monte Carlo sweep over tuple sizes and parameter points.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Mutual-information subsampling curve.
    Mi {
        #[command(flatten)]
        common: Common,
        /// Two-column (x, y) dataset.
        #[arg(long)]
        dataset: Option<String>,
        /// Synthetic profile: pym_like or spherical_like.
        #[arg(long)]
        synth: Option<String>,
    },
}

fn build_settings(common: &Common, flags: &[(&str, &Option<String>)]) -> CliResult<Settings> {
    let mut s = match &common.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    for (key, value) in flags {
        if let Some(v) = value {
            s.set(key, v.clone())?;
        }
    }
    if let Some(o) = &common.output {
        s.set("output", o.clone())?;
    }
    if let Some(f) = &common.format {
        s.set("format", f.clone())?;
    }
    if common.timestamp {
        s.set("timestamp", "true")?;
    }
    for pair in &common.set {
        s.set_pair(pair)?;
    }
    Ok(s)
}

type Runner = fn(&mut Settings) -> CliResult<Table>;

/// Run one command and return the rendered table and its destination.
pub fn execute(cli: &Cli) -> CliResult<(String, Option<PathBuf>)> {
    let (name, mut settings, keys, run): (&str, Settings, &[&str], Runner) = match &cli.command {
        Command::Estimate {
            common,
            counts,
            counts_file,
            estimator,
            regime,
            leading_term,
            a_strategy,
            a,
            p,
        } => (
            "estimate",
            build_settings(
                common,
                &[
                    ("counts", counts),
                    ("counts_file", counts_file),
                    ("estimator", estimator),
                    ("regime", regime),
                    ("leading_term", leading_term),
                    ("a_strategy", a_strategy),
                    ("a", a),
                    ("p", p),
                ],
            )?,
            commands::ESTIMATE_KEYS,
            commands::estimate,
        ),
        Command::BiasExact {
            common,
            p,
            n,
            a_strategy,
            a,
        } => (
            "bias-exact",
            build_settings(
                common,
                &[("p", p), ("n", n), ("a_strategy", a_strategy), ("a", a)],
            )?,
            commands::BIAS_KEYS,
            commands::bias_exact,
        ),
        Command::Sweep { common } => (
            "sweep",
            build_settings(common, &[])?,
            commands::SWEEP_KEYS,
            commands::sweep,
        ),
        Command::Mi {
            common,
            dataset,
            synth,
        } => (
            "mi",
            build_settings(common, &[("dataset", dataset), ("synth_profile", synth)])?,
            commands::MI_KEYS,
            commands::mi,
        ),
    };
    let allowed: Vec<&str> = keys.iter().chain(commands::COMMON_KEYS).copied().collect();
    settings.check_keys(&allowed)?;
    let format =
        Format::parse(&settings.choice("format", "csv", &["csv", "json-lines", "jsonl"])?)
            .map_err(CliError::validation)?;
    let output = settings.string("output", None)?.map(PathBuf::from);
    let timestamp = settings.boolean("timestamp", false)?;

    let table = run(&mut settings)?;

    let mut meta = vec![
        ("tool".to_string(), "entest".to_string()),
        (
            "tool_version".to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        ),
        ("command".to_string(), name.to_string()),
    ];
    if timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        meta.push(("timestamp_unix".to_string(), secs.to_string()));
    }
    meta.extend(
        settings
            .resolved()
            .iter()
            .filter(|(k, _)| k.as_str() != "timestamp")
            .map(|(k, v)| {
                // Derived values are not settable keys.
                let key = if k.ends_with("_resolved") {
                    k.clone()
                } else {
                    format!("config.{k}")
                };
                (key, v.clone())
            }),
    );
    meta.extend(table.metadata.iter().cloned());
    let table = Table {
        metadata: meta,
        ..table
    };
    Ok((table.render(format), output))
}

/// Parse-free entry point used by the binary; returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli).and_then(|(text, out)| emit(&text, out.as_deref())) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
