use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use macc_core::experiment::parse_ratio;
use macc_core::verification::privacy::DEFAULT_BUDGET;
use macc_core::{PrivacyEngine, PrivateSetMode, Rational, SchemeKind};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Parser, Debug)]
#[command(name = "macc", version, about = "Demand-private multi-access coded caching: verification, trade-off sweeps and private sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check decodability over all demand vectors and demand privacy by exact enumeration.
    Verify(RunArgs),
    /// Measure (memory, rate) points and write them as CSV.
    Tradeoff(RunArgs),
    /// Print the Algorithm-1 and smallest private sets of user 1.
    PrivateSet(RunArgs),
    /// Recover a user's demand from a neighbour's view of its key shares.
    Attack {
        #[command(flatten)]
        run: RunArgs,
        /// User whose demand is attacked.
        #[arg(long, default_value_t = 1)]
        target: usize,
        /// Attacking user; defaults to <target+L-1>.
        #[arg(long)]
        attacker: Option<usize>,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    /// JSON file with defaults for any of these options.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "K", value_name = "USERS")]
    pub k: Option<usize>,
    #[arg(long = "L", value_name = "ACCESS")]
    pub l: Option<usize>,
    #[arg(long = "N", value_name = "FILES")]
    pub n: Option<usize>,
    /// Bits per file; the smallest valid size when omitted.
    #[arg(long = "F", value_name = "BITS")]
    pub f: Option<usize>,
    /// Scheme name, or a comma-separated list for tradeoff.
    #[arg(long)]
    pub scheme: Option<String>,
    /// algorithm1, oracle, full or naive-lwcc.
    #[arg(long = "private-set")]
    pub private_set: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated memory values such as "0,1/3,2/3" (base memory for lifted schemes).
    #[arg(long = "memory-grid", value_name = "LIST")]
    pub memory_grid: Option<String>,
    /// Maximum scheme evaluations for the privacy check.
    #[arg(long)]
    pub budget: Option<u128>,
    /// auto, enumerate or affine.
    #[arg(long)]
    pub engine: Option<String>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Library JSON document to use instead of generated libraries.
    #[arg(long)]
    pub library: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Verify that the scheme leaks (runs the privacy check on non-private schemes).
    #[arg(long = "expect-leak")]
    pub expect_leak: bool,
    /// Decimal instead of p/q values in CSV output.
    #[arg(long)]
    pub float: bool,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(rename = "K")]
    k: Option<usize>,
    #[serde(rename = "L")]
    l: Option<usize>,
    #[serde(rename = "N")]
    n: Option<usize>,
    #[serde(rename = "F")]
    f: Option<usize>,
    scheme: Option<String>,
    private_set: Option<String>,
    seed: Option<u64>,
    memory_grid: Option<Vec<String>>,
    budget: Option<u64>,
    engine: Option<String>,
    threads: Option<usize>,
    library: Option<PathBuf>,
    output: Option<PathBuf>,
    expect_leak: Option<bool>,
    float: Option<bool>,
}

/// Options after merging flags, config file and defaults.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub k: usize,
    pub l: usize,
    pub n: usize,
    pub f: Option<usize>,
    pub schemes: Option<Vec<SchemeKind>>,
    pub mode: Option<PrivateSetMode>,
    pub seed: u64,
    pub memory_grid: Option<Vec<Rational>>,
    pub budget: u128,
    pub engine: PrivacyEngine,
    pub threads: usize,
    pub library: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub expect_leak: bool,
    pub float: bool,
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn parse_grid(text: &str) -> Result<Vec<Rational>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_ratio(s).map_err(usage))
        .collect()
}

fn parse_schemes(text: &str) -> Result<Vec<SchemeKind>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<SchemeKind>().map_err(usage))
        .collect()
}

fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

impl ExperimentConfig {
    pub fn resolve(args: &RunArgs) -> Result<Self, CliError> {
        Self::resolve_with_network(args, (3, 2))
    }

    /// Like `resolve`, with `(K, L)` used when neither flags nor the file set them.
    pub fn resolve_with_network(args: &RunArgs, network: (usize, usize)) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => read_config(p)?,
            None => ConfigFile::default(),
        };
        let scheme = args.scheme.clone().or(file.scheme);
        let mode = args.private_set.clone().or(file.private_set);
        let grid = match (&args.memory_grid, file.memory_grid) {
            (Some(text), _) => Some(parse_grid(text)?),
            (None, Some(list)) => Some(list.iter().map(|s| parse_ratio(s).map_err(usage)).collect::<Result<_, _>>()?),
            (None, None) => None,
        };
        Ok(ExperimentConfig {
            k: args.k.or(file.k).unwrap_or(network.0),
            l: args.l.or(file.l).unwrap_or(network.1),
            n: args.n.or(file.n).unwrap_or(2),
            f: args.f.or(file.f),
            schemes: scheme.as_deref().map(parse_schemes).transpose()?,
            mode: mode.map(|m| m.parse::<PrivateSetMode>().map_err(usage)).transpose()?,
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            memory_grid: grid,
            budget: args.budget.or(file.budget.map(u128::from)).unwrap_or(DEFAULT_BUDGET),
            engine: args
                .engine
                .clone()
                .or(file.engine)
                .map(|e| e.parse::<PrivacyEngine>().map_err(usage))
                .transpose()?
                .unwrap_or_default(),
            threads: args.threads.or(file.threads).unwrap_or(1),
            library: args.library.clone().or(file.library),
            output: args.output.clone().or(file.output),
            expect_leak: args.expect_leak || file.expect_leak.unwrap_or(false),
            float: args.float || file.float.unwrap_or(false),
        })
    }

    /// The single scheme named, or `default` when none was given.
    pub fn single_scheme(&self, default: SchemeKind) -> Result<SchemeKind, CliError> {
        match self.schemes.as_deref() {
            None => Ok(default),
            Some([one]) => Ok(*one),
            Some(_) => Err(usage("this command takes a single scheme")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(
            parse_grid("0, 1/3,2").unwrap(),
            vec![Rational::from_integer(0), Rational::new(1, 3), Rational::from_integer(2)]
        );
        assert!(parse_grid("").unwrap().is_empty());
        assert!(parse_grid("1/x").is_err());
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"K": 5, "L": 3, "seed": 9, "memory_grid": ["1/5"]}"#).unwrap();
        let args = RunArgs {
            config: Some(path),
            l: Some(2),
            ..RunArgs::default()
        };
        let cfg = ExperimentConfig::resolve(&args).unwrap();
        assert_eq!((cfg.k, cfg.l, cfg.n, cfg.seed), (5, 2, 2, 9));
        assert_eq!(cfg.memory_grid, Some(vec![Rational::new(1, 5)]));
        assert_eq!(cfg.budget, DEFAULT_BUDGET);
    }

    #[test]
    fn unknown_config_fields_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"users": 5}"#).unwrap();
        let args = RunArgs {
            config: Some(path),
            ..RunArgs::default()
        };
        assert!(matches!(ExperimentConfig::resolve(&args), Err(CliError::Usage(_))));
    }
}
