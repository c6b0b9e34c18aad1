//! `chainlattice` command-line front end.
//!
//! Exit codes: 0 when the command ran and its verdict (if any) is positive,
//! 1 for a negative verdict (violated property, failed proof claim), 2 for
//! usage, parse and delegate errors.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use chainlattice::search::{Budget, ResultCache, CACHE_ENV};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "chainlattice", version, about = "Chain-intersecting set families: checks, constructions, exact search")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Result cache file (JSON lines).
    #[arg(long, global = true, env = CACHE_ENV)]
    cache: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Recompute and overwrite cached results.
    #[arg(long, global = true)]
    force: bool,
    /// Search node limit.
    #[arg(long, global = true, default_value_t = 200_000_000)]
    budget: u64,
    /// Search wall-clock limit in seconds.
    #[arg(long, global = true, default_value_t = 300)]
    time_limit: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a property on a family file.
    Check {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        property: String,
    },
    /// Build an explicit construction, e.g. `upper:n=4,s=5`.
    Construct {
        #[arg(long)]
        spec: String,
        /// Write the family file here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form extremal values and the constructions behind them.
    Formula {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        mode: String,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// Largest family in the whole power set with a property.
    Extremal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        property: String,
    },
    /// Heaviest valid subfamily of a weighted ground.
    Ground {
        #[arg(long, conflicts_with = "chainpair", required_unless_present = "chainpair")]
        circle: bool,
        #[arg(long)]
        chainpair: bool,
        /// Chain-pair element order, e.g. `3,1,2`; identity by default.
        #[arg(long, requires = "chainpair")]
        ordering: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        property: String,
    },
    /// Lower bound from constructions, upper bound from search and grounds.
    Certify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        property: String,
    },
    /// Empirical status of the strong (1) or total (2) mode conjecture at n.
    Conjecture {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// Check proof steps on concrete families.
    Proofcheck {
        /// Decompose a totally (2,2)-chain-intersecting family.
        #[arg(long, conflicts_with = "hilton", required_unless_present = "hilton")]
        thm2_family: Option<PathBuf>,
        /// Two family files for the complement-free cross-Sperner inequality.
        #[arg(long, num_args = 2, value_names = ["F1", "F2"])]
        hilton: Option<Vec<PathBuf>>,
    },
    /// Chain-pair weight arithmetic of the strong-mode threshold.
    Threshold {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        nmax: usize,
    },
    /// Certify a grid of `(n, property)` cells.
    Sweep {
        /// `3..6`, `3..=6`, `3-6`, `4` or `3,5,7`.
        #[arg(long)]
        n_range: String,
        /// Properties separated by `;` or given repeatedly.
        #[arg(long, required = true, num_args = 1.., value_delimiter = ';')]
        properties: Vec<String>,
        /// Also write the CSV table here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parsed flags shared by every command.
#[derive(Debug)]
pub struct RunConfig {
    pub format: Format,
    pub budget: Budget,
    pub cache: Option<ResultCache>,
    pub force: bool,
}

impl RunConfig {
    fn from_args(g: &GlobalArgs) -> anyhow::Result<RunConfig> {
        anyhow::ensure!(g.budget > 0, "--budget must be positive");
        anyhow::ensure!(g.time_limit > 0, "--time-limit must be positive");
        let cache = if g.no_cache {
            None
        } else {
            Some(g.cache.clone().map(ResultCache::open).unwrap_or_else(ResultCache::from_env))
        };
        Ok(RunConfig {
            format: g.format,
            budget: Budget { max_nodes: g.budget, max_time: Duration::from_secs(g.time_limit) },
            cache,
            force: g.force,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = RunConfig::from_args(&cli.global).and_then(|cfg| commands::dispatch(cli.command, &cfg));
    match run {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
