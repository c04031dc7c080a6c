//! docrank: score modules of an object-oriented codebase by dependence
//! structure and evaluate documentation-effort prioritization.
//!
//! Pipeline: `extract` a dependence graph from Java sources, `rank` modules
//! by importance, `evaluate`/`bootstrap` a ranking against ground-truth
//! labels, and `compare` two metrics files statistically. All outputs are
//! deterministic given inputs and flags.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use config::ConfigFlags;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "docrank",
    version,
    about = "Dependence-based documentation effort prioritization",
    after_help = "The DOCRANK_CONFIG environment variable may point to a key=value file \
                  supplying defaults; command-line flags take precedence."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract a module dependence graph from a Java source tree.
    Extract {
        /// Directory scanned recursively for .java files.
        src_dir: PathBuf,
        /// Output graph file.
        #[arg(short, long = "out")]
        out: PathBuf,
        #[command(flatten)]
        flags: ConfigFlags,
    },
    /// Score a graph file and write the module ranking as CSV.
    Rank {
        /// Input graph file.
        graph: PathBuf,
        /// Output ranking CSV.
        #[arg(short, long = "out")]
        out: PathBuf,
        /// Also mark the top k% as selected (adds a `selected` column).
        #[arg(long = "select-top", value_name = "K_PERCENT")]
        select_top: Option<f64>,
        #[command(flatten)]
        flags: ConfigFlags,
    },
    /// Evaluate a ranking or graph against ground-truth labels.
    Evaluate {
        /// Input: a graph file (solved under the configured variant) or a
        /// ranking CSV produced by `rank`.
        input: PathBuf,
        /// Labels CSV: module,label with important/non_important (or 1/0).
        #[arg(long)]
        labels: PathBuf,
        /// Output metrics JSON.
        #[arg(short, long = "out")]
        out: PathBuf,
        /// Approach name recorded in the metrics file.
        #[arg(long)]
        approach: Option<String>,
        #[command(flatten)]
        flags: ConfigFlags,
    },
    /// Evaluate with the out-of-sample bootstrap protocol (requires runs > 0).
    Bootstrap {
        /// Input graph file or ranking CSV.
        input: PathBuf,
        /// Labels CSV.
        #[arg(long)]
        labels: PathBuf,
        /// Output metrics JSON.
        #[arg(short, long = "out")]
        out: PathBuf,
        /// Approach name recorded in the metrics file.
        #[arg(long)]
        approach: Option<String>,
        #[command(flatten)]
        flags: ConfigFlags,
    },
    /// Statistically compare two metrics files produced by evaluate.
    Compare {
        /// Metrics file of approach A.
        metrics_a: PathBuf,
        /// Metrics file of approach B.
        metrics_b: PathBuf,
        /// Output comparison JSON.
        #[arg(short, long = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("docrank: error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Extract {
            src_dir,
            out,
            flags,
        } => {
            let config = config::RunConfig::resolve(&flags)?;
            commands::cmd_extract(&src_dir, &out, &config)
        }
        Command::Rank {
            graph,
            out,
            select_top,
            flags,
        } => {
            let config = config::RunConfig::resolve(&flags)?;
            commands::cmd_rank(&graph, &out, &config, select_top)
        }
        Command::Evaluate {
            input,
            labels,
            out,
            approach,
            flags,
        } => {
            let config = config::RunConfig::resolve(&flags)?;
            commands::cmd_evaluate(&input, &labels, &out, &config, approach.as_deref(), false)
        }
        Command::Bootstrap {
            input,
            labels,
            out,
            approach,
            flags,
        } => {
            let config = config::RunConfig::resolve(&flags)?;
            commands::cmd_evaluate(&input, &labels, &out, &config, approach.as_deref(), true)
        }
        Command::Compare {
            metrics_a,
            metrics_b,
            out,
        } => commands::cmd_compare(&metrics_a, &metrics_b, &out),
    }
}
