//! `vulngraph`: source functions -> control-flow graphs -> embeddings ->
//! attributed graphs -> trained vulnerability classifier, as subcommands.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::PipelineConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad input or configuration: exit code 1.
    User(String),
    /// Broken internal invariant: exit code 2.
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::User(m) => write!(f, "{m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "vulngraph", version, about = "CFG-based vulnerability classifier pipeline")]
struct Cli {
    /// Flat key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Global seed; per-stage seeds are derived from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract one DOT control-flow graph per function from .c sources.
    Extract {
        /// Directory of .c files.
        src: PathBuf,
        /// Output directory for .dot files and index.csv.
        out: PathBuf,
        /// Skip functions that fail to parse instead of aborting.
        #[arg(long)]
        keep_going: bool,
    },
    /// Train token embeddings on a source corpus.
    Embed {
        /// Directory of .c files.
        src: PathBuf,
        /// Output embedding table path.
        out: PathBuf,
        /// Embedding width override.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Turn DOT graphs plus a label manifest into an attributed-graph dataset.
    Build {
        /// Directory of .dot files referenced by the manifest.
        dots: PathBuf,
        /// Embedding table path.
        table: PathBuf,
        /// Label manifest (path,label,origin).
        manifest: PathBuf,
        /// Output dataset directory.
        out: PathBuf,
        /// Downsample the majority class to equal counts.
        #[arg(long)]
        balance: bool,
    },
    /// Generate the labeled synthetic corpus.
    Synth {
        /// Output directory for .c files and manifest.csv.
        out: PathBuf,
        /// Functions per class.
        #[arg(long, default_value_t = 500)]
        per_class: usize,
    },
    /// Train the classifier on a dataset directory.
    Train {
        /// Dataset directory produced by `build`.
        dataset: PathBuf,
        /// Output directory for checkpoints and metrics.
        out: PathBuf,
        /// Epoch count override.
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Evaluate a checkpoint on a dataset directory; prints metrics JSON.
    Eval {
        dataset: PathBuf,
        checkpoint: PathBuf,
    },
    /// Classify every function in one .c file.
    Predict {
        source: PathBuf,
        table: PathBuf,
        checkpoint: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match cli.command {
        Command::Extract {
            src,
            out,
            keep_going,
        } => commands::cmd_extract(&src, &out, keep_going),
        Command::Embed { src, out, dim } => {
            if let Some(d) = dim {
                cfg.embed.dim = d;
                cfg.model.feature_dim = 2 * d;
            }
            commands::cmd_embed(&src, &out, &cfg)
        }
        Command::Build {
            dots,
            table,
            manifest,
            out,
            balance,
        } => commands::cmd_build(&dots, &table, &manifest, &out, balance, &cfg),
        Command::Synth { out, per_class } => commands::cmd_synth(&out, per_class, &cfg),
        Command::Train {
            dataset,
            out,
            epochs,
        } => {
            if let Some(e) = epochs {
                cfg.epochs = e;
            }
            commands::cmd_train(&dataset, &out, &cfg)
        }
        Command::Eval {
            dataset,
            checkpoint,
        } => commands::cmd_eval(&dataset, &checkpoint),
        Command::Predict {
            source,
            table,
            checkpoint,
        } => commands::cmd_predict(&source, &table, &checkpoint),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli)));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e @ CliError::User(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Ok(Err(e @ CliError::Internal(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        // a panic means a violated internal invariant, not bad user input
        Err(_) => ExitCode::from(2),
    }
}
