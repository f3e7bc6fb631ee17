use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cadpipe::data::{feature_summary, read_dataset, render_summary};
use cadpipe::pipeline::{LeakageMode, Pipeline, PipelineConfig, CLEAN_FILE};
use cadpipe::{Error, Result};

/// Cleaning, Borderline-SMOTE balancing, autoencoder augmentation and
/// cross-validated CNN/baseline evaluation for tabular medical data.
#[derive(Parser)]
#[command(name = "cadpipe", version)]
struct Cli {
    /// Increase log detail (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, clean, encode and scale the raw CSV.
    Ingest(Common),
    /// Oversample the minority class with Borderline-SMOTE.
    Balance(Common),
    /// Append autoencoder reconstructions to the balanced data.
    Augment(Common),
    /// Cross-validate every enabled model.
    Evaluate(Common),
    /// Run every stage in order.
    RunAll(Common),
    /// Write the comparison table from the evaluation results.
    Report(Common),
    /// Print per-feature statistics of the cleaned dataset.
    Summary(Common),
}

#[derive(Args)]
struct Common {
    /// Pipeline config file (TOML).
    #[arg(long)]
    config: PathBuf,

    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,

    /// paper-faithful, leakage-safe or both. Overrides the config.
    #[arg(long)]
    mode: Option<String>,
}

impl Common {
    fn pipeline(&self) -> Result<Pipeline> {
        let mut cfg = PipelineConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(mode) = &self.mode {
            cfg.mode = LeakageMode::parse(mode)?;
        }
        Pipeline::new(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(c) => {
            let e = c.pipeline()?.ingest()?;
            println!(
                "ingest: {} rows, {} predictors, class counts {}/{} (positive/negative), removed {}",
                e.rows,
                e.details["predictors"],
                e.class_counts.positive,
                e.class_counts.negative,
                e.details["removed_constant_columns"]
            );
        }
        Command::Balance(c) => {
            let e = c.pipeline()?.balance()?;
            println!(
                "balance: {} rows, class counts {}/{} (positive/negative), {} synthetic",
                e.rows, e.class_counts.positive, e.class_counts.negative, e.details["synthetic_rows"]
            );
        }
        Command::Augment(c) => {
            let e = c.pipeline()?.augment()?;
            println!(
                "augment: {} rows, class counts {}/{} (positive/negative), {} reconstructions",
                e.rows, e.class_counts.positive, e.class_counts.negative, e.details["reconstructions"]
            );
        }
        Command::Evaluate(c) => {
            let p = c.pipeline()?;
            let m = p.evaluate()?;
            for run in &m.runs {
                for r in &run.models {
                    println!(
                        "{} {}: accuracy {:.2}, roc auc {:.2}",
                        run.mode.as_str(),
                        r.model,
                        100.0 * r.mean.accuracy,
                        100.0 * r.mean.roc_auc
                    );
                }
            }
        }
        Command::RunAll(c) => print!("{}", c.pipeline()?.run_all()?),
        Command::Report(c) => print!("{}", c.pipeline()?.report()?),
        Command::Summary(c) => {
            let p = c.pipeline()?;
            let path = p.out_dir().join(CLEAN_FILE);
            let bytes = std::fs::read(&path).map_err(|_| Error::MissingArtifact { path: path.clone(), stage: "ingest" })?;
            print!("{}", render_summary(&feature_summary(&read_dataset(&bytes)?)));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
