//! `pcmlab`: prioritization, consistency measures and simulation studies
//! for pairwise comparison matrices.

mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pcmlab::{ConsistencyMeasure, JudgmentScale, PrioritizationMethod, Reciprocity};

#[derive(Debug, Parser)]
#[command(name = "pcmlab", version, about, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the priority vector of a matrix file.
    Prioritize(PrioritizeArgs),
    /// Print consistency measures of a matrix file.
    Consistency(ConsistencyArgs),
    /// Run the hierarchy-level study; writes records.csv, summary.csv and a manifest.
    Sa1(StudyArgs),
    /// Run the single-matrix study; writes records.csv, summary.csv and a manifest.
    Sa2(StudyArgs),
    /// Bin a records CSV on one measure column and score each MAE series.
    Report(ReportArgs),
    /// Run the built-in golden checks.
    Validate,
}

#[derive(Debug, Args)]
struct MatrixArgs {
    /// Matrix CSV; entries are decimals or p/q rationals.
    matrix: PathBuf,
    /// Force the reciprocity mode instead of inferring it.
    #[arg(long)]
    mode: Option<Reciprocity>,
    /// Round judgments onto a scale first: saaty, geometric, numeric:N.
    #[arg(long)]
    scale: Option<JudgmentScale>,
}

#[derive(Debug, Args)]
struct PrioritizeArgs {
    #[command(flatten)]
    input: MatrixArgs,
    /// rev, llsm (or gm), lua, srdm, sncs.
    #[arg(long, default_value = "rev")]
    method: PrioritizationMethod,
}

#[derive(Debug, Args)]
struct ConsistencyArgs {
    #[command(flatten)]
    input: MatrixArgs,
    /// Comma-separated measure columns or labels; default all.
    #[arg(long, value_delimiter = ',')]
    measures: Vec<ConsistencyMeasure>,
}

#[derive(Debug, Args)]
struct StudyArgs {
    /// Flat TOML config; keys override the named preset.
    config: Option<PathBuf>,
    /// Start from a named preset instead of the file's.
    #[arg(long)]
    preset: Option<String>,
    /// Overrides the config seed.
    #[arg(long, env = "PCMLAB_SEED")]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Records CSV written by `sa2`.
    records: PathBuf,
    /// Measure column to bin on.
    #[arg(long, default_value = "cm_lti2")]
    measure: String,
    /// Number of quantile bins.
    #[arg(long, default_value_t = pcmlab::simulation::BIN_COUNT)]
    bins: usize,
    /// Output directory; without it the report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Prioritize(a) => commands::prioritize(&a.input.matrix, a.input.mode, a.input.scale, a.method),
        Command::Consistency(a) => commands::consistency(&a.input.matrix, a.input.mode, a.input.scale, &a.measures),
        Command::Sa1(a) => commands::sa1(&a.study()),
        Command::Sa2(a) => commands::sa2(&a.study()),
        Command::Report(a) => commands::report(&a.records, &a.measure, a.bins, a.out.as_deref()),
        Command::Validate => commands::validate(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl StudyArgs {
    fn study(&self) -> commands::Study<'_> {
        commands::Study {
            config: self.config.as_deref(),
            preset: self.preset.as_deref(),
            seed: self.seed,
            out: &self.out,
            workers: self
                .workers
                .map_or_else(pcmlab::simulation::default_workers, |w| w as usize),
        }
    }
}
