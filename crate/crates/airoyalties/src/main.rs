use std::path::PathBuf;
use std::process::ExitCode;

use airoyalties::commands::{self, CliError, OutputFormat};
use airoyalties_core::rulings::{MetricSource, Thresholds};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Copyright similarity metric and compensation-scheme simulator.
#[derive(Debug, Parser)]
#[command(name = "airoyalties", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate an embedding file and print a summary.
    Ingest {
        #[arg(long)]
        store: PathBuf,
        /// Rewrite the store in canonical form.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-label count, mean and standard deviation of the metric.
    Stats(DatasetArgs),
    /// Metric between two works and its verdict.
    Classify {
        #[arg(long)]
        store: PathBuf,
        id_a: String,
        id_b: String,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Derive threshold bands from class means.
    Calibrate(DatasetArgs),
    /// Verdict counts per ruling label and accuracy.
    Evaluate {
        #[command(flatten)]
        data: DatasetArgs,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Run the compensation scenarios in a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Binned metric counts per label, for plotting.
    Histogram {
        #[command(flatten)]
        data: DatasetArgs,
        #[arg(long, default_value_t = 0.05)]
        bin_width: f64,
    },
}

#[derive(Debug, Args)]
struct DatasetArgs {
    #[arg(long)]
    cases: PathBuf,
    /// Embeddings; adds the uncontested population and enables `--source computed`.
    #[arg(long)]
    store: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Source::Stored)]
    source: Source,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long, default_value_t = 0.6)]
    safe_max: f64,
    #[arg(long = "fairuse-max", default_value_t = 0.7)]
    fair_use_max: f64,
}

impl ThresholdArgs {
    fn thresholds(&self) -> Result<Thresholds, CliError> {
        Ok(Thresholds::new(self.safe_max, self.fair_use_max)?)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Source {
    Stored,
    Computed,
}

impl From<Source> for MetricSource {
    fn from(s: Source) -> Self {
        match s {
            Source::Stored => MetricSource::Stored,
            Source::Computed => MetricSource::Computed,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Table,
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Ingest { store, out } => commands::ingest(&store, out.as_deref()),
        Command::Stats(d) => commands::stats(&d.cases, d.store.as_deref(), d.source.into()),
        Command::Classify {
            store,
            id_a,
            id_b,
            thresholds,
        } => commands::classify_pair(&store, &id_a, &id_b, &thresholds.thresholds()?),
        Command::Calibrate(d) => {
            commands::calibrate_cmd(&d.cases, d.store.as_deref(), d.source.into())
        }
        Command::Evaluate { data, thresholds } => commands::evaluate_cmd(
            &data.cases,
            data.store.as_deref(),
            data.source.into(),
            &thresholds.thresholds()?,
        ),
        Command::Simulate { config, format } => commands::simulate(
            &config,
            match format {
                Format::Csv => OutputFormat::Csv,
                Format::Table => OutputFormat::Table,
            },
        ),
        Command::Histogram { data, bin_width } => commands::histogram_cmd(
            &data.cases,
            data.store.as_deref(),
            data.source.into(),
            bin_width,
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
