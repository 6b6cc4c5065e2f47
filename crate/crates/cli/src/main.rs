//! `tdn`: frequency tables, diversity reports and richness correlations.
//!
//! Exit status: 0 on success, 1 on data or runtime errors, 2 on usage errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use tdn_diversity::ingest::{self, IngestConfig, OnMalformed};
use tdn_diversity::report::{correlate_reports, AnalysisReport, DEFAULT_FRACTIONS};
use tdn_diversity::simulate::{generate, AbundanceModel, PopulationSpec};
use tdn_diversity::{Error, Execution, Fraction, MetricKind, ProportionMode, SubsampleSpec};

#[derive(Debug, Parser)]
#[command(
    name = "tdn",
    version,
    about = "Diversity and evenness of contributor frequency distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a frequency table from line-delimited JSON records.
    Ingest(IngestArgs),
    /// Compute the metric suite for the full table and its top fractions.
    Analyze(AnalyzeArgs),
    /// Correlate subsample richness with a metric across analysis reports.
    Correlate(CorrelateArgs),
    /// Generate a synthetic frequency table.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Record archive, plain or gzip-compressed.
    #[arg(long)]
    input: PathBuf,
    /// Dot-separated path to the contributor id, e.g. `user.id_str`.
    #[arg(long)]
    id_path: String,
    #[arg(long, value_enum, default_value_t = MalformedPolicy::Skip)]
    on_malformed: MalformedPolicy,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Number of shards processed concurrently (1 streams in constant memory).
    #[arg(long, default_value_t = default_shards())]
    shards: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MalformedPolicy {
    Skip,
    Abort,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Frequency-table CSV written by `ingest` or `simulate`.
    #[arg(long)]
    freq: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_FRACTIONS.to_vec())]
    fractions: Vec<Fraction>,
    #[arg(long, default_value_t = ProportionMode::Truncated)]
    mode: ProportionMode,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Dataset name recorded in the report (defaults to the file stem).
    #[arg(long)]
    name: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Args)]
struct CorrelateArgs {
    /// JSON reports written by `analyze`.
    #[arg(long, num_args = 1.., required = true)]
    reports: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = XAxis::Richness)]
    x: XAxis,
    #[arg(long)]
    y: MetricKind,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum XAxis {
    Richness,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// uniform, geometric, zipf or lognormal.
    #[arg(long)]
    model: String,
    #[arg(long)]
    richness: usize,
    /// Geometric ratio, Zipf exponent or lognormal sigma.
    #[arg(long)]
    param: Option<f64>,
    #[arg(long)]
    individuals: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn default_shards() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Correlate(args) => cmd_correlate(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn cmd_ingest(args: IngestArgs) -> CmdResult {
    let policy = match args.on_malformed {
        MalformedPolicy::Skip => OnMalformed::SkipAndCount,
        MalformedPolicy::Abort => OnMalformed::Abort,
    };
    let cfg =
        IngestConfig::new(&args.id_path, policy).map_err(|e| Failure::Usage(e.to_string()))?;
    let report = ingest::ingest_path(&args.input, &cfg, args.shards, Execution::default())
        .with_context(|| format!("ingesting {}", args.input.display()))?;
    ingest::save_table(&report.table, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!(
        "records_read={} records_counted={} records_skipped={} contributors={} contributions={}",
        report.records_read,
        report.records_counted,
        report.records_skipped,
        report.table.richness(),
        report.table.total(),
    );
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> CmdResult {
    let table = ingest::load_table(&args.freq)
        .with_context(|| format!("reading {}", args.freq.display()))?;
    let specs: Vec<SubsampleSpec> = args
        .fractions
        .iter()
        .map(|&f| SubsampleSpec::new(f, args.mode))
        .collect();
    let name = args.name.unwrap_or_else(|| file_stem(&args.freq));
    let report = match AnalysisReport::build(name, &table, &specs, Execution::default()) {
        Ok(r) => r,
        Err(e @ Error::DuplicateFraction(_)) => return Err(Failure::Usage(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let text = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Table => report.to_table(),
    };
    emit(&text, args.out.as_deref())
}

fn cmd_correlate(args: CorrelateArgs) -> CmdResult {
    let XAxis::Richness = args.x;
    let mut reports = Vec::with_capacity(args.reports.len());
    for path in &args.reports {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let report = AnalysisReport::from_json(&text)
            .with_context(|| format!("parsing report {}", path.display()))?;
        reports.push(report);
    }
    let result = correlate_reports(&reports, args.y)?;
    emit(&result.to_json(), None)
}

fn cmd_simulate(args: SimulateArgs) -> CmdResult {
    let spec = AbundanceModel::from_name(&args.model, args.param)
        .map(|model| PopulationSpec {
            model,
            richness: args.richness,
            individuals: args.individuals,
            seed: args.seed,
        })
        .and_then(|spec| spec.validate().map(|()| spec))
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let table = generate(&spec)?;
    ingest::save_table(&table, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    if spec.effective_richness() < spec.richness {
        eprintln!(
            "note: richness clamped to {} (one contribution per contributor)",
            spec.effective_richness()
        );
    }
    Ok(())
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_owned())
}

fn emit(text: &str, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .context("writing to standard output")?;
        }
    }
    Ok(())
}
