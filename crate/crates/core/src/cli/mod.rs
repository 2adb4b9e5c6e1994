//! The `neuroami` command line: `encode`, `predict` and `report`.
//!
//! Exit codes: 0 on success, 1 for input or data errors, 2 for
//! configuration and usage errors. All output is deterministic.

pub mod config;
mod svg;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::encoder::{EncodeError, Encoding};
use crate::ingest::{read_numeric_series, read_text_corpus, Corpus, IngestError};
use crate::pipeline::{self, baseline_persistence, decode_trace, run_continual, PipelineError, PredictionTrace};

pub use config::{CliConfig, ConfigError, ConfigFlags, Origin};

#[derive(Debug, Parser)]
#[command(
    name = "neuroami",
    version,
    about = "Integer-class encoder and continual deviant-mean predictor"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a corpus into integer classes and print the sensor memory
    Encode(EncodeArgs),
    /// Run continual training and testing, writing the prediction trace
    Predict(PredictArgs),
    /// Turn a prediction trace into its cumulative MAPE series
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// Input file, or `-` for standard input
    #[arg(long, default_value = "-", value_name = "PATH|-")]
    pub input: String,
    /// Output file (standard output when omitted)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub config: ConfigFlags,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub config: ConfigFlags,
    /// Append the persistence-baseline trace
    #[arg(long)]
    pub baseline: bool,
    /// Append decoded symbol pairs for the test steps
    #[arg(long)]
    pub decode: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Also write the series as an SVG line chart
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EncodeError> for CliError {
    fn from(e: EncodeError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Encode(args) => cmd_encode(&args, stdin, stdout),
        Command::Predict(args) => cmd_predict(&args, stdin, stdout, stderr),
        Command::Report(args) => cmd_report(&args, stdin, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let kind = match e {
                CliError::Config(_) => "configuration error",
                CliError::Input(_) => "error",
            };
            let _ = writeln!(stderr, "{kind}: {e}");
            e.exit_code()
        }
    }
}

fn open_input<'a>(path: &str, stdin: &'a mut dyn Read) -> Result<Box<dyn Read + 'a>, CliError> {
    if path == "-" {
        Ok(Box::new(stdin))
    } else {
        File::open(path)
            .map(|f| Box::new(io::BufReader::new(f)) as Box<dyn Read>)
            .map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))
    }
}

fn create_output(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn load_corpus(io: &IoArgs, numeric: bool, stdin: &mut dyn Read) -> Result<Corpus, CliError> {
    let reader = open_input(&io.input, stdin)?;
    let corpus = if numeric {
        read_numeric_series(reader)
    } else {
        read_text_corpus(reader)
    }
    .map_err(|e| CliError::Input(format!("{}: {e}", io.input)))?;
    Ok(corpus.with_source(io.input.clone()))
}

/// Reference and class-level problems are configuration errors even though
/// they surface while encoding.
fn encode_corpus(corpus: &Corpus, config: &CliConfig) -> Result<Encoding, CliError> {
    config.encoder().encode(corpus.items()).map_err(|e| match e {
        EncodeError::BadReference { .. } => CliError::Config(ConfigError::Invalid {
            field: "reference",
            origin: Origin::Default,
            message: e.to_string(),
        }),
        other => other.into(),
    })
}

/// Writes the encoded table followed by the sensor-memory section.
pub fn write_encoding<W: Write>(encoding: &Encoding, corpus: &Corpus, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row_index", "symbol", "match_value", "scale", "class"])?;
    for (i, (symbol, score)) in corpus.items().iter().zip(&encoding.scores).enumerate() {
        w.write_record([
            i.to_string(),
            symbol.clone(),
            score.value().to_string(),
            format!("{:.6}", score.scale_f64()),
            encoding.classes.classes()[i].to_string(),
        ])?;
    }
    let mut out = w.into_inner().map_err(|e| CliError::Input(e.error().to_string()))?;
    writeln!(out)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["class", "symbol"])?;
    for (class, symbol) in encoding.memory.iter() {
        w.write_record([class.to_string(), symbol.unwrap_or("[]").to_owned()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_encode(args: &EncodeArgs, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = CliConfig::resolve(&args.config)?;
    let corpus = load_corpus(&args.io, config.numeric, stdin)?;
    let encoding = encode_corpus(&corpus, &config)?;
    match &args.io.out {
        Some(path) => {
            let mut file = create_output(path)?;
            write_encoding(&encoding, &corpus, &mut file)?;
            file.flush()?;
        }
        None => write_encoding(&encoding, &corpus, stdout)?,
    }
    Ok(())
}

fn write_decoded<W: Write>(trace: &PredictionTrace<f64>, encoding: &Encoding, out: W) -> Result<(), CliError> {
    let decoded = decode_trace(trace, &encoding.memory)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "predicted_symbol", "expected_symbol", "exact"])?;
    for d in decoded.iter().filter(|d| d.phase == pipeline::Phase::Test) {
        w.write_record([
            d.index.to_string(),
            d.predicted_symbol.clone(),
            d.expected_symbol.clone(),
            d.exact.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_prediction_document<W: Write + ?Sized>(
    out: &mut W,
    trace: &PredictionTrace<f64>,
    baseline: Option<&PredictionTrace<f64>>,
    decoded: Option<&Encoding>,
) -> Result<(), CliError> {
    trace.write_csv(&mut *out)?;
    if let Some(b) = baseline {
        writeln!(out)?;
        writeln!(out, "# persistence baseline")?;
        b.write_csv(&mut *out)?;
    }
    if let Some(encoding) = decoded {
        writeln!(out)?;
        writeln!(out, "# decoded test steps")?;
        write_decoded(trace, encoding, &mut *out)?;
    }
    Ok(())
}

fn write_summary<W: Write + ?Sized>(
    out: &mut W,
    split: usize,
    trace: &PredictionTrace<f64>,
    baseline: Option<&PredictionTrace<f64>>,
) -> Result<(), CliError> {
    let exact: Vec<u32> = trace
        .test_steps()
        .filter(|s| s.abs_error == 0)
        .map(|s| s.expected_class)
        .collect();
    let mut by_class: Vec<(u32, usize)> = Vec::new();
    for c in &exact {
        match by_class.iter_mut().find(|(k, _)| k == c) {
            Some((_, n)) => *n += 1,
            None => by_class.push((*c, 1)),
        }
    }
    by_class.sort_unstable();
    let by_class: Vec<String> = by_class.iter().map(|(c, n)| format!("{c}={n}")).collect();
    let (final_mape, _) = pipeline::mape(trace)?;
    let final_mean = trace.steps.last().map(|s| s.deviant_mean_after).unwrap_or(0.0);

    writeln!(out, "train_elements: {split}")?;
    writeln!(out, "train_steps: {}", trace.train_count())?;
    writeln!(out, "test_steps: {}", trace.test_count())?;
    writeln!(out, "exact_test_matches: {}", exact.len())?;
    writeln!(out, "exact_test_matches_by_class: {}", by_class.join(" "))?;
    writeln!(out, "final_mape: {final_mape:.6}")?;
    writeln!(out, "final_deviant_mean: {final_mean:.6}")?;
    if let Some(b) = baseline {
        writeln!(out, "baseline_final_mape: {:.6}", pipeline::mape(b)?.0)?;
    }
    Ok(())
}

pub fn cmd_predict(
    args: &PredictArgs,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let config = CliConfig::resolve(&args.config)?;
    let corpus = load_corpus(&args.io, config.numeric, stdin)?;
    let encoding = encode_corpus(&corpus, &config)?;
    let run = config.run_config();
    let split = pipeline::split_index(encoding.classes.len(), run.train_fraction)?;
    let trace = run_continual(&encoding.classes, &run)?;
    let baseline = if args.baseline {
        Some(baseline_persistence(&encoding.classes, &run)?)
    } else {
        None
    };
    let decoded = args.decode.then_some(&encoding);

    match &args.io.out {
        Some(path) => {
            let mut file = create_output(path)?;
            write_prediction_document(&mut file, &trace, baseline.as_ref(), decoded)?;
            file.flush()?;
            write_summary(stdout, split, &trace, baseline.as_ref())?;
        }
        None => {
            write_prediction_document(stdout, &trace, baseline.as_ref(), decoded)?;
            write_summary(stderr, split, &trace, baseline.as_ref())?;
        }
    }
    Ok(())
}

pub fn cmd_report(args: &ReportArgs, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<(), CliError> {
    let reader = open_input(&args.io.input, stdin)?;
    let trace =
        PredictionTrace::<f64>::read_csv(reader).map_err(|e| CliError::Input(format!("{}: {e}", args.io.input)))?;
    let (_, series) = pipeline::mape(&trace)?;

    let write_series = |out: &mut dyn Write| -> io::Result<()> {
        writeln!(out, "test_step,cumulative_mape")?;
        for (i, m) in series.iter().enumerate() {
            writeln!(out, "{},{m:.6}", i + 1)?;
        }
        out.flush()
    };
    match &args.io.out {
        Some(path) => write_series(&mut create_output(path)?)?,
        None => write_series(stdout)?,
    }
    if let Some(path) = &args.svg {
        let mut file = create_output(path)?;
        file.write_all(svg::line_chart(&series).as_bytes())?;
        file.flush()?;
    }
    Ok(())
}
