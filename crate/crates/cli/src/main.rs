use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use parlanno::config::{Config, SdConvention};
use parlanno::pipeline::{self, AnnotateOptions, PipelineError};
use tracing_subscriber::EnvFilter;

#[derive(Debug, Parser)]
#[command(name = "parlanno", version, about = "Speaker-attributed XML annotation of parliamentary diaries")]
struct Cli {
    /// Log line format on stderr.
    #[arg(long, value_enum, default_value_t = LogFormat::Text, global = true)]
    log_format: LogFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LogFormat {
    Text,
    Jsonl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sd {
    Population,
    Sample,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Annotate every diary of a directory into XML.
    Annotate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Registry file (CSV, or XML by extension). Repeat to merge several.
        #[arg(long = "registry", required = true)]
        registries: Vec<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write ambiguous speakers as unresolved.
        #[arg(long)]
        strict: bool,
        #[arg(long, env = "PARLANNO_JOBS")]
        jobs: Option<usize>,
    },
    /// Corpus statistics over emitted XML, written as stats.csv and stats.json.
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the standard deviation convention of the config.
        #[arg(long, value_enum)]
        sd: Option<Sd>,
        /// Unknown attributes are errors and skipped files fail the run.
        #[arg(long)]
        strict: bool,
        #[arg(long, env = "PARLANNO_JOBS")]
        jobs: Option<usize>,
    },
    /// Check every XML file of a corpus against the schema and invariants.
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        strict: bool,
        #[arg(long, env = "PARLANNO_JOBS")]
        jobs: Option<usize>,
    },
    /// Merge registry files and write the result as CSV or XML.
    RegistryImport {
        #[arg(long = "registry", required = true)]
        registries: Vec<PathBuf>,
        /// Target file; `.xml` selects XML, anything else CSV.
        #[arg(long)]
        output: PathBuf,
    },
}

fn init_logging(format: LogFormat) {
    let filter = EnvFilter::try_from_env("PARLANNO_LOG").unwrap_or_else(|_| EnvFilter::new("warn"));
    let builder = tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr);
    match format {
        LogFormat::Text => builder.init(),
        LogFormat::Jsonl => builder.json().init(),
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, PipelineError> {
    Ok(match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    })
}

fn jobs(j: Option<usize>) -> usize {
    j.filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from))
}

fn fatal(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Annotate {
            input,
            output,
            registries,
            config,
            strict,
            jobs: j,
        } => {
            let config = match load_config(config.as_deref()) {
                Ok(c) => c,
                Err(e) => return Ok(fatal(e)),
            };
            let opts = AnnotateOptions {
                input,
                registries,
                output,
                config,
                strict,
                jobs: jobs(j),
            };
            let summary = match pipeline::annotate(&opts) {
                Ok(s) => s,
                Err(e) => return Ok(fatal(e)),
            };
            for f in &summary.failures {
                eprintln!("failed: {}: [{}] {}", f.file, f.rule, f.message);
            }
            println!(
                "annotated {}/{} documents; stages executed {}, cached {}; warnings {}; failures {}",
                summary.succeeded,
                summary.documents,
                summary.stages_executed,
                summary.stages_cached,
                summary.warnings,
                summary.failures.len()
            );
            Ok(ExitCode::from(summary.exit_code() as u8))
        }
        Command::Stats {
            input,
            output,
            config,
            sd,
            strict,
            jobs: j,
        } => {
            let config = match load_config(config.as_deref()) {
                Ok(c) => c,
                Err(e) => return Ok(fatal(e)),
            };
            let sd = match sd {
                Some(Sd::Population) => SdConvention::Population,
                Some(Sd::Sample) => SdConvention::Sample,
                None => config.stats.sd,
            };
            let run = match pipeline::stats_command(&input, &output, strict, sd, jobs(j)) {
                Ok(r) => r,
                Err(e) => return Ok(fatal(e)),
            };
            for w in &run.warnings {
                eprintln!("warning: {w}");
            }
            for s in &run.skipped {
                eprintln!("skipped: {}: {}", s.file, s.reason);
            }
            for d in &run.duplicates {
                eprintln!("duplicate debate ignored: {d}");
            }
            print!("{}", run.stats.to_csv());
            Ok(ExitCode::from(run.exit_code() as u8))
        }
        Command::Validate { input, strict, jobs: j } => {
            let findings = match pipeline::validate_command(&input, strict, jobs(j)) {
                Ok(f) => f,
                Err(e) => return Ok(fatal(e)),
            };
            for f in &findings {
                println!("{}: {}: [{}] {}", f.file, f.path, f.rule, f.message);
            }
            Ok(if findings.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::RegistryImport { registries, output } => {
            let registry = match pipeline::load_registries(&registries) {
                Ok(r) => r,
                Err(e) => return Ok(fatal(e)),
            };
            let xml = output
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("xml"));
            let text = if xml { registry.to_xml() } else { registry.to_csv() };
            std::fs::write(&output, text).with_context(|| format!("writing {}", output.display()))?;
            println!("{} people written to {}", registry.len(), output.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.log_format);
    match run(cli) {
        Ok(code) => code,
        Err(e) => fatal(format!("{e:#}")),
    }
}
