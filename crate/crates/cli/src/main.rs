use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use qdphonon::selftest::run_selftest;
use qdphonon::sweep::{
    compare_modes, read_rows, run_to, CsvSink, Format, JsonSink, Mode, RowSink, RunConfig,
    SweepAxis, ThermalReference,
};

#[derive(Parser)]
#[command(
    name = "qdphonon",
    version,
    about = "Steady-state phonon statistics of a driven quantum dot"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output`; `-` writes to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = parse_format)]
        format: Option<Format>,
        /// Comma-separated, e.g. `secular,beyond_secular,oracle_labframe`.
        #[arg(long, value_delimiter = ',', value_parser = parse_mode)]
        modes: Option<Vec<Mode>>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Compare secular and beyond-secular rows of a results file.
    Compare {
        #[arg(long)]
        input: PathBuf,
        /// Thermal occupation that defines cooling.
        #[arg(long, conflicts_with = "config")]
        nbar: Option<f64>,
        /// Take the thermal occupation from the run config instead.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Thermal fixed point, closure and oracle agreement checks.
    Selftest,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: qdphonon::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: qdphonon::Error| e.to_string())
}

fn format_for(path: Option<&Path>, explicit: Option<Format>, configured: Format) -> Format {
    explicit
        .or_else(|| match path?.extension()?.to_str()? {
            "json" => Some(Format::Json),
            "csv" => Some(Format::Csv),
            _ => None,
        })
        .unwrap_or(configured)
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    config_path: &Path,
    output: Option<PathBuf>,
    format: Option<Format>,
    modes: Option<Vec<Mode>>,
    points: Option<usize>,
    threads: Option<usize>,
) -> Result<()> {
    let mut config = RunConfig::load(config_path)
        .with_context(|| format!("reading config {}", config_path.display()))?;
    if let Some(mut m) = modes {
        m.sort();
        m.dedup();
        config.modes = m;
    }
    if let Some(p) = points {
        config.sweep.points = p;
    }
    if let Some(t) = threads {
        config.threads = t;
    }
    let output = output.or_else(|| config.output.clone());
    let to_stdout = output.as_deref().is_none_or(|p| p == Path::new("-"));
    let format = format_for(
        output.as_deref().filter(|_| !to_stdout),
        format,
        config.format,
    );
    config.validate()?;

    let writer: Box<dyn Write> = if to_stdout {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        let path = output.as_deref().unwrap();
        Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        ))
    };
    let mut sink: Box<dyn RowSink> = match format {
        Format::Csv => Box::new(CsvSink::new(writer)?),
        Format::Json => Box::new(JsonSink::new(writer)?),
    };
    let result = run_to(&config, Some(sink.as_mut()))?;
    let failed = result.rows.iter().filter(|r| !r.is_ok()).count();
    eprintln!(
        "{} rows ({} points x {} modes), {} failed",
        result.rows.len(),
        config.sweep.points,
        config.modes.len(),
        failed
    );
    Ok(())
}

fn cmd_compare(input: &Path, nbar: Option<f64>, config: Option<PathBuf>, json: bool) -> Result<()> {
    let reference = match (nbar, config) {
        (Some(n), _) => ThermalReference::Constant(n),
        (None, Some(path)) => {
            let c = RunConfig::load(&path)
                .with_context(|| format!("reading config {}", path.display()))?;
            if c.sweep.axis == SweepAxis::Nbar {
                ThermalReference::SweepValue
            } else {
                ThermalReference::Constant(c.params.nbar)
            }
        }
        (None, None) => bail!("give --nbar or --config so cooling can be judged against n̄"),
    };
    let rows = read_rows(input).with_context(|| format!("reading {}", input.display()))?;
    let report = compare_modes(&rows, reference)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{report}");
    }
    Ok(())
}

fn cmd_selftest() -> bool {
    let outcomes = run_selftest();
    for o in &outcomes {
        println!("{o}");
    }
    outcomes.iter().all(|o| o.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            output,
            format,
            modes,
            points,
            threads,
        } => cmd_run(&config, output, format, modes, points, threads),
        Command::Compare {
            input,
            nbar,
            config,
            json,
        } => cmd_compare(&input, nbar, config, json),
        Command::Selftest => {
            return if cmd_selftest() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
