use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tmsv_decoherence::amplitude::{DEFAULT_DEFICIT_CEILING, DEFAULT_EPS_BLOCK};
use tmsv_decoherence::oracle::{OracleModel, DEFAULT_ORACLE_TRUNC};
use tmsv_decoherence::phase::DEFAULT_TRUNCATION;
use tmsv_decoherence::sweep::{
    emit_border, pure_table, run_sweep, write_border, write_pure, write_table, Grid, Model,
    OutputFormat, SweepConfig,
};
use tmsv_decoherence::tmsv::DEFAULT_TAIL_CEILING;
use tmsv_decoherence::verify::{run_verify, VerifyRequest};
use tmsv_decoherence::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "tmsv",
    version,
    about = "Entanglement of two-mode squeezed vacuum under phase and thermal amplitude damping"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form entanglement of the undamped state over an r grid.
    Pure {
        #[command(flatten)]
        r: RGrid,
        #[command(flatten)]
        out: Output,
    },
    /// Exact relative entropy of entanglement under phase damping.
    Phase {
        #[command(flatten)]
        r: RGrid,
        #[command(flatten)]
        d: PhaseDGrid,
        #[command(flatten)]
        numerics: NumericArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Convexity upper bound under thermal amplitude damping, with the separability flag.
    Amplitude {
        #[command(flatten)]
        r: RGrid,
        #[command(flatten)]
        d: AmplitudeDGrid,
        /// Mean photon number of the thermal bath.
        #[arg(long, default_value_t = 0.01)]
        nbar: f64,
        #[command(flatten)]
        numerics: NumericArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Separability border d*(r) for a thermal bath.
    Border {
        #[command(flatten)]
        r: RGrid,
        #[arg(long, default_value_t = 0.01)]
        nbar: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Compare the closed-form damped state with an RK4 master-equation solution.
    Verify {
        #[arg(value_enum)]
        model: VerifyModel,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, default_value_t = 0.3)]
        d: f64,
        /// Bath occupation (amplitude model only).
        #[arg(long, default_value_t = 0.1)]
        nbar: f64,
        /// Per-mode photon truncation of the oracle.
        #[arg(long, default_value_t = DEFAULT_ORACLE_TRUNC)]
        oracle_trunc: usize,
        /// RK4 steps; default keeps gamma*dt <= 1e-3.
        #[arg(long)]
        oracle_steps: Option<usize>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RGrid {
    #[arg(long, default_value_t = 0.0)]
    r_min: f64,
    #[arg(long, default_value_t = 1.5)]
    r_max: f64,
    /// Number of r values (endpoints included).
    #[arg(long, default_value_t = 16)]
    r_steps: usize,
}

#[derive(Args, Debug)]
struct PhaseDGrid {
    #[arg(long, default_value_t = 0.0)]
    d_min: f64,
    #[arg(long, default_value_t = 2.0)]
    d_max: f64,
    /// Number of d values (endpoints included).
    #[arg(long, default_value_t = 21)]
    d_steps: usize,
}

#[derive(Args, Debug)]
struct AmplitudeDGrid {
    #[arg(long, default_value_t = 0.0)]
    d_min: f64,
    #[arg(long, default_value_t = 1.2)]
    d_max: f64,
    /// Number of d values (endpoints included).
    #[arg(long, default_value_t = 13)]
    d_steps: usize,
}

#[derive(Args, Debug)]
struct NumericArgs {
    /// Photon-number truncation N (raised per point to meet --tail-ceiling unless --fixed-trunc).
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    trunc: usize,
    /// Use --trunc exactly at every point.
    #[arg(long)]
    fixed_trunc: bool,
    /// Raw block weight below which the k-expansion stops.
    #[arg(long, default_value_t = DEFAULT_EPS_BLOCK)]
    eps_block: f64,
    /// Largest tolerated squeezed-vacuum mass above N.
    #[arg(long, default_value_t = DEFAULT_TAIL_CEILING)]
    tail_ceiling: f64,
    /// Largest tolerated trace deficit of the block decomposition.
    #[arg(long, default_value_t = DEFAULT_DEFICIT_CEILING)]
    deficit_ceiling: f64,
    /// Worker threads; output does not depend on this.
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VerifyModel {
    Phase,
    Amplitude,
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

enum Failure {
    Usage(String),
    Numerical(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn open_output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn r_grid(args: &RGrid) -> Result<Grid, Error> {
    Grid::new(args.r_min, args.r_max, args.r_steps)
}

fn sweep_config(
    model: Model,
    r: &RGrid,
    d_grid: Result<Grid, Error>,
    nbar: f64,
    numerics: &NumericArgs,
    format: Format,
) -> Result<SweepConfig, Error> {
    Ok(SweepConfig {
        model,
        r_grid: r_grid(r)?,
        d_grid: d_grid?,
        nbar,
        truncation: numerics.trunc,
        auto_truncation: !numerics.fixed_trunc,
        eps_block: numerics.eps_block,
        tail_ceiling: numerics.tail_ceiling,
        deficit_ceiling: numerics.deficit_ceiling,
        workers: numerics.workers,
        format: format.into(),
    })
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Pure { r, out } => {
            let rows = pure_table(r_grid(&r)?)?;
            let mut w = open_output(&out.output)?;
            write_pure(&rows, out.format.into(), &mut w)?;
            w.flush()?;
        }
        Command::Phase {
            r,
            d,
            numerics,
            out,
        } => {
            let cfg = sweep_config(
                Model::Phase,
                &r,
                Grid::new(d.d_min, d.d_max, d.d_steps),
                0.0,
                &numerics,
                out.format,
            )?;
            let table = run_sweep(&cfg)?;
            let mut w = open_output(&out.output)?;
            write_table(&table, cfg.format, &mut w)?;
            w.flush()?;
        }
        Command::Amplitude {
            r,
            d,
            nbar,
            numerics,
            out,
        } => {
            let cfg = sweep_config(
                Model::Amplitude,
                &r,
                Grid::new(d.d_min, d.d_max, d.d_steps),
                nbar,
                &numerics,
                out.format,
            )?;
            let table = run_sweep(&cfg)?;
            let mut w = open_output(&out.output)?;
            write_table(&table, cfg.format, &mut w)?;
            w.flush()?;
        }
        Command::Border { r, nbar, out } => {
            let rows = emit_border(r_grid(&r)?, nbar)?;
            let mut w = open_output(&out.output)?;
            write_border(&rows, nbar, out.format.into(), &mut w)?;
            w.flush()?;
        }
        Command::Verify {
            model,
            r,
            d,
            nbar,
            oracle_trunc,
            oracle_steps,
            format,
            output,
        } => {
            let request = VerifyRequest {
                model: match model {
                    VerifyModel::Phase => OracleModel::Phase,
                    VerifyModel::Amplitude => OracleModel::Amplitude { nbar },
                },
                r,
                d,
                oracle_trunc,
                steps: oracle_steps,
            };
            let report = run_verify(&request)?;
            let mut w = open_output(&output)?;
            match format {
                ReportFormat::Text => w.write_all(report.to_text().as_bytes())?,
                ReportFormat::Json => {
                    serde_json::to_writer_pretty(&mut w, &report).map_err(io::Error::from)?;
                    w.write_all(b"\n")?;
                }
            }
            w.flush()?;
            return Ok(report.passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
