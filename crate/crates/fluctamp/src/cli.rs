//! Argument definitions and the top-level dispatcher.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::commands;
use crate::error::{CliError, Result};
use crate::table::Table;

#[derive(Parser, Debug, Clone, Serialize)]
#[command(
    name = "fluctamp",
    version,
    about = "Heralded noiseless amplifier: curves, branches, optimization and validation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Gain and fidelities of the amplified branch against |α| for several reflectivities.
    Curves(CurvesArgs),
    /// Wigner functions of the amplified output sampled on a square grid.
    WignerGrid(WignerGridArgs),
    /// Probabilities and outputs of all single-photon detector patterns.
    Branches(BranchesArgs),
    /// Maximum success probability for one minimum-gain requirement.
    Optimize(OptimizeArgs),
    /// Maximum success probability over a range of minimum gains.
    Sweep(SweepArgs),
    /// Cross-checks of the phase-space engine, closed forms and number-basis oracle.
    Validate(ValidateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Curves(_) => "curves",
            Command::WignerGrid(_) => "wigner-grid",
            Command::Branches(_) => "branches",
            Command::Optimize(_) => "optimize",
            Command::Sweep(_) => "sweep",
            Command::Validate(_) => "validate",
        }
    }

    fn output(&self) -> &OutputArgs {
        match self {
            Command::Curves(a) => &a.out,
            Command::WignerGrid(a) => &a.out,
            Command::Branches(a) => &a.out,
            Command::Optimize(a) => &a.out,
            Command::Sweep(a) => &a.out,
            Command::Validate(a) => &a.out,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; `-` writes to stdout.
    #[arg(long, default_value = "-")]
    pub output: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CurvesArgs {
    /// Largest input amplitude |α| of the curve.
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Number of amplitudes, evenly spaced in (0, alpha].
    #[arg(long, default_value_t = 40)]
    pub grid: usize,
    /// Reflectivities, one curve each.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.25, 0.4])]
    pub r: Vec<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WignerGridArgs {
    /// Input amplitudes, one grid each.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 1.0])]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 0.4)]
    pub r: f64,
    /// Points per axis over [-6, 6].
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ReflectivityArgs {
    /// Reflectivity shared by all three beam splitters.
    #[arg(long, default_value_t = 0.4)]
    pub r: f64,
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub r2: Option<f64>,
    #[arg(long)]
    pub r3: Option<f64>,
}

impl ReflectivityArgs {
    pub fn resolved(&self) -> [f64; 3] {
        [self.r1.unwrap_or(self.r), self.r2.unwrap_or(self.r), self.r3.unwrap_or(self.r)]
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BranchesArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[command(flatten)]
    pub reflectivity: ReflectivityArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OptimizeArgs {
    #[arg(long, default_value_t = 1.4)]
    pub g_min: f64,
    #[arg(long, default_value_t = fluctamp_core::optimizer::DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1.05)]
    pub g_min: f64,
    #[arg(long, default_value_t = 1.95)]
    pub g_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long, default_value_t = fluctamp_core::optimizer::DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ValidateArgs {
    /// Photon-number cutoff of the number-basis oracle.
    #[arg(long, default_value_t = fluctamp_core::fock::DEFAULT_CUTOFF)]
    pub cutoff: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Metadata block of JSON output.
pub fn meta(cli: &Cli) -> serde_json::Value {
    json!({
        "artifact": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "config": cli.command,
    })
}

fn write_table(cli: &Cli, table: &Table) -> Result<()> {
    let out = cli.command.output();
    let sink: Box<dyn Write> =
        if out.output == "-" { Box::new(io::stdout().lock()) } else { Box::new(File::create(&out.output)?) };
    let mut sink = BufWriter::new(sink);
    match out.format {
        Format::Csv => table.write_csv(&mut sink)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &table.to_json(meta(cli)))?;
            sink.write_all(b"\n")?;
        }
    }
    sink.flush()?;
    Ok(())
}

/// Runs a parsed command and writes its table. A failed validation still
/// writes the report before returning the error.
pub fn execute(cli: &Cli) -> Result<()> {
    let (table, verdict) = match &cli.command {
        Command::Curves(a) => (commands::curves(a)?, Ok(())),
        Command::WignerGrid(a) => (commands::wigner_grid(a)?, Ok(())),
        Command::Branches(a) => (commands::branches(a)?, Ok(())),
        Command::Optimize(a) => (commands::optimize(a)?, Ok(())),
        Command::Sweep(a) => (commands::sweep(a)?, Ok(())),
        Command::Validate(a) => {
            let report = commands::validate(a)?;
            let verdict =
                if report.passed() { Ok(()) } else { Err(CliError::Validation(report.failures().join(", "))) };
            (report.table, verdict)
        }
    };
    write_table(cli, &table)?;
    verdict
}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("fluctamp: {e}");
            e.exit_code()
        }
    }
}
