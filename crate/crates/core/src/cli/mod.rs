//! Command-line front end. Exit codes: 0 all checks pass, 1 a claim check
//! failed, 2 invalid usage or input, 3 output I/O failure.

mod commands;
mod manifest;
mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::{DefectEntry, DefectReport};
pub use manifest::{run_manifest_path, CheckOutcome, RunManifest};
pub use verify::{claim_suite, CheckRow, SuiteOutcome};

use crate::error::Error;
use crate::ledger::UnitSystem;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CLAIM: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "defectfield", version, about = "Singular wave fields, their defects and their topological indices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a model descriptor on a grid and write a field manifest plus payload.
    Generate {
        /// Descriptor JSON, either a file path or inline JSON text.
        #[arg(long)]
        model: String,
        /// Nodes per axis, `nx,ny,nz`.
        #[arg(long, value_delimiter = ',', default_values_t = [64usize, 64, 8])]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1f64, 0.1, 0.1])]
        spacing: Vec<f64>,
        /// Grid centre, `x,y,z`.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0f64, 0.0, 0.0], allow_negative_numbers = true)]
        center: Vec<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        time: f64,
        /// Manifest path; the payload goes next to it with a `.bin` extension.
        #[arg(long)]
        out: PathBuf,
    },
    /// Locate dislocations (scalar fields) or disclinations (potentials) in one z slice.
    Detect {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value_t = 0)]
        slice: usize,
        /// Report path; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the claim suite on a disclination descriptor.
    ///
    /// CSV columns: check, measured, expected, tolerance, h, order, pass.
    /// Residual CSV columns: name, h, max, rms, order.
    Verify {
        #[arg(long)]
        model: String,
        /// Grid levels for the wave-equation convergence study.
        #[arg(long, default_value_t = 3)]
        refinements: usize,
        #[arg(long)]
        out: PathBuf,
        /// Optional residual table for plotting.
        #[arg(long)]
        residuals: Option<PathBuf>,
    },
    /// Discrete exterior calculus demonstrations, printed as JSON.
    Forms {
        #[arg(long, value_enum)]
        demo: Demo,
        #[arg(long, default_value_t = 1.0)]
        energy: f64,
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        /// Number of turns of the circle for the period demo; negative runs clockwise.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        turns: i32,
        /// Random pairs for the Stokes demo.
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Photon energy ledger for a frequency or a wavelength.
    Ledger {
        #[arg(long, conflicts_with = "wavelength", required_unless_present = "wavelength")]
        nu: Option<f64>,
        #[arg(long)]
        wavelength: Option<f64>,
        #[arg(long, value_enum, default_value_t = Units::Geometric)]
        units: Units,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarise the checks recorded in run manifests (`*.run.json`).
    Report {
        #[arg(long, num_args = 0..)]
        inputs: Vec<PathBuf>,
        /// `.md` or `.csv`; markdown on stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    Stokes,
    Period,
    Ws,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Units {
    Geometric,
    Si,
}

impl From<Units> for UnitSystem {
    fn from(u: Units) -> Self {
        match u {
            Units::Geometric => UnitSystem::Geometric,
            Units::Si => UnitSystem::Si,
        }
    }
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    /// Problems with anything the user supplied, including unreadable inputs.
    pub fn input(e: Error) -> Self {
        Self::usage(e.to_string())
    }

    /// Problems writing results.
    pub fn output(e: Error) -> Self {
        let code = if matches!(e, Error::Io { .. }) { EXIT_IO } else { EXIT_USAGE };
        CliError { code, message: e.to_string() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn thread_count() -> CliResult<Option<usize>> {
    match std::env::var("DEFECTFIELD_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::usage(format!("DEFECTFIELD_THREADS must be a positive integer, got {v:?}"))),
        },
    }
}

/// Parse arguments, run the command and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let result = thread_count().and_then(|threads| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
        pool.install(|| commands::dispatch(cli.command))
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "defectfield: {}", e.message);
            e.code
        }
    }
}
