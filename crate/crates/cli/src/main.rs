//! `revphase`: multiports, phase scans, count simulation, fringe fits,
//! sensitivity reports and plots.

mod commands;
mod io;
mod plot;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use revphase_core::{Error, ErrorClass};

#[derive(Parser, Debug)]
#[command(name = "revphase", version, about = "Time-reversed phase super-resolution toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a multiport and dump its matrix.
    Multiport {
        #[command(flatten)]
        device: DeviceArgs,
        #[arg(short, long)]
        output: Option<std::path::PathBuf>,
    },
    /// Detection probabilities over a phase grid.
    Scan {
        #[arg(long, value_enum, default_value_t = ScanMode::Classical)]
        mode: ScanMode,
        #[command(flatten)]
        device: DeviceArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(short, long)]
        output: Option<std::path::PathBuf>,
    },
    /// Poisson singles and coincidence counts for laser light.
    Simulate {
        #[command(flatten)]
        device: DeviceArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        seed: u64,
        /// Mean photons per coincidence window, averaged over detectors.
        #[arg(long)]
        mean_photons: Option<f64>,
        /// Coincidence windows per grid point.
        #[arg(long)]
        windows: Option<u64>,
        /// Per-detector fringe contrast, comma separated.
        #[arg(long, value_delimiter = ',')]
        contrast: Option<Vec<f64>>,
        #[arg(short, long)]
        output: Option<std::path::PathBuf>,
    },
    /// Fit singles and coincidence fringes of a dataset.
    Fit {
        dataset: std::path::PathBuf,
        /// Expected detector count; checked against the file.
        #[arg(long)]
        detectors: Option<usize>,
        #[arg(long)]
        report: Option<std::path::PathBuf>,
        #[arg(long)]
        overlay: Option<std::path::PathBuf>,
    },
    /// Phase uncertainty against the classical limit.
    Sensitivity {
        #[arg(long)]
        photons: usize,
        #[arg(long)]
        visibility: f64,
        #[arg(long, default_value_t = 1.0)]
        efficiency: f64,
        #[arg(long, default_value_t = revphase_core::metrology::DEFAULT_DELTA_A)]
        delta_a: f64,
        /// Operating phase; defaults to the steepest point 90°/N.
        #[arg(long)]
        phase_deg: Option<f64>,
        #[arg(long, default_value_t = revphase_core::metrology::HENE_WAVELENGTH_NM)]
        wavelength_nm: f64,
        #[arg(long)]
        csv: bool,
        #[arg(short, long)]
        output: Option<std::path::PathBuf>,
    },
    /// Render a dataset as an SVG chart.
    Plot {
        dataset: std::path::PathBuf,
        #[arg(short, long)]
        output: std::path::PathBuf,
    },
    /// Simulate, fit and score from one config file.
    Run {
        #[arg(long)]
        config: std::path::PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: std::path::PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ScanMode {
    Classical,
    QuantumForward,
    QuantumReversed,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DeviceKind {
    Symmetric,
    Asymmetric,
    /// Symmetric for odd N, asymmetric for even N.
    Canonical,
}

#[derive(Args, Debug)]
struct DeviceArgs {
    /// TOML multiport description; overrides --kind.
    #[arg(long)]
    multiport: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = DeviceKind::Canonical)]
    kind: DeviceKind,
    #[arg(short = 'n', long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    offset_deg: f64,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    start_deg: f64,
    #[arg(long, default_value_t = 360.0)]
    stop_deg: f64,
    #[arg(long, default_value_t = 360)]
    points: usize,
    /// Include the stop angle.
    #[arg(long)]
    endpoint: bool,
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Usage => 1,
        ErrorClass::Numerical => 2,
        ErrorClass::Io => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
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
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}

type Result<T> = std::result::Result<T, Error>;
