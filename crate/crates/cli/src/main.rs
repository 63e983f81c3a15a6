mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::io::{Failure, Pair};

/// Coupled-waveguide quantum walk CNOT simulator.
///
/// Waveguides are numbered from 1 in all input and output.
#[derive(Parser, Debug)]
#[command(name = "qwcnot", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Logical 4x4 transfer matrix, success probabilities and phases
    TruthTable(TruthTableArgs),
    /// Intensities along the array for one photon or a photon pair
    Evolve(EvolveArgs),
    /// Output distributions versus photon delay
    HomScan(HomScanArgs),
    /// Entangled-state preparation with a control coupler
    Bell(BellArgs),
    /// Waveguide widths and gaps realizing a target Hamiltonian
    Design(DesignArgs),
    /// Fidelity between two nonnegative matrices stored as CSV
    Fidelity(FidelityArgs),
    /// Multinomial counts drawn from a probability vector
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct HamiltonianArg {
    /// JSON file `{"beta": [...], "kappa": [...]}` holding h*t; defaults to the CNOT array
    #[arg(long, value_name = "FILE")]
    pub hamiltonian: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TruthTableArgs {
    #[command(flatten)]
    pub h: HamiltonianArg,
    /// Photon overlap in [0, 1]
    #[arg(long, default_value_t = 1.0)]
    pub x: f64,
    /// Report row-normalized probabilities
    #[arg(long)]
    pub normalize: bool,
    /// `auto` or four waveguide numbers `c0,c1,t0,t1`
    #[arg(long, default_value = "auto")]
    pub encoding: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub h: HamiltonianArg,
    /// Single photon injected into this waveguide
    #[arg(long, conflicts_with = "pair", required_unless_present = "pair")]
    pub mode: Option<usize>,
    /// Photon pair `a,b`
    #[arg(long)]
    pub pair: Option<Pair>,
    /// Overlap of the photon pair
    #[arg(long, default_value_t = 1.0, requires = "pair")]
    pub x: f64,
    /// Number of grid points including both ends
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Total evolution in units of the Hamiltonian's time
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
}

#[derive(Args, Debug)]
pub struct HomScanArgs {
    #[command(flatten)]
    pub h: HamiltonianArg,
    #[arg(long, default_value = "3,4")]
    pub pair: Pair,
    /// Delay range in ps
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub tau_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 201)]
    pub tau_steps: usize,
    /// Maximum two-photon visibility V0
    #[arg(long, default_value_t = 0.946)]
    pub visibility: f64,
    #[arg(long, default_value_t = 12.0)]
    pub bandwidth_nm: f64,
    #[arg(long, default_value_t = 1550.0)]
    pub wavelength_nm: f64,
}

#[derive(Args, Debug)]
pub struct BellArgs {
    #[command(flatten)]
    pub h: HamiltonianArg,
    #[arg(long, default_value_t = 1.0)]
    pub x: f64,
    /// Control coupler reflectivity
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
    /// Phase on the c1 rail, radians
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    /// Target qubit input state, 0 or 1
    #[arg(long, default_value_t = 0)]
    pub target: u8,
    #[arg(long, default_value = "auto")]
    pub encoding: String,
    /// Number of detected events to simulate
    #[arg(long, default_value_t = 10_000)]
    pub total: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct DesignArgs {
    /// Built-in target
    #[arg(long, value_parser = ["eq2"], conflicts_with = "target")]
    pub builtin: Option<String>,
    /// JSON file `{"beta": [...], "kappa": [...]}` holding h*L
    #[arg(long, value_name = "FILE")]
    pub target: Option<PathBuf>,
    /// Array length in um
    #[arg(long = "L", default_value_t = 700.0)]
    pub length_um: f64,
    #[arg(long, value_name = "CSV")]
    pub beta_table: Option<PathBuf>,
    #[arg(long, value_name = "CSV")]
    pub kappa_table: Option<PathBuf>,
    /// Reference waveguide
    #[arg(long, default_value_t = 1)]
    pub ref_mode: usize,
    #[arg(long, default_value_t = 1.5)]
    pub ref_width: f64,
    #[arg(long, default_value_t = 20.0)]
    pub decouple_gap: f64,
    /// Width jitter for a fabrication sweep, um
    #[arg(long)]
    pub sigma_width: Option<f64>,
    /// Gap jitter for a fabrication sweep, um
    #[arg(long)]
    pub sigma_gap: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Rails used by the sweep
    #[arg(long, default_value = "auto")]
    pub encoding: String,
}

#[derive(Args, Debug)]
pub struct FidelityArgs {
    pub a: PathBuf,
    pub b: PathBuf,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Comma-separated probabilities
    #[arg(long)]
    pub probs: String,
    #[arg(long, default_value_t = 10_000)]
    pub total: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::TruthTable(a) => commands::truth_table(&a),
        Command::Evolve(a) => commands::evolve(&a),
        Command::HomScan(a) => commands::hom_scan(&a),
        Command::Bell(a) => commands::bell(&a),
        Command::Design(a) => commands::design(&a),
        Command::Fidelity(a) => commands::fidelity(&a),
        Command::Sample(a) => commands::sample(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
