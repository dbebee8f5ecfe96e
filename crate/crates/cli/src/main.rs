//! `bosculpt`: sculpt entangled states from identical bosons by
//! superposition subtraction, analyze two-boson states and simulate the
//! linear-optics implementation.
//!
//! Exit codes: 0 on success, 1 for invalid input or parameters, 2 when a
//! protocol fails or its output misses the target fidelity.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bosculpt", version, about = "Entanglement sculpting of identical bosons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in protocol on |sym⟩ and compare with its target state.
    Sculpt(SculptArgs),
    /// Run a protocol file on an input state.
    Run(RunArgs),
    /// Slater spectrum, rank and purity of a two-boson state.
    Analyze(AnalyzeArgs),
    /// Linear-optics simulation of heralded subtraction.
    #[command(subcommand)]
    Optics(OpticsCommand),
    /// Random normalized bosonic state, for testing.
    RandomState(RandomStateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Bipartite,
    Ghz,
    W,
    Dicke,
}

#[derive(Clone, Copy, ValueEnum)]
enum PhaseArg {
    /// `(-1)^(n+1)` between the all-odd and all-even components.
    Alternating,
    /// Always `+`.
    Plus,
}

#[derive(Args)]
struct SculptArgs {
    #[arg(value_enum)]
    family: FamilyArg,
    /// Number of parties (qubits).
    #[arg(long)]
    n: usize,
    /// Excitations for the Dicke family.
    #[arg(long)]
    m: Option<usize>,
    /// W: keep the raw output (excitation in the odd mode) and compare with
    /// the matching flipped W state.
    #[arg(long)]
    flipped: bool,
    /// GHZ: relative phase of the target.
    #[arg(long, value_enum, default_value = "alternating")]
    phase: PhaseArg,
    /// Directory for report.json, state.json and protocol.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add the wall-clock time to the report (makes output run-dependent).
    #[arg(long)]
    timing: bool,
    /// Success requires fidelity >= 1 - tol.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct RunArgs {
    /// Protocol JSON file.
    #[arg(long)]
    protocol: PathBuf,
    /// Input state JSON; defaults to |sym⟩ on the protocol's modes.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Target state JSON.
    #[arg(long)]
    target: Option<PathBuf>,
    /// Directory for report.json and state.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// State JSON file.
    state: PathBuf,
    /// Spectrum values above this count towards the rank.
    #[arg(long, default_value_t = sculpt::slater::DEFAULT_RANK_TOL)]
    tol: f64,
}

#[derive(Subcommand)]
enum OpticsCommand {
    /// Tap one mode and herald on a single photon in the ancilla.
    Herald(HeraldArgs),
    /// Four-mode superposition-subtraction module, one record per detector.
    Module(ModuleArgs),
    /// Herald probability and fidelity of a click sequence over a range of
    /// transmittivities, as CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct HeraldArgs {
    #[arg(long)]
    input: PathBuf,
    /// Mode to tap, counted from 1.
    #[arg(long)]
    mode: usize,
    /// Tap transmittivity in (0, 1).
    #[arg(long)]
    t: f64,
}

#[derive(Args)]
struct ModuleArgs {
    /// Four-mode input state; defaults to |sym4⟩.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    t: f64,
    /// Report only this detector (a, b, c or d).
    #[arg(long)]
    detector: Option<sculpt::optics::Detector>,
}

#[derive(Args)]
struct SweepArgs {
    /// Four-mode input state; defaults to |sym4⟩.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Transmittivity grid as start:end:count.
    #[arg(long)]
    t: String,
    /// Space the grid evenly in ln(1/t² − 1) instead of t.
    #[arg(long)]
    log: bool,
    /// Comma-separated detector clicks, applied in order.
    #[arg(long, default_value = "b,d")]
    clicks: String,
    /// resolving or threshold.
    #[arg(long, default_value = "resolving")]
    model: sculpt::optics::DetectorModel,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RandomStateArgs {
    #[arg(long)]
    modes: usize,
    #[arg(long, default_value_t = 2)]
    particles: usize,
    /// Number of random occupation draws (coinciding draws merge).
    #[arg(long, default_value_t = 4)]
    terms: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Sculpt(a) => commands::sculpt(a),
        Command::Run(a) => commands::run(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Optics(OpticsCommand::Herald(a)) => commands::herald(a),
        Command::Optics(OpticsCommand::Module(a)) => commands::module(a),
        Command::Optics(OpticsCommand::Sweep(a)) => commands::sweep(a),
        Command::RandomState(a) => commands::random_state(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
