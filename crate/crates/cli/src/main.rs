mod compare;
mod config;
mod error;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Correlation-efficient time evolution versus sequential Trotter propagation.
#[derive(Parser)]
#[command(name = "cete", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the reference, sequential and CETE evolutions and write CSV output.
    Run(Box<RunArgs>),
    /// Tabulate CETE and sequential errors against the reference series.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` config file; flags below override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    fcidump_path: Option<String>,
    #[arg(long)]
    n_electrons: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sz: Option<String>,
    /// `hf` or `rotated(<excitation>, <angle>)`, e.g. `rotated(1^ 3^ 2 0, 0.1pi)`.
    #[arg(long)]
    initial_state: Option<String>,
    #[arg(long)]
    t_max: Option<String>,
    #[arg(long)]
    step: Option<String>,
    #[arg(long)]
    substep: Option<String>,
    #[arg(long)]
    delta_cutoff: Option<String>,
    #[arg(long)]
    m_max: Option<String>,
    /// Shots per Pauli string; 0 reports exact expectation values.
    #[arg(long)]
    shots_tomography: Option<String>,
    #[arg(long)]
    shots_gradient: Option<String>,
    /// `exact` or `shots`.
    #[arg(long)]
    gradient_mode: Option<String>,
    /// `hf` or `most_probable`.
    #[arg(long)]
    cete_reference: Option<String>,
    #[arg(long)]
    depolarizing_p: Option<String>,
    #[arg(long)]
    readout_flip_p: Option<String>,
    #[arg(long)]
    noise_trajectories: Option<String>,
    #[arg(long)]
    master_seed: Option<String>,
    #[arg(long)]
    output_dir: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        let pairs = [
            ("fcidump_path", &self.fcidump_path),
            ("n_electrons", &self.n_electrons),
            ("sz", &self.sz),
            ("initial_state", &self.initial_state),
            ("t_max", &self.t_max),
            ("step", &self.step),
            ("substep", &self.substep),
            ("delta_cutoff", &self.delta_cutoff),
            ("m_max", &self.m_max),
            ("shots_tomography", &self.shots_tomography),
            ("shots_gradient", &self.shots_gradient),
            ("gradient_mode", &self.gradient_mode),
            ("cete_reference", &self.cete_reference),
            ("depolarizing_p", &self.depolarizing_p),
            ("readout_flip_p", &self.readout_flip_p),
            ("noise_trajectories", &self.noise_trajectories),
            ("master_seed", &self.master_seed),
            ("output_dir", &self.output_dir),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v.trim())))
            .collect()
    }
}

#[derive(Args)]
struct CompareArgs {
    /// Run output directory holding the three time-series files.
    #[arg(long)]
    dir: Option<PathBuf>,
    #[arg(long)]
    cete: Option<PathBuf>,
    #[arg(long)]
    sequential: Option<PathBuf>,
    #[arg(long)]
    reference: Option<PathBuf>,
}

fn run_command(args: &RunArgs) -> CliResult<()> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::read(path)?,
        None => RunConfig::default(),
    };
    for (key, value) in args.overrides() {
        cfg.set(key, value, Path::new("."))?;
    }
    let summary = run::run(cfg)?;
    println!("wrote {}", summary.output_dir.display());
    println!("time steps: {}", summary.steps);
    println!("minimum CETE step fidelity: {:.9}", summary.min_step_fidelity);
    println!("CETE fallbacks: {}", summary.fallbacks);
    println!(
        "depth: CETE max {}, sequential final {}",
        summary.max_cete_depth, summary.final_sequential_depth
    );
    Ok(())
}

fn compare_command(args: &CompareArgs) -> CliResult<()> {
    let pick = |explicit: &Option<PathBuf>, name: &str| -> CliResult<PathBuf> {
        match (explicit, &args.dir) {
            (Some(p), _) => Ok(p.clone()),
            (None, Some(d)) => Ok(d.join(name)),
            (None, None) => Err(CliError::Config(format!("pass --dir or the path of {name}"))),
        }
    };
    let cete = compare::load(&pick(&args.cete, "cete_timeseries.csv")?)?;
    let sequential = compare::load(&pick(&args.sequential, "sequential_timeseries.csv")?)?;
    let reference = compare::load(&pick(&args.reference, "reference_timeseries.csv")?)?;
    let rows = compare::compare(&cete, &sequential, &reference)?;
    print!("{}", compare::render(&rows));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run_command(args),
        Command::Compare(args) => compare_command(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
