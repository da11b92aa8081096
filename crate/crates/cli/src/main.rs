use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use trimap_cli::config::{Command, RunConfig};
use trimap_cli::output::{write_all, RunInfo};
use trimap_cli::{run, CliError};

#[derive(Parser)]
#[command(
    name = "trimap",
    version,
    about = "Round-off triangle map: Lyapunov exponents and classical/quantum OTOCs"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Lyapunov estimates for each r
    Lyapunov,
    /// AL, LA and LL classical OTOCs over an ħ_c sweep
    ClassicalOtoc,
    /// Averaged quantum OTOC over an ħ sweep
    QuantumOtoc,
    /// Quantum (r = 0) against classical (r = 1/√D) with Δ_qc
    Compare,
    /// Return-time histogram of the expanding region
    ReturnTimes,
    /// Classical and quantum runs over every (r, ħ) pair
    Sweep,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Lyapunov => Command::Lyapunov,
            Sub::ClassicalOtoc => Command::ClassicalOtoc,
            Sub::QuantumOtoc => Command::QuantumOtoc,
            Sub::Compare => Command::Compare,
            Sub::ReturnTimes => Command::ReturnTimes,
            Sub::Sweep => Command::Sweep,
        }
    }
}

/// Flags override values read from `--config`.
#[derive(Args)]
struct Flags {
    /// Flat `key = value` file; keys are the long flag names
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Worker threads (0: all cores)
    #[arg(long, global = true)]
    threads: Option<String>,
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, global = true)]
    beta: Option<String>,
    /// Comma-separated round-off radii
    #[arg(long, global = true)]
    r: Option<String>,
    /// Comma-separated N with ħ = π⁻¹2⁻ᴺ
    #[arg(long = "hbar-exp", global = true)]
    hbar_exp: Option<String>,
    /// Hilbert dimension, instead of --hbar-exp
    #[arg(long, global = true)]
    dim: Option<String>,
    #[arg(long, global = true)]
    steps: Option<String>,
    #[arg(long, global = true)]
    centers: Option<String>,
    #[arg(long, global = true)]
    samples: Option<String>,
    /// al, la, ll or all
    #[arg(long, global = true)]
    scheme: Option<String>,
    /// on or off
    #[arg(long, global = true)]
    prefactor: Option<String>,
    /// A:B
    #[arg(long = "fit-window", global = true)]
    fit_window: Option<String>,
    /// Comma-separated Δ_qc times
    #[arg(long, global = true)]
    t0: Option<String>,
    #[arg(long, global = true)]
    trajectories: Option<String>,
    #[arg(long = "traj-steps", global = true)]
    traj_steps: Option<String>,
    /// on or off: add an r = 1e-6 quantum run
    #[arg(long, global = true)]
    companion: Option<String>,
    #[arg(long = "max-dim", global = true)]
    max_dim: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, &String)> {
        [
            ("seed", &self.seed),
            ("threads", &self.threads),
            ("out", &self.out),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("r", &self.r),
            ("hbar-exp", &self.hbar_exp),
            ("dim", &self.dim),
            ("steps", &self.steps),
            ("centers", &self.centers),
            ("samples", &self.samples),
            ("scheme", &self.scheme),
            ("prefactor", &self.prefactor),
            ("fit-window", &self.fit_window),
            ("t0", &self.t0),
            ("trajectories", &self.trajectories),
            ("traj-steps", &self.traj_steps),
            ("companion", &self.companion),
            ("max-dim", &self.max_dim),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
        .collect()
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::new(cli.command.into());
    if let Some(path) = &cli.flags.config {
        config.apply_file(path)?;
    }
    for (key, value) in cli.flags.pairs() {
        config
            .set(key, value)
            .map_err(|e| CliError::Validation(format!("--{key}: {e}")))?;
    }
    config.validate()?;
    Ok(config)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let config = resolve(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let clock = Instant::now();
    let datasets = pool.install(|| run(&config))?;
    let info = RunInfo {
        started_unix,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
        threads: pool.current_num_threads(),
    };
    for path in write_all(&config.out, &datasets, &config, &info)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
