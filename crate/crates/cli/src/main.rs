use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use drivengate::experiment::{run, write_outcome, ExperimentConfig, ExperimentKind, Scale};
use drivengate::ion::Convention;

#[derive(Parser, Debug)]
#[command(name = "drivengate", version, about = "Driven geometric phase gate experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One noiseless gate.
    Gate(Common),
    /// Gate error against Raman detuning.
    ScatterSweep(Common),
    /// Gate error against relative intensity noise.
    IntensitySweep(Common),
    /// Three-level versus effective two-level dynamics.
    LambdaCheck(Common),
    /// Channel phases against the closed-form gate.
    OracleCheck(Common),
}

impl Command {
    fn split(self) -> (ExperimentKind, Common) {
        match self {
            Command::Gate(c) => (ExperimentKind::Gate, c),
            Command::ScatterSweep(c) => (ExperimentKind::ScatterSweep, c),
            Command::IntensitySweep(c) => (ExperimentKind::IntensitySweep, c),
            Command::LambdaCheck(c) => (ExperimentKind::LambdaCheck, c),
            Command::OracleCheck(c) => (ExperimentKind::OracleCheck, c),
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ConventionArg {
    Cyclic,
    Angular,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Cyclic => Convention::Cyclic,
            ConventionArg::Angular => Convention::Angular,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ScaleArg {
    Ci,
    Reproduction,
}

impl From<ScaleArg> for Scale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Ci => Scale::Ci,
            ScaleArg::Reproduction => Scale::Reproduction,
        }
    }
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config or run manifest.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Preset used when no config is given.
    #[arg(long, value_enum, default_value = "ci")]
    scale: ScaleArg,
    /// Master seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Highest Fock level kept in each mode.
    #[arg(long, value_name = "N")]
    nmax: Option<usize>,
    /// Largest integrator step.
    #[arg(long, value_name = "SECONDS")]
    dt: Option<f64>,
    /// CSV path; the manifest is written beside it.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Trajectories per noise point.
    #[arg(long, value_name = "N")]
    traj: Option<usize>,
    /// Meaning of the tabulated linewidth.
    #[arg(long, value_enum)]
    gamma_convention: Option<ConventionArg>,
    /// Print the resolved config and exit.
    #[arg(long)]
    dump_config: bool,
}

fn build_config(kind: ExperimentKind, args: &Common) -> Result<ExperimentConfig, String> {
    let mut config = match &args.config {
        Some(path) => {
            let c = ExperimentConfig::load(path).map_err(|e| e.to_string())?;
            if c.experiment != kind {
                return Err(format!("{} holds a {} config, not {}", path.display(), c.experiment.name(), kind.name()));
            }
            c
        }
        None => ExperimentConfig::preset(kind, args.scale.into()),
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(n) = args.nmax {
        config.n_max = n;
    }
    if let Some(dt) = args.dt {
        config.integrator.dt = dt;
    }
    if let Some(n) = args.traj {
        config.n_trajectories = n;
    }
    if let Some(c) = args.gamma_convention {
        config.gamma_convention = c.into();
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn execute(kind: ExperimentKind, args: Common) -> Result<(), String> {
    let config = build_config(kind, &args)?;
    if args.dump_config {
        println!("{}", config.to_json().map_err(|e| e.to_string())?);
        return Ok(());
    }
    let csv = args
        .out
        .clone()
        .or_else(|| config.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", kind.name())));
    let outcome = run(&config).map_err(|e| e.to_string())?;
    let manifest = write_outcome(&config, &outcome, &csv).map_err(|e| e.to_string())?;
    println!("{} rows -> {}", outcome.len(), csv.display());
    println!("manifest -> {}", manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
