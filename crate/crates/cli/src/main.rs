use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qotto_cli::{load_config, run, CliError, ExperimentKind, Overrides};

#[derive(Parser)]
#[command(name = "qotto", version, about = "Collision-model quantum battery and Otto engine experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Alternating hot/cold collisions; ergotropy after every collision.
    Battery(Common),
    /// Four-stroke Otto cycle statistics.
    Otto(Common),
    /// Tabulate the Gaussian-ratio efficiency density.
    RatioPdf(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads: 1 runs serially, 0 uses every core.
    #[arg(long)]
    threads: Option<usize>,
    /// Hot qudit dimension.
    #[arg(long)]
    mu: Option<usize>,
    /// Swap angle in [0, pi/2]; accepts forms like "pi/10".
    #[arg(long)]
    alpha: Option<String>,
    /// Battery level spacing.
    #[arg(long)]
    gap: Option<f64>,
    #[arg(long)]
    delta1: Option<f64>,
    #[arg(long)]
    delta2: Option<f64>,
    /// Retained Otto cycles per chain.
    #[arg(long)]
    cycles: Option<usize>,
    /// Otto cycles dropped at the start of each chain.
    #[arg(long)]
    discard: Option<usize>,
    /// Independent Otto chains.
    #[arg(long)]
    chains: Option<usize>,
    /// Battery collisions per trajectory.
    #[arg(long)]
    collisions: Option<usize>,
    #[arg(long)]
    trajectories: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    mean_w: Option<f64>,
    #[arg(long)]
    std_w: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mean_q: Option<f64>,
    #[arg(long)]
    std_q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eta_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eta_max: Option<f64>,
    /// Grid points of the ratio-pdf table.
    #[arg(long)]
    points: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            out: self.out.clone(),
            threads: self.threads,
            mu: self.mu,
            alpha: self.alpha.clone(),
            gap: self.gap,
            delta1: self.delta1,
            delta2: self.delta2,
            cycles: self.cycles,
            discard: self.discard,
            chains: self.chains,
            collisions: self.collisions,
            trajectories: self.trajectories,
            mean_w: self.mean_w,
            std_w: self.std_w,
            mean_q: self.mean_q,
            std_q: self.std_q,
            eta_min: self.eta_min,
            eta_max: self.eta_max,
            points: self.points,
        }
    }
}

fn execute(kind: ExperimentKind, args: &Common) -> Result<(), CliError> {
    let text = match &args.config {
        Some(p) => Some(std::fs::read_to_string(p)?),
        None => None,
    };
    let config = load_config(text.as_deref(), kind, &args.overrides())?;
    let report = run(&config)?;
    for f in &report.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Battery(a) => (ExperimentKind::Battery, a),
        Command::Otto(a) => (ExperimentKind::Otto, a),
        Command::RatioPdf(a) => (ExperimentKind::RatioPdf, a),
    };
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qotto: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
