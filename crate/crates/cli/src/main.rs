mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status for malformed invocations (BSD `EX_USAGE`).
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "nicety", version, about = "Build and check the objects of the non-nice Sobolev module construction")]
pub struct Cli {
    /// Directory for report files.
    #[arg(long, global = true, env = "NICETY_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// JSON report file name, relative to the output directory (default `<command>.json`).
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Also write a `t,value` CSV sample of the main function.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Number of CSV sample points.
    #[arg(long, global = true, default_value_t = 1001, value_parser = clap::value_parser!(u64).range(2..))]
    pub csv_points: u64,
    /// Arithmetic for `lemma57`, `density`, `tower` and `certify`; the other
    /// stages are always exact.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Smith–Volterra–Cantor stage: components and measure.
    Cantor(DepthArg),
    /// Boundary bump with prescribed end slopes.
    Lemma57(Lemma57Args),
    /// Perturb f so that its derivative on K is a prescribed function.
    Lemma58(Lemma58Args),
    /// Balanced mass: A on K with zero mean and B + χ small in L².
    Lemma59(Lemma59Args),
    /// Density of the span of a perturbed basis.
    Density(DensityArgs),
    /// Build the tower A_n, B_n, S_n, ρ_n and check its invariants.
    Tower(TowerArgs),
    /// Full non-niceness certificate.
    Certify(CertifyArgs),
    /// Finite-algebra character checks and module approximation.
    Discrete(DiscreteArgs),
}

#[derive(Args, Debug)]
pub struct DepthArg {
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=24))]
    pub depth: u32,
}

#[derive(Args, Debug)]
pub struct Lemma57Args {
    #[arg(long, default_value = "0")]
    pub alpha: String,
    #[arg(long, default_value = "1")]
    pub beta: String,
    /// Slope at alpha.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub slope_a: String,
    /// Slope at beta.
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    pub slope_b: String,
    #[arg(long, default_value = "1/100")]
    pub eps: String,
    /// Draw a random spec from this seed instead of the explicit values.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct Lemma58Args {
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=24))]
    pub depth: u32,
    #[arg(long, default_value = "1/4")]
    pub eps: String,
    /// Draw a random instance (K, a, f, eps) from this seed; overrides the
    /// default `a = 1`, `f = 0` on `svc_set(depth)`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct Lemma59Args {
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=24))]
    pub depth: u32,
    #[arg(long, default_value = "1/2")]
    pub eps: String,
    /// Require only zero mean and the L² bound, not the block-measure bounds.
    #[arg(long)]
    pub norm_only: bool,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    /// Comma-separated γ_1, …, γ_N.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: String,
    /// Comma-separated δ_1, …, δ_N.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: String,
}

#[derive(Args, Debug)]
pub struct TowerArgs {
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=24))]
    pub depth: u32,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..=30))]
    pub order: u64,
    /// Abort (exit 2) at the first level whose balanced-mass step is infeasible.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub tower: TowerArgs,
    #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u64).range(2..))]
    pub grid: u64,
    /// Seed of the norm-bound suite.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random test functions per level in the norm-bound suite; 0 skips it.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct DiscreteArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seeded finite modules to check.
    #[arg(long, default_value_t = 500)]
    pub modules: u64,
    /// Seeded approximation instances.
    #[arg(long, default_value_t = 20)]
    pub instances: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(outcome) => outcome.report(),
        Err(commands::RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(commands::RunError::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
