use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Overrides the output directory from the configuration file.
pub const OUTPUT_DIR_ENV: &str = "SHEARBEAM_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "shearbeam",
    version,
    about = "Thermoelastic shear beam with suspenders: simulation and verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and write energy, probe and snapshot CSVs.
    Simulate(SimulateArgs),
    /// Manufactured-solution convergence study.
    Convergence(ConvergenceArgs),
    /// Fit an exponential decay to an energy CSV.
    Energy(EnergyArgs),
    /// Convergence check of the elliptic pre-solve for eta.
    EtaCheck(EtaCheckArgs),
}

/// Constitutive parameters; each overrides the configuration file.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Cable mass density.
    #[arg(long)]
    pub rho: Option<f64>,
    /// String elastic modulus.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Suspender stiffness.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Cable damping.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Beam mass density.
    #[arg(long)]
    pub rho1: Option<f64>,
    /// Shear modulus.
    #[arg(long = "K")]
    pub k_shear: Option<f64>,
    /// Beam damping.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Thermal coupling.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Bending stiffness.
    #[arg(long)]
    pub b: Option<f64>,
    /// Thermal inertia.
    #[arg(long)]
    pub rho3: Option<f64>,
    /// Thermal conductivity.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Type III dissipation.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Span length.
    #[arg(long = "L")]
    pub length: Option<f64>,
}

impl ParamArgs {
    pub fn pairs(&self) -> [(&'static str, Option<f64>); 13] {
        [
            ("rho", self.rho),
            ("alpha", self.alpha),
            ("lambda", self.lambda),
            ("mu", self.mu),
            ("rho1", self.rho1),
            ("K", self.k_shear),
            ("gamma", self.gamma),
            ("beta", self.beta),
            ("b", self.b),
            ("rho3", self.rho3),
            ("delta", self.delta),
            ("kappa", self.kappa),
            ("L", self.length),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceCase {
    /// Unforced problem with sine initial data.
    None,
    /// Manufactured solution with its source terms and initial data.
    Mms,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of elements.
    #[arg(long = "M")]
    pub elements: Option<usize>,
    /// Time step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time.
    #[arg(long = "T")]
    pub final_time: Option<f64>,
    /// Comma-separated probe positions.
    #[arg(long, value_delimiter = ',')]
    pub probes: Option<Vec<f64>>,
    /// Snapshot every this many steps.
    #[arg(long = "snapshot_stride", alias = "snapshot-stride")]
    pub snapshot_stride: Option<usize>,
    /// Output directory (overrides SHEARBEAM_OUTPUT_DIR and the config).
    #[arg(long = "output_dir", alias = "output-dir")]
    pub output_dir: Option<PathBuf>,
    /// Built-in forcing case.
    #[arg(long, value_enum, default_value_t = SourceCase::None)]
    pub sources: SourceCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DtRule {
    /// dt = c / M.
    #[value(name = "c/M")]
    COverM,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    /// Configuration file supplying the parameters.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Comma-separated element counts, increasing.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "40,80,160,320,640,1280"
    )]
    pub levels: Vec<usize>,
    /// Final time.
    #[arg(long = "T", default_value_t = 1.2)]
    pub final_time: f64,
    #[arg(long = "dt-rule", value_enum, default_value_t = DtRule::COverM)]
    pub dt_rule: DtRule,
    /// Constant of the time-step rule.
    #[arg(long, default_value_t = 0.04)]
    pub c: f64,
    /// Maximum concurrent levels (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Output directory.
    #[arg(long = "output_dir", alias = "output-dir")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    /// Energy CSV written by `simulate`.
    #[arg(long)]
    pub input: PathBuf,
    /// Fit window `start,end` (default: second half of the run).
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub window: Option<Vec<f64>>,
    /// Write the summary CSV here as well as to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Relative tolerance of the monotonicity check.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct EtaCheckArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Comma-separated element counts.
    #[arg(long, value_delimiter = ',', default_value = "20,40,80,160")]
    pub levels: Vec<usize>,
}
