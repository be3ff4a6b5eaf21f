use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "entropygate",
    version,
    about = "Entropy-based admissibility checks for equations of state"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate s, T, p and the entropy gradient at one (rho, e) point.
    Thermo(ThermoArgs),
    /// Sample Hessians over regions and certify concavity/convexity.
    Certify(CertifyArgs),
    /// Run the 1D Euler solver and report the entropy budget.
    Simulate(SimulateArgs),
    /// Write a table of a model's specific entropy in the tabulated format.
    Tabulate(TabulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    Polytropic,
    Pathological,
    NegTemp,
    Tabulated,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "polytropic")]
    pub model: ModelName,
    /// Adiabatic exponent (default 1.4, or 0.8 for the pathological model).
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub cv: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub v0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub e0: f64,
    /// Table file, required with `--model tabulated`.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThermoArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub e: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Sigma,
    Eta,
    Temperature,
    Wagner,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplingName {
    Grid,
    Random,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "all")]
    pub check: Check,
    /// Extensive region `M_lo:M_hi,V_lo:V_hi,E_lo:E_hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub extensive: Option<String>,
    /// Conserved region `rho_lo:rho_hi,q_lo:q_hi,eps_lo:eps_hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub conserved: Option<String>,
    /// Lagrangian region `tau_lo:tau_hi,u_lo:u_hi,E_lo:E_hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub lagrangian: Option<String>,
    /// (rho, e) region for `--check temperature`.
    #[arg(long, allow_hyphen_values = true)]
    pub temperature: Option<String>,
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "grid")]
    pub sampling: SamplingName,
    #[arg(long, env = "ENTROPYGATE_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-7)]
    pub tol_rel: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub step_rel: f64,
    /// Skip conserved/Lagrangian samples with specific energy below this.
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    pub e_floor: f64,
    /// Finite-difference Hessians of the scalar function instead of the chain rule.
    #[arg(long)]
    pub stencil: bool,
    /// Write the report document here (`-` for stdout).
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitialName {
    Sod,
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryName {
    Periodic,
    Transmissive,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "sod")]
    pub initial: InitialName,
    /// Custom initial cells, one `rho,q,eps` row per cell; overrides --initial and --n.
    #[arg(long)]
    pub cells: Option<PathBuf>,
    /// Cell counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "200")]
    pub n: Vec<usize>,
    /// Final time (default 0.2 for sod, 0.5 for smooth).
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, default_value_t = 0.45, allow_hyphen_values = true)]
    pub cfl: f64,
    /// Default: transmissive for sod, periodic for smooth.
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryName>,
    #[arg(long, default_value = "0:1", allow_hyphen_values = true)]
    pub domain: String,
    #[arg(long, default_value_t = 1.2)]
    pub wave_speed_factor: f64,
    /// Report the observed order of the entropy drift across the cell counts.
    #[arg(long)]
    pub refine: bool,
    /// Per-step diagnostics CSV; gets an `_n<N>` suffix when several N are run.
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
    /// Final cell profile CSV; suffixed like `--diagnostics`.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Args)]
pub struct TabulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "0.5:2")]
    pub rho_range: String,
    #[arg(long, default_value = "0.5:2", allow_hyphen_values = true)]
    pub e_range: String,
    /// Points per axis.
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    #[arg(long)]
    pub out: PathBuf,
}
