use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qsm", version, about = "Transverse-field Ising chain and quantum spherical model")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Worker threads for scans and Monte Carlo (default: all cores).
    #[arg(long, global = true, env = "QSM_THREADS")]
    pub threads: Option<usize>,

    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transverse-field Ising chain.
    #[command(subcommand)]
    Tfim(Tfim),
    /// Quantum spherical model free energy and saddle point.
    Spherical(SphericalArgs),
    /// Finite-size oracles compared against the analytic modules.
    #[command(subcommand)]
    Oracle(Oracle),
    /// Run the acceptance suite.
    Check(CheckArgs),
}

#[derive(Debug, Subcommand)]
pub enum Tfim {
    /// Free energy per site, or the ground-state energy with --ground.
    FreeEnergy(TfimFreeEnergyArgs),
    /// Zero-temperature σˣσˣ correlation for separations 1..=n-max.
    Correlation(TfimCorrelationArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct TfimFreeEnergyArgs {
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[arg(long = "B", required_unless_present = "scan")]
    pub b: Option<f64>,
    #[arg(long, required_unless_present = "ground", conflicts_with = "ground")]
    pub beta: Option<f64>,
    #[arg(long)]
    pub ground: bool,
    /// Sweep B over LO:HI:N instead of a single --B.
    #[arg(long, conflicts_with = "b")]
    pub scan: Option<Scan>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct TfimCorrelationArgs {
    /// Ratio k = B/J.
    #[arg(long)]
    pub k: f64,
    #[arg(long = "n-max")]
    pub n_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Limit,
    Finite(usize),
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "limit" => Ok(Mode::Limit),
            Some(("finite", l)) => l
                .parse()
                .map(Mode::Finite)
                .map_err(|_| format!("bad lattice size in {s:?}")),
            _ => Err(format!("expected `limit` or `finite:L`, got {s:?}")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Limit => write!(f, "limit"),
            Mode::Finite(l) => write!(f, "finite:{l}"),
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SphericalArgs {
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[arg(long = "B", required_unless_present = "scan")]
    pub b: Option<f64>,
    #[arg(long = "H", default_value_t = 0.0)]
    pub h: f64,
    #[arg(long)]
    pub d: usize,
    #[arg(long, required_unless_present = "ground", conflicts_with = "ground")]
    pub beta: Option<f64>,
    #[arg(long)]
    pub ground: bool,
    /// `limit` or `finite:L`.
    #[arg(long, default_value = "limit")]
    pub mode: Mode,
    #[arg(long, conflicts_with = "b")]
    pub scan: Option<Scan>,
}

#[derive(Debug, Subcommand)]
pub enum Oracle {
    /// Exact diagonalization of a periodic chain against the closed forms.
    TfimEd(TfimEdArgs),
    /// Contour-integral partition function, checked against Monte Carlo.
    SphericalContour(SphericalOracleArgs),
    /// Monte Carlo partition function, checked against the contour integral.
    SphericalMc(SphericalOracleArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct TfimEdArgs {
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[arg(long = "B")]
    pub b: f64,
    #[arg(long)]
    pub beta: f64,
    /// Also compare ⟨σˣ₀σˣₙ⟩ at this separation with the Toeplitz determinant.
    #[arg(long)]
    pub sep: Option<usize>,
    #[arg(long, default_value_t = 5e-3)]
    pub tol: f64,
    #[arg(long = "corr-tol", default_value_t = 1e-2)]
    pub corr_tol: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SphericalOracleArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[arg(long = "B", default_value_t = 0.0)]
    pub b: f64,
    #[arg(long = "H", default_value_t = 0.0)]
    pub h: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Samples per Monte Carlo batch (default: samples/100, at most 10⁴).
    #[arg(long = "batch-size")]
    pub batch_size: Option<usize>,
    /// Largest 3σ interval on log Z that can still decide a comparison.
    #[arg(long, default_value_t = 1e-2)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Criterion id, name fragment or tag (tfim, spherical, oracle, ...).
    #[arg(long)]
    pub filter: Option<String>,
    /// Arm the dispersion sign-flip mutation to prove the suite can fail.
    #[arg(long, hide = true)]
    pub mutate_dispersion_sign: bool,
}

/// `LO:HI:N`, N evenly spaced points including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scan {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Scan {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| if i + 1 == self.n { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

impl FromStr for Scan {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("expected LO:HI:N, got {s:?}"));
        };
        let lo: f64 = lo.parse().map_err(|_| format!("bad LO in {s:?}"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("bad HI in {s:?}"))?;
        let n: usize = n.parse().map_err(|_| format!("bad N in {s:?}"))?;
        if n == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(format!("scan needs finite ends and N ≥ 1, got {s:?}"));
        }
        Ok(Scan { lo, hi, n })
    }
}

impl std::fmt::Display for Scan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
    }
}
