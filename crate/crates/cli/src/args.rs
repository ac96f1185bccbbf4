use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rcgap::measures::self_dual;
use rcgap::sampler::ChainKind;
use rcgap::spectral::MixingConvention;
use rcgap::{Caps, GraphSpec};

#[derive(Debug, Parser)]
#[command(
    name = "rcgap",
    version,
    about = "Exact spectral gaps, verification checks and Monte Carlo sampling for random-cluster dynamics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact computations on enumerated state spaces.
    #[command(subcommand)]
    Exact(ExactCommand),
    /// Run the verification suite and print a JSON-lines report.
    Verify(VerifyArgs),
    /// Gaps of several chains over a grid of p values.
    Sweep(SweepArgs),
    /// Monte Carlo simulation.
    #[command(subcommand)]
    Sample(SampleCommand),
    /// Planar dual of an embedded graph.
    Dual(DualArgs),
    /// Build a graph and print it with basic statistics.
    Graph(GraphArgs),
}

#[derive(Debug, Subcommand)]
pub enum ExactCommand {
    /// Spectral gap of an exact transition matrix.
    Gap(GapArgs),
    /// Exact mixing time together with the gap-based bounds.
    Mixing(MixingArgs),
}

#[derive(Debug, Subcommand)]
pub enum SampleCommand {
    /// Simulate a chain and write its observables as CSV.
    Run(RunArgs),
    /// Compare an empirical one-step row with the exact row.
    CheckRow(CheckRowArgs),
    /// Integrated autocorrelation time of an observable along a run.
    Tau(TauArgs),
}

/// `p` as a number or the literal `self-dual`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PValue {
    Value(f64),
    SelfDual,
}

impl PValue {
    pub fn resolve(self, q: u32) -> f64 {
        match self {
            PValue::Value(p) => p,
            PValue::SelfDual => self_dual(q),
        }
    }
}

impl FromStr for PValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "self-dual" {
            return Ok(PValue::SelfDual);
        }
        s.parse::<f64>()
            .map(PValue::Value)
            .map_err(|_| format!("`{s}` is neither a number nor `self-dual`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        }
    }
}

/// Exact chains: the random-cluster chains and the Potts-side SW chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExactDynamics {
    Sw,
    Hb,
    Sb,
    LazySb,
    SwPotts,
}

impl ExactDynamics {
    pub fn name(self) -> &'static str {
        match self {
            ExactDynamics::Sw => "sw",
            ExactDynamics::Hb => "hb",
            ExactDynamics::Sb => "sb",
            ExactDynamics::LazySb => "lazy-sb",
            ExactDynamics::SwPotts => "sw-potts",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Literal,
    Tv,
}

impl From<Convention> for MixingConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Literal => MixingConvention::Literal,
            Convention::Tv => MixingConvention::TotalVariation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Observable {
    Edges,
    Components,
    Largest,
    Magnetization,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Graph: edge, path:N, cycle:N, complete:N, grid:L, grid-dual:L or file:PATH.
    #[arg(long)]
    pub graph: GraphSpec,
    /// Edge probability in (0,1), or `self-dual`.
    #[arg(long)]
    pub p: PValue,
    /// Number of colors.
    #[arg(long)]
    pub q: u32,
}

#[derive(Debug, Args)]
pub struct CapArgs {
    /// Largest random-cluster or Potts state space enumerated.
    #[arg(long, default_value_t = Caps::default().states)]
    pub cap_states: usize,
    /// Largest joint (color, subset) state space enumerated.
    #[arg(long, default_value_t = Caps::default().joint)]
    pub cap_joint: usize,
}

impl CapArgs {
    pub fn caps(&self) -> Caps {
        Caps {
            states: self.cap_states,
            joint: self.cap_joint,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "sw")]
    pub dynamics: ExactDynamics,
    #[command(flatten)]
    pub caps: CapArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct MixingArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "sw")]
    pub dynamics: ExactDynamics,
    /// Distance convention: literal L1 sum or total variation.
    #[arg(long, value_enum, default_value = "literal")]
    pub convention: Convention,
    #[command(flatten)]
    pub caps: CapArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Graphs (comma-separated); the default corpus graphs when omitted.
    #[arg(long, value_delimiter = ',')]
    pub graph: Vec<GraphSpec>,
    /// p values (comma-separated, `self-dual` allowed); 0.2,0.5,self-dual,0.8 when omitted.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<PValue>,
    /// q values (comma-separated); 2,3 when omitted.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<u32>,
    /// `all` or a comma-separated list of check groups.
    #[arg(long, default_value = "all")]
    pub checks: String,
    /// Tolerance for both equalities and inequalities.
    #[arg(long)]
    pub tol: Option<f64>,
    /// ε values for the norm bound.
    #[arg(long, value_delimiter = ',', default_values_t = rcgap::verify::DEFAULT_EPS)]
    pub eps: Vec<f64>,
    /// Largest power in the norm-sequence checks.
    #[arg(long, default_value_t = rcgap::verify::DEFAULT_K_MAX)]
    pub k_max: usize,
    #[arg(long, value_enum, default_value = "literal")]
    pub convention: Convention,
    #[command(flatten)]
    pub caps: CapArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub graph: GraphSpec,
    #[arg(long)]
    pub q: u32,
    /// Grid `a:b:step`.
    #[arg(long)]
    pub p: String,
    /// Chains (comma-separated) among sw, hb, sb.
    #[arg(long, value_delimiter = ',', default_value = "sw,hb,sb")]
    pub dynamics: Vec<String>,
    #[command(flatten)]
    pub caps: CapArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// sw, sw-potts, hb or sb.
    #[arg(long, default_value = "sw")]
    pub dynamics: ChainKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, default_value_t = 1000)]
    pub steps: u64,
    #[arg(long, default_value_t = 0)]
    pub burnin: u64,
    #[arg(long, default_value_t = 1)]
    pub thin: u64,
    /// Comma-separated subset of edges,components,largest,magnetization.
    #[arg(long)]
    pub observables: Option<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CheckRowArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Start state: subset index, or spin code for sw-potts.
    #[arg(long, default_value_t = 0)]
    pub state: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Largest total-variation distance accepted.
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
    #[command(flatten)]
    pub caps: CapArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, default_value_t = 100_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 1000)]
    pub burnin: u64,
    #[arg(long, default_value_t = 1)]
    pub thin: u64,
    #[arg(long, value_enum, default_value = "edges")]
    pub observable: Observable,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct DualArgs {
    /// Embedded input graph.
    #[arg(long)]
    pub graph: GraphSpec,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long)]
    pub graph: GraphSpec,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Parses `a:b:step` into the grid points `a, a + step, ...` up to `b`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, step] = parts[..] else {
        return Err(format!("grid `{s}` must look like a:b:step"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("`{x}` is not a number"));
    let (a, b, step) = (num(a)?, num(b)?, num(step)?);
    if !(step > 0.0) || b < a {
        return Err(format!("grid `{s}` needs step > 0 and a <= b"));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| a + i as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.5:0.5:1").unwrap(), vec![0.5]);
        let g = parse_grid("0.05:0.95:0.05").unwrap();
        assert_eq!(g.len(), 19);
        assert!((g[18] - 0.95).abs() < 1e-12);
        assert!(parse_grid("0.5:0.4:0.1").is_err());
        assert!(parse_grid("0.1:0.2").is_err());
    }

    #[test]
    fn p_values() {
        assert_eq!("0.3".parse::<PValue>().unwrap(), PValue::Value(0.3));
        assert!(("self-dual".parse::<PValue>().unwrap().resolve(4) - 2.0 / 3.0).abs() < 1e-15);
        assert!("half".parse::<PValue>().is_err());
    }
}
