use std::path::PathBuf;
use std::str::FromStr;

use border_rank::numag::{InterpolationMode, VarietySpec};
use border_rank::rep::{Partition, Permutation};
use border_rank::scalar::{P31, P61};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Parser, Serialize)]
#[command(name = "brank", version, about = "Border rank lower bounds via highest weight vectors, and numerical witness sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "BRANK_THREADS")]
    pub threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Leave the wall time out of the report, so equal runs give equal bytes.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Kronecker coefficient and module dimension for three partitions.
    Kron(KronArgs),
    /// Random search for a basis of a highest weight space.
    HwvBasis(BasisArgs),
    /// Combinations of polynomials vanishing on a secant variety.
    Vanish(VanishArgs),
    /// Evaluate a vanishing combination at a target tensor.
    Certify(CertifyArgs),
    /// Numerical algebraic geometry on parametrized varieties.
    #[command(subcommand)]
    Nag(NagCommand),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Kron(_) => "kron",
            Command::HwvBasis(_) => "hwv-basis",
            Command::Vanish(_) => "vanish",
            Command::Certify(_) => "certify",
            Command::Nag(NagCommand::Degree(_)) => "nag degree",
            Command::Nag(NagCommand::Member(_)) => "nag member",
            Command::Nag(NagCommand::Mindeg(_)) => "nag mindeg",
        }
    }
}

#[derive(Args, Serialize)]
pub struct Shapes {
    /// Partition on the A side, e.g. `5,5,5,5`
    #[arg(long)]
    pub pi: Partition,
    /// Partition on the B side, e.g. `5,5,5,5`
    #[arg(long)]
    pub mu: Partition,
    /// Partition on the C side, e.g. `5,5,5,5`
    #[arg(long)]
    pub nu: Partition,
}

/// Three comma-separated sizes `a,b,c`.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(transparent)]
pub struct Dims(pub [usize; 3]);

impl FromStr for Dims {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v: Vec<usize> = s.split(',').map(|t| t.trim().parse().map_err(|_| format!("bad size {t:?}"))).collect::<Result<_, _>>()?;
        <[usize; 3]>::try_from(v).map(Dims).map_err(|_| format!("expected a,b,c, got {s:?}"))
    }
}

#[derive(Args, Serialize)]
pub struct KronArgs {
    #[command(flatten)]
    pub shapes: Shapes,
    /// Vector space dims `a,b,c` for the module dimension; defaults to the shape lengths.
    #[arg(long)]
    pub dims: Option<Dims>,
}

#[derive(Args, Serialize)]
pub struct BasisArgs {
    #[command(flatten)]
    pub shapes: Shapes,
    #[arg(long, default_value_t = P31)]
    pub prime: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Candidate pairs tried per basis element.
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// The four degree-20 polynomials on `(5,5,5,5)^3` for 2x2 matrix multiplication.
    #[value(name = "m2-d20")]
    #[serde(rename = "m2-d20")]
    M2D20,
}

/// A permutation pair `tau1:tau2` in one-line notation.
#[derive(Clone, Debug, Serialize)]
pub struct Pair(pub Permutation, pub Permutation);

impl FromStr for Pair {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected tau1:tau2, got {s:?}"))?;
        Ok(Pair(a.parse().map_err(|e| format!("{e}"))?, b.parse().map_err(|e| format!("{e}"))?))
    }
}

#[derive(Args, Serialize)]
pub struct PolySource {
    /// Report from `hwv-basis`, or a JSON array of polynomials.
    #[arg(long, conflicts_with_all = ["preset", "pair"])]
    pub basis: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with = "pair")]
    pub preset: Option<Preset>,
    /// Inline pair `tau1:tau2`; repeat for several. Needs --pi, --mu and --nu.
    #[arg(long, requires_all = ["pi", "mu", "nu"])]
    pub pair: Vec<Pair>,
    /// Partition on the A side, e.g. `5,5,5,5`
    #[arg(long)]
    pub pi: Option<Partition>,
    /// Partition on the B side, e.g. `5,5,5,5`
    #[arg(long)]
    pub mu: Option<Partition>,
    /// Partition on the C side, e.g. `5,5,5,5`
    #[arg(long)]
    pub nu: Option<Partition>,
}

fn default_primes() -> Vec<u64> {
    vec![P31, P61]
}

#[derive(Args, Serialize)]
pub struct VanishArgs {
    #[command(flatten)]
    pub polys: PolySource,
    /// Rank of the secant variety.
    #[arg(long)]
    pub r: usize,
    /// Repeat for several primes.
    #[arg(long = "prime", default_values_t = default_primes())]
    pub primes: Vec<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial sample count; defaults to 2k + 4.
    #[arg(long)]
    pub points: Option<usize>,
    /// Sample dims `a,b,c`; defaults to the shape lengths.
    #[arg(long)]
    pub dims: Option<Dims>,
}

/// `matmul:m,n,p` or `random-rank:r`.
#[derive(Clone, Debug, Serialize)]
#[serde(into = "String")]
pub enum Target {
    Matmul(usize, usize, usize),
    RandomRank(usize),
}

impl From<Target> for String {
    fn from(t: Target) -> String {
        match t {
            Target::Matmul(m, n, p) => format!("matmul:{m},{n},{p}"),
            Target::RandomRank(r) => format!("random-rank:{r}"),
        }
    }
}

impl FromStr for Target {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| format!("expected kind:params, got {s:?}"))?;
        match kind {
            "matmul" => {
                let Dims([m, n, p]) = rest.parse()?;
                if m == 0 || n == 0 || p == 0 {
                    return Err("matrix sizes must be positive".into());
                }
                Ok(Target::Matmul(m, n, p))
            }
            "random-rank" => rest.parse().map(Target::RandomRank).map_err(|_| format!("bad rank {rest:?}")),
            _ => Err(format!("unknown target kind {kind:?}; use matmul or random-rank")),
        }
    }
}

#[derive(Args, Serialize)]
pub struct CertifyArgs {
    /// Report from `vanish`.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub kernel: Option<PathBuf>,
    /// Compute the kernel for a preset instead of loading one.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// `matmul:m,n,p` or `random-rank:r`
    #[arg(long)]
    pub target: Target,
    /// Rank of the secant variety; must match the kernel file when both are given.
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long = "prime", default_values_t = default_primes())]
    pub primes: Vec<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fresh rank-r samples for the vanishing check.
    #[arg(long, default_value_t = 50)]
    pub checks: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Example {
    TwistedCubic,
    X2Quartic,
    Circle,
}

/// `r:a,b,c` for the secant variety `sigma_r` of `P^{a-1} x P^{b-1} x P^{c-1}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Sigma {
    pub r: usize,
    pub dims: [usize; 3],
}

impl FromStr for Sigma {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (r, rest) = s.split_once(':').ok_or_else(|| format!("expected r:a,b,c, got {s:?}"))?;
        let r = r.parse().map_err(|_| format!("bad rank {r:?}"))?;
        let Dims(dims) = rest.parse()?;
        if r == 0 || dims.contains(&0) {
            return Err("rank and sizes must be positive".into());
        }
        Ok(Sigma { r, dims })
    }
}

#[derive(Args, Serialize)]
#[group(multiple = false)]
pub struct VarietyArg {
    #[arg(long, value_enum)]
    pub example: Option<Example>,
    /// Secant variety `r:a,b,c` of rank-r tensors in C^a (x) C^b (x) C^c
    #[arg(long)]
    pub sigma: Option<Sigma>,
}

impl VarietyArg {
    pub fn spec(&self) -> anyhow::Result<VarietySpec> {
        Ok(match (self.example, self.sigma) {
            (Some(Example::TwistedCubic), _) => VarietySpec::TwistedCubic,
            (Some(Example::X2Quartic), _) => VarietySpec::X2Quartic,
            (Some(Example::Circle), _) => VarietySpec::Circle,
            (None, Some(Sigma { r, dims: [a, b, c] })) => VarietySpec::Secant { r, a, b, c },
            (None, None) => anyhow::bail!("give --example or --sigma"),
        })
    }
}

#[derive(Args, Serialize)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub variety: VarietyArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monodromy rounds without growth before stopping.
    #[arg(long, default_value_t = 5)]
    pub stable_rounds: usize,
    #[arg(long, default_value_t = 100)]
    pub max_rounds: usize,
    /// Monodromy and trace test cycles before giving up.
    #[arg(long, default_value_t = 4)]
    pub attempts: usize,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NagCommand {
    /// Degree by monodromy, confirmed by the trace test.
    Degree(DegreeArgs),
    /// Whether a point lies on the variety.
    Member(MemberArgs),
    /// Least degree of a polynomial vanishing on the variety.
    Mindeg(MindegArgs),
}

#[derive(Args, Serialize)]
pub struct DegreeArgs {
    #[command(flatten)]
    pub witness: WitnessArgs,
    /// Also write the witness set here.
    #[arg(long)]
    pub archive: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sample {
    /// The image of a random parameter.
    On,
    /// A random point of the ambient space.
    Off,
}

#[derive(Args, Serialize)]
pub struct MemberArgs {
    #[command(flatten)]
    pub witness: WitnessArgs,
    /// Start from an archived witness set instead of computing one.
    #[arg(long, conflicts_with_all = ["example", "sigma"])]
    pub load: Option<PathBuf>,
    /// Comma-separated coordinates, each real or complex like `1.5-2i`.
    #[arg(long, conflicts_with = "sample", required_unless_present = "sample")]
    pub point: Option<PointArg>,
    #[arg(long, value_enum)]
    pub sample: Option<Sample>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct PointArg(pub Vec<Complex64>);

impl FromStr for PointArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',').map(|t| t.trim().parse::<Complex64>().map_err(|_| format!("bad coordinate {t:?}"))).collect::<Result<_, _>>().map(PointArg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Homogeneous,
    Affine,
}

impl From<ModeArg> for InterpolationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Homogeneous => InterpolationMode::Homogeneous,
            ModeArg::Affine => InterpolationMode::Affine,
        }
    }
}

#[derive(Args, Serialize)]
pub struct MindegArgs {
    #[command(flatten)]
    pub variety: VarietyArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub dmax: usize,
    /// Homogeneous for cones and affine otherwise, unless given.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, default_value_t = 1024)]
    pub memory_mb: usize,
}
