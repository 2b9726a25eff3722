//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use sasaki_core::arith::parse_rational;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "sasaki", version, about = "Extremal and CSC Sasakian structures on S^3_w joins")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Join parameters and ray data.
    #[command(subcommand)]
    Join(JoinCmd),
    /// The extremal boundary-value problem.
    #[command(subcommand)]
    Extremal(ExtremalCmd),
    /// Scans of the w-Sasaki cone.
    #[command(subcommand)]
    Cone(ConeCmd),
    /// Cohomology, homotopy and contact invariants.
    #[command(subcommand)]
    Topology(TopologyCmd),
    /// Bouquets and the Y^{p,q} family.
    #[command(subcommand)]
    Bouquet(BouquetCmd),
    /// Config-driven sweeps.
    #[command(subcommand)]
    Census(CensusCmd),
}

pub fn parse_pair(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated integers, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

pub fn parse_quad(s: &str) -> Result<(u64, u64, u64, u64), String> {
    let parts: Vec<u64> = s
        .split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b, c, d] => Ok((a, b, c, d)),
        _ => Err(format!("expected l1,l2,w1,w2, got {s:?}")),
    }
}

pub fn parse_rat(s: &str) -> Result<BigRational, String> {
    parse_rational(s).ok_or_else(|| format!("expected a rational p/q, got {s:?}"))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BaseArgs {
    /// Base name: cp1, cp2, k3, sigma_<g> (or a name from --catalog).
    #[arg(long, default_value = "cp1")]
    pub base: String,
    /// JSON base catalog to resolve --base against.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct JoinArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
    #[arg(long)]
    pub l1: u64,
    #[arg(long)]
    pub l2: u64,
    /// Weights as w1,w2 with w1 >= w2.
    #[arg(long, value_parser = parse_pair)]
    pub w: (u64, u64),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PrecisionArgs {
    /// Root refinement width 2^-bits (default: $SASAKI_PRECISION_BITS or 64).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum JoinCmd {
    /// Check the join conditions.
    Validate(JoinArgs),
    /// Quotient orbifold data of a quasi-regular ray.
    Quotient(RayArgs),
    /// Regular / almost regular / quasi-regular.
    Classify(RayArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RayArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub join: JoinArgs,
    /// Ray as coprime v1,v2.
    #[arg(long, value_parser = parse_pair)]
    pub v: (u64, u64),
}

/// Admissible data given directly, or through a join and a ray.
#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dn: Option<u32>,
    #[arg(long, value_parser = parse_rat, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_rat")]
    pub snn: Option<BigRational>,
    #[arg(long, value_parser = parse_rat, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_rat")]
    pub r: Option<BigRational>,
    #[arg(long, value_parser = parse_rat)]
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_rat")]
    pub m1: Option<BigRational>,
    #[arg(long, value_parser = parse_rat)]
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_rat")]
    pub m2: Option<BigRational>,
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2: Option<u64>,
    #[arg(long, value_parser = parse_pair)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<(u64, u64)>,
    #[arg(long, value_parser = parse_pair)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<(u64, u64)>,
}

mod opt_rat {
    use num_rational::BigRational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        sasaki_core::arith::serde_rational::option::serialize(x, s)
    }
}

#[derive(Debug, Subcommand)]
pub enum ExtremalCmd {
    /// Solve for F, alpha, beta and decide positivity.
    Solve(DataArgs),
    /// CSC residual and the closed-form cross-check.
    Csc(DataArgs),
    /// Einstein ray of a KE base (--w), or KE residuals of data (--fano-index, --n).
    Einstein(EinsteinArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EinsteinArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fano_index: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub precision: PrecisionArgs,
}

#[derive(Debug, Subcommand)]
pub enum ConeCmd {
    /// Isolate all CSC rays.
    Scan(ScanArgs),
    /// The sufficient condition for three CSC rays.
    Bound(JoinArgs),
    /// Positivity of F over a ray grid.
    Exhaust(ExhaustArgs),
    /// Search regular-ray data that fail positivity.
    Nonexist(NonexistArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub join: JoinArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub precision: PrecisionArgs,
    /// Write residual samples to this CSV file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Number of CSV sample rows.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExhaustArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub join: JoinArgs,
    /// Number of grid rays.
    #[arg(long, default_value_t = 50)]
    pub rays: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NonexistArgs {
    #[arg(long)]
    pub genus_min: u32,
    #[arg(long)]
    pub genus_max: u32,
    #[arg(long)]
    pub l1_max: u64,
    #[arg(long)]
    pub w_max: u64,
}

#[derive(Debug, Subcommand)]
pub enum TopologyCmd {
    /// Cohomology ring of S^{2p+1} * S^3_w.
    Ring(RingArgs),
    /// Orbifold cohomology of CP^1[w] in one degree.
    Orb(OrbArgs),
    /// Low homotopy groups of the join.
    Homotopy(HomotopyArgs),
    /// Compare two joins over the same base.
    Contacto(ContactoArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RingArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub p: i64,
    #[command(flatten)]
    #[serde(flatten)]
    pub join: JoinArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OrbArgs {
    #[arg(long, value_parser = parse_pair)]
    pub w: (u64, u64),
    #[arg(long)]
    pub degree: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HomotopyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub join: JoinArgs,
    /// Profile of M: sphere:<n> or s2s3:<k> (k-fold connected sum of S^2 x S^3).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simply_connected: Option<bool>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi2_rank: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi3_rank: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ContactoArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
    /// First join as l1,l2,w1,w2.
    #[arg(long, value_parser = parse_quad)]
    pub a: (u64, u64, u64, u64),
    /// Second join as l1,l2,w1,w2.
    #[arg(long, value_parser = parse_quad)]
    pub b: (u64, u64, u64, u64),
}

#[derive(Debug, Subcommand)]
pub enum BouquetCmd {
    /// Group all (l1, w) with a fixed l1 |w| and l2.
    Enumerate(EnumerateArgs),
    /// The Y^{p,q} joins: one (p, q), all q for p, or the inverse of a join.
    Ypq(YpqArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub chern_key: u64,
    #[arg(long)]
    pub l2: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct YpqArgs {
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<i64>,
    /// Invert: recover (p, q) from l1,l2,w1,w2.
    #[arg(long, value_parser = parse_quad)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from_join: Option<(u64, u64, u64, u64)>,
}

#[derive(Debug, Subcommand)]
pub enum CensusCmd {
    /// Run a sweep from a JSON config.
    Run(CensusArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CensusArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Worker threads (default: config value, else available cores).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}
