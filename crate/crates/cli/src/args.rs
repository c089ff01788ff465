use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "cyclo",
    version,
    about = "Heights of cyclotomic and ternary inclusion-exclusion polynomials"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalOpts {
    /// TOML file with budget settings; flags and the environment override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Coefficient buffer budget (number of 64-bit terms held at once).
    #[arg(long, global = true, env = "CYCLO_BUFFER_BUDGET")]
    pub budget: Option<usize>,
    /// Steps along an arithmetic progression before a search gives up.
    #[arg(long, global = true)]
    pub ap_steps: Option<u64>,
    /// Largest degree a streaming evaluation may traverse.
    #[arg(long, global = true)]
    pub stream_degree_cap: Option<u64>,
    /// Cross-check every computed polynomial small enough for the slow oracle.
    #[arg(long, global = true)]
    pub verify_oracle: bool,
    /// Compute heights with the slow oracle instead of the fast kernels.
    #[arg(long, global = true, hide = true)]
    pub use_oracle: bool,
    /// Pretty-print the JSON envelope.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SubjectArgs {
    /// Index n of Φ_n.
    #[arg(required_unless_present = "triple", conflicts_with = "triple")]
    pub n: Option<u64>,
    /// Parameters p q r of Q_{p,q,r}.
    #[arg(long, num_args = 3, value_names = ["P", "Q", "R"])]
    pub triple: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Height of Φ_n or Q_{p,q,r}.
    Height(SubjectArgs),
    /// Coefficient list of Φ_n or Q_{p,q,r}.
    Coeffs(CoeffsArgs),
    /// Triple whose height is h or h+1 by the congruence construction.
    Witness(WitnessArgs),
    /// Iterates (p, q, r) -> (q, r, p + qr) with the height at each step.
    Jumpseq(JumpseqArgs),
    /// Compare A(s, q, r) with A(s + qr, q, r).
    Probe(ProbeArgs),
    /// Prime chain (p, q, r) -> (q, r, next prime ≡ p mod qr above r).
    Chain(ChainArgs),
    /// All heights A(p, q, r) over prime pairs q < r in a box.
    ExploreM(ExploreArgs),
    /// Triple with q ≡ ±2 (mod p) and r in the matching class mod pq.
    Lemma1(Lemma1Args),
    /// Range of heights guaranteed for a given smallest prime.
    Lemma2(Lemma2Args),
    /// Explicit triple q = 2 + (2k+1)p, r = (pq+1)/2 + l·pq, for odd p.
    Lemma4(Lemma4Args),
    /// Height of n against the height of its odd squarefree core.
    Reduce(ReduceArgs),
    /// The sparse prime set and its counting function.
    Sparse(SparseArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub subject: SubjectArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write coefficients to this file and print an envelope instead.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit an `index,value` header line in CSV output.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WitnessArgs {
    pub h: u64,
    /// Require p > p' even when p' is prime.
    #[arg(long)]
    pub strict_larger_p: bool,
    #[arg(long)]
    pub q_cap: Option<u64>,
    #[arg(long)]
    pub r_cap: Option<u64>,
    #[arg(long)]
    pub p_cap: Option<u64>,
    /// Instead of one certificate, walk this many admissible p for the
    /// minimal (q, r) and report which case each lands in.
    #[arg(long, value_name = "COUNT")]
    pub scan: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct JumpseqArgs {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProbeArgs {
    pub q: u64,
    pub r: u64,
    pub s: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChainArgs {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    #[arg(long, default_value_t = 2)]
    pub steps: usize,
    /// Value cap for each successor search.
    #[arg(long)]
    pub cap: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExploreArgs {
    pub p: u64,
    #[arg(long)]
    pub q_max: u64,
    #[arg(long)]
    pub r_max: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Lemma1Args {
    pub p: u64,
    #[arg(long)]
    pub q_cap: Option<u64>,
    #[arg(long)]
    pub r_cap: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Lemma2Args {
    pub p: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Lemma4Args {
    pub p: u64,
    pub k: u64,
    pub l: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReduceArgs {
    pub n: u64,
}

#[derive(Debug, Args)]
pub struct SparseArgs {
    #[command(flatten)]
    pub depth: DepthArgs,
    #[command(subcommand)]
    pub command: SparseCommand,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DepthArgs {
    #[arg(long, global = true, default_value_t = 20)]
    pub q_depth: u64,
    #[arg(long, global = true, default_value_t = 20)]
    pub r_depth: u64,
    /// Generate p-families for a = 1..=A_MAX.
    #[arg(long, global = true, default_value_t = 8)]
    pub a_max: u64,
    #[arg(long, global = true, default_value_t = 8)]
    pub p_depth: u64,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SparseCommand {
    /// Generated elements up to XMAX as JSON lines with family tags.
    Dump {
        #[arg(long)]
        xmax: u64,
    },
    /// P(x) against ln x, and per-family counts against (1/2) ln x.
    Count {
        #[arg(long)]
        x: u64,
        /// Count after removing the minimal set of small elements.
        #[arg(long)]
        trim: bool,
    },
    /// Membership properties for modulus m and residue a.
    Check {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        a: u64,
    },
    /// Minimal prefix removal and the per-family thresholds.
    Trim,
    /// Witness triple drawn from the set itself for target height h.
    Select { h: u64 },
}
