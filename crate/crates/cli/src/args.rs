use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cooc",
    version,
    about = "Index a text for top-k close (or far) consecutive occurrence queries"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index file from a text file.
    Build(BuildArgs),
    /// Run one query against an index file.
    Query(QueryArgs),
    /// Print structural statistics of an index file.
    Stats(StatsArgs),
    /// Fuzz every available query family against brute force.
    Verify(VerifyArgs),
    /// Answer a query by brute force, mirroring `query` flags.
    Oracle(OracleArgs),
    /// Time builds and queries.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Structure {
    /// Per-heavy-path lists holding every pair; larger, answers any k
    /// output-sensitively.
    Full,
    /// Clustered hierarchy keeping the top pairs per level; smaller, falls
    /// back to bounded enumeration for large k.
    Recursive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StoreMode {
    /// Closest pairs, ascending distance.
    Topk,
    /// Farthest pairs, descending distance.
    Far,
    /// Distance band with the lower bound fixed now (requires --alpha);
    /// queried with --gap-beta.
    GapAlpha,
    /// Distance band with the upper bound fixed now (requires --beta);
    /// queried with --gap-alpha.
    GapBeta,
    /// Pairs whose occurrences do not overlap.
    Nonoverlap,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Input text file, read as raw bytes.
    pub text: PathBuf,
    /// Output index file.
    #[arg(short, long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Structure::Full)]
    pub structure: Structure,
    /// Query stores to build, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "topk")]
    pub modes: Vec<StoreMode>,
    /// Space exponent for the recursive structure: "1", "0.5", "0.25", or
    /// "num/den" with 0 < num/den <= 1.
    #[arg(long, default_value = "1")]
    pub epsilon: String,
    /// Fixed lower distance bound for the gap-alpha store.
    #[arg(long)]
    pub alpha: Option<u64>,
    /// Fixed upper distance bound for the gap-beta store.
    #[arg(long)]
    pub beta: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PatternArg {
    /// Pattern as a literal argument (UTF-8 bytes as typed).
    #[arg(long, group = "pattern_source")]
    pub pattern: Option<String>,
    /// Pattern from a file, raw bytes (for binary patterns).
    #[arg(long, group = "pattern_source")]
    pub pattern_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("family").required(true)))]
pub struct FamilyArgs {
    /// Report the k closest pairs.
    #[arg(long, group = "family")]
    pub topk: Option<usize>,
    /// Report the k farthest pairs.
    #[arg(long, group = "family")]
    pub topk_far: Option<usize>,
    /// Report pairs in the band [alpha, BETA]; alpha was fixed at build
    /// time.
    #[arg(long, group = "family")]
    pub gap_beta: Option<u64>,
    /// Report pairs in the band [ALPHA, beta]; beta was fixed at build
    /// time.
    #[arg(long, group = "family")]
    pub gap_alpha: Option<u64>,
    /// Report pairs whose occurrences do not overlap.
    #[arg(long, group = "family")]
    pub nonoverlap: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("pattern_source").required(true)))]
pub struct QueryArgs {
    /// Index file produced by `build`.
    pub index: PathBuf,
    #[command(flatten)]
    pub pattern: PatternArg,
    #[command(flatten)]
    pub family: FamilyArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Index file produced by `build`.
    pub index: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Text to verify against.
    pub text: PathBuf,
    /// Verify this index file instead of freshly built structures.
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Random (pattern, k, bound) cases per structure.
    #[arg(long, default_value_t = 256)]
    pub trials: u64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Space exponent for the freshly built recursive structure.
    #[arg(long, default_value = "1")]
    pub epsilon: String,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("pattern_source").required(true)))]
pub struct OracleArgs {
    /// Text file, read as raw bytes.
    pub text: PathBuf,
    #[command(flatten)]
    pub pattern: PatternArg,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Lower band bound accompanying --gap-beta.
    #[arg(long)]
    pub alpha: Option<u64>,
    /// Upper band bound accompanying --gap-alpha.
    #[arg(long)]
    pub beta: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Text file, read as raw bytes.
    pub text: PathBuf,
    /// Structure to time, or both.
    #[arg(long, default_value = "both")]
    pub structure: BenchStructure,
    /// Prefix lengths of the text to index, comma separated; 0 means the
    /// whole text.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub sizes: Vec<usize>,
    /// k values to time, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,8,64")]
    pub ks: Vec<usize>,
    /// Patterns sampled from the text per timing row.
    #[arg(long, default_value_t = 200)]
    pub patterns: usize,
    /// Reader threads issuing queries concurrently against one index.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value = "1")]
    pub epsilon: String,
    #[arg(long, default_value_t = 0xC00C)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchStructure {
    Full,
    Recursive,
    Both,
}
