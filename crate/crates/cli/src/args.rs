use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use colgraph::bench::Suite;
use colgraph::catalog::Direction;
use colgraph::exec::Executor;
use colgraph::gen::{DegreeDist, PropSpec};

/// Columnar in-memory property graph store.
#[derive(Debug, Parser)]
#[command(name = "colgraph", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest a schema and CSV files, write a snapshot and print its memory ledger
    Load(LoadArgs),
    /// Run one query and print its results as TSV
    Query(QueryArgs),
    /// Generate a synthetic graph as schema.json plus CSV files
    Gen(GenArgs),
    /// Run a benchmark suite and print one TSV row per measurement
    Bench(BenchArgs),
    /// Print the memory ledger of a store
    Stats(StatsArgs),
}

/// `LABEL=PATH`
#[derive(Debug, Clone)]
pub struct LabelPath {
    pub label: String,
    pub path: PathBuf,
}

fn label_path(s: &str) -> Result<LabelPath, String> {
    match s.split_once('=') {
        Some((label, path)) if !label.is_empty() && !path.is_empty() => Ok(LabelPath {
            label: label.to_owned(),
            path: path.into(),
        }),
        _ => Err(format!("expected LABEL=PATH, got {s:?}")),
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Layout {
    #[value(name = "prop_pages")]
    PropPages,
    #[value(name = "edge_cols")]
    EdgeCols,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Dir {
    Fwd,
    Bwd,
}

impl From<Dir> for Direction {
    fn from(d: Dir) -> Self {
        match d {
            Dir::Fwd => Direction::Fwd,
            Dir::Bwd => Direction::Bwd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NullMode {
    Jacobson,
    Vanilla,
    Off,
}

/// Storage configuration. Unset flags keep the stored configuration of a
/// snapshot, or the defaults when building from CSV.
#[derive(Debug, Clone, Default, Args)]
pub struct StorageArgs {
    #[arg(long, value_enum)]
    pub edge_prop_layout: Option<Layout>,
    #[arg(long, value_enum)]
    pub pages_direction: Option<Dir>,
    /// adjacency lists per property page
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, value_enum)]
    pub null: Option<NullMode>,
    /// Jacobson chunk width in bits (8 or 16)
    #[arg(long)]
    pub c: Option<u32>,
    /// Jacobson block width exponent (8, 16, 24 or 32)
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl StorageArgs {
    pub fn is_empty(&self) -> bool {
        self.edge_prop_layout.is_none()
            && self.pages_direction.is_none()
            && self.k.is_none()
            && self.null.is_none()
            && self.c.is_none()
            && self.m.is_none()
            && self.seed.is_none()
    }
}

/// Where a command reads its graph from: a snapshot, or a schema with CSVs.
#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// snapshot file, or a name resolved as NAME.snap in $COLGRAPH_SNAPSHOT_DIR
    #[arg(long, conflicts_with_all = ["schema", "vertices", "edges"])]
    pub store: Option<String>,
    #[arg(long, requires = "vertices")]
    pub schema: Option<PathBuf>,
    #[arg(long, value_name = "LABEL=PATH", value_parser = label_path)]
    pub vertices: Vec<LabelPath>,
    #[arg(long, value_name = "LABEL=PATH", value_parser = label_path)]
    pub edges: Vec<LabelPath>,
    #[command(flatten)]
    pub storage: StorageArgs,
}

#[derive(Debug, Args)]
pub struct LoadArgs {
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long, value_name = "LABEL=PATH", value_parser = label_path)]
    pub vertices: Vec<LabelPath>,
    #[arg(long, value_name = "LABEL=PATH", value_parser = label_path)]
    pub edges: Vec<LabelPath>,
    /// snapshot path; defaults to SCHEMA_STEM.snap in $COLGRAPH_SNAPSHOT_DIR
    /// or the current directory
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub storage: StorageArgs,
}

#[derive(Debug, Args)]
pub struct ExecArgs {
    #[arg(long, default_value = "lbp", value_parser = parse_executor)]
    pub executor: Executor,
    /// vertices per scan block
    #[arg(long, default_value_t = 1024)]
    pub morsel: usize,
}

fn parse_executor(s: &str) -> Result<Executor, String> {
    s.parse()
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("text").required(true).args(["query", "file"]))]
pub struct QueryArgs {
    /// query text
    pub query: Option<String>,
    /// read the query from a file
    #[arg(long, short)]
    pub file: Option<PathBuf>,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub exec: ExecArgs,
    /// node variable to scan first
    #[arg(long)]
    pub hint: Option<String>,
    /// run five times and print a timing row instead of the results
    #[arg(long)]
    pub time: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// output directory
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, short = 'n', default_value_t = 1000)]
    pub num_vertices: u64,
    #[arg(long, short = 'm', default_value_t = 10_000)]
    pub num_edges: u64,
    /// uniform, zipf (s = 1.2) or zipf:S
    #[arg(long, default_value = "uniform")]
    pub dist: DegreeDist,
    #[arg(long, default_value = "V")]
    pub vertex_label: String,
    #[arg(long, default_value = "E")]
    pub edge_label: String,
    /// 1-1, 1-n, n-1 or n-n
    #[arg(long, default_value = "n-n")]
    pub cardinality: String,
    /// NAME:TYPE[:NULL_FRACTION], repeatable
    #[arg(long = "vertex-prop")]
    pub vertex_props: Vec<PropSpec>,
    /// NAME:TYPE[:NULL_FRACTION], repeatable
    #[arg(long = "edge-prop")]
    pub edge_props: Vec<PropSpec>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub suite: Suite,
    #[command(flatten)]
    pub source: SourceArgs,
    /// vertices per scan block
    #[arg(long, default_value_t = 1024)]
    pub morsel: usize,
    /// hop counts for the k-hop suites
    #[arg(long, value_delimiter = ',')]
    pub hops: Vec<usize>,
    /// k values for k_sweep
    #[arg(long, value_delimiter = ',')]
    pub ks: Vec<u64>,
    /// non-NULL percentages for null_density
    #[arg(long, value_delimiter = ',')]
    pub densities: Vec<u32>,
    /// C:M pairs for cm_sweep
    #[arg(long, value_delimiter = ',', value_parser = parse_cm)]
    pub cms: Vec<(u32, u32)>,
}

fn parse_cm(s: &str) -> Result<(u32, u32), String> {
    let err = || format!("expected C:M, got {s:?}");
    let (c, m) = s.split_once(':').ok_or_else(err)?;
    Ok((c.parse().map_err(|_| err())?, m.parse().map_err(|_| err())?))
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
}
