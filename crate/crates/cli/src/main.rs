mod args;

use std::fmt::Display;
use std::io::{self, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use colgraph::bench::{self, BenchOptions};
use colgraph::catalog::{Cardinality, Catalog, SchemaDoc};
use colgraph::compression::{JacobsonParams, NullCompression};
use colgraph::exec::{run_query, ExecOptions};
use colgraph::gen::{generate, GenSpec};
use colgraph::ingest::load_graph;
use colgraph::storage::{build_storage, EdgePropLayout, GraphStore, MemoryLedger, StorageConfig};

use args::{
    BenchArgs, Cli, Command, GenArgs, LabelPath, Layout, LoadArgs, NullMode, QueryArgs, SourceArgs, StatsArgs,
    StorageArgs,
};

/// Directory that bare snapshot names resolve against.
const SNAPSHOT_DIR_ENV: &str = "COLGRAPH_SNAPSHOT_DIR";

/// A failure caused by the invocation or its inputs (exit code 1).
#[derive(Debug)]
struct UserError(String);

type Result<T> = std::result::Result<T, UserError>;

fn user(e: impl Display) -> UserError {
    UserError(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match panic::catch_unwind(AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(UserError(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(_) => {
            eprintln!("internal error");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let out = match cli.command {
        Command::Load(a) => load(a)?,
        Command::Query(a) => query(a)?,
        Command::Gen(a) => gen(a)?,
        Command::Bench(a) => bench(a)?,
        Command::Stats(a) => stats(a)?,
    };
    let mut stdout = io::stdout().lock();
    stdout
        .write_all(out.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(user)
}

fn load(a: LoadArgs) -> Result<String> {
    let config = storage_config(StorageConfig::default(), &a.storage)?;
    let store = from_csv(&a.schema, &a.vertices, &a.edges, config)?;
    let path = match a.out {
        Some(p) => p,
        None => {
            let stem = a
                .schema
                .file_stem()
                .map_or("graph".into(), |s| s.to_string_lossy().into_owned());
            snapshot_dir().join(format!("{stem}.snap"))
        }
    };
    store
        .save(&path)
        .map_err(|e| user(format!("{}: {e}", path.display())))?;
    eprintln!("snapshot written to {}", path.display());
    Ok(ledger_tsv(&store.memory_ledger()))
}

fn query(a: QueryArgs) -> Result<String> {
    let text = match (&a.query, &a.file) {
        (Some(q), _) => q.clone(),
        (None, Some(f)) => std::fs::read_to_string(f).map_err(|e| user(format!("{}: {e}", f.display())))?,
        (None, None) => return Err(user("no query given")),
    };
    let store = open(&a.source)?;
    let opts = ExecOptions { morsel: a.exec.morsel };
    if opts.morsel == 0 {
        return Err(user("--morsel must be positive"));
    }
    let hint = a.hint.as_deref();
    if a.time {
        let (t, r) = bench::time_query(&store, &text, a.exec.executor, hint, &opts).map_err(user)?;
        return Ok(format!(
            "executor\tavg_ms\tmin_ms\tmax_ms\tresult\n{}\t{:.3}\t{:.3}\t{:.3}\t{}\n",
            a.exec.executor,
            t.avg_ms,
            t.min_ms,
            t.max_ms,
            bench::result_cell(&r)
        ));
    }
    let result = run_query(&store, &text, a.exec.executor, hint, &opts).map_err(user)?;
    Ok(result.to_tsv(store.catalog()))
}

fn gen(a: GenArgs) -> Result<String> {
    let spec = GenSpec {
        vertices: a.num_vertices,
        edges: a.num_edges,
        dist: a.dist,
        seed: a.seed,
        vertex_label: a.vertex_label,
        edge_label: a.edge_label,
        cardinality: Cardinality::parse(&a.cardinality).map_err(user)?,
        vertex_props: a.vertex_props,
        edge_props: a.edge_props,
    };
    let g = generate(&spec).map_err(user)?;
    let files = g.write_dir(&a.out).map_err(user)?;
    Ok(files.iter().map(|p| format!("{}\n", p.display())).collect())
}

fn bench(a: BenchArgs) -> Result<String> {
    let store = open(&a.source)?;
    let defaults = BenchOptions::default();
    let opts = BenchOptions {
        exec: ExecOptions {
            morsel: a.morsel.max(1),
        },
        seed: a.source.storage.seed.unwrap_or(defaults.seed),
        hops: or_default(a.hops, defaults.hops),
        ks: or_default(a.ks, defaults.ks),
        densities: or_default(a.densities, defaults.densities),
        cms: or_default(a.cms, defaults.cms),
    };
    let rows = bench::run_suite(a.suite, &store, &opts).map_err(user)?;
    Ok(bench::to_tsv(&rows))
}

fn or_default<T>(v: Vec<T>, default: Vec<T>) -> Vec<T> {
    if v.is_empty() {
        default
    } else {
        v
    }
}

fn stats(a: StatsArgs) -> Result<String> {
    Ok(ledger_tsv(&open(&a.source)?.memory_ledger()))
}

fn ledger_tsv(l: &MemoryLedger) -> String {
    let mut s = String::from("component\tbytes\n");
    for (name, bytes) in l.rows() {
        s.push_str(&format!("{name}\t{bytes}\n"));
    }
    s
}

/// `base` with the flags that were given applied on top.
fn storage_config(base: StorageConfig, a: &StorageArgs) -> Result<StorageConfig> {
    let mut cfg = base;
    if let Some(l) = a.edge_prop_layout {
        cfg.edge_prop_layout = match l {
            Layout::PropPages => EdgePropLayout::PropPages,
            Layout::EdgeCols => EdgePropLayout::EdgeCols,
        };
    }
    if let Some(d) = a.pages_direction {
        cfg.pages_direction = d.into();
    }
    if let Some(k) = a.k {
        if k == 0 {
            return Err(user("--k must be positive"));
        }
        cfg.k = k;
    }
    let explicit_cm = a.c.is_some() || a.m.is_some();
    match a.null.or(explicit_cm.then_some(NullMode::Jacobson)) {
        Some(NullMode::Jacobson) => {
            let cur = match cfg.null_compression {
                NullCompression::Jacobson(p) => p,
                _ => JacobsonParams::default(),
            };
            let p = JacobsonParams::new(a.c.unwrap_or(cur.c()), a.m.unwrap_or(cur.m())).map_err(user)?;
            cfg.null_compression = NullCompression::Jacobson(p);
        }
        Some(_) if explicit_cm => return Err(user("--c and --m only apply to --null jacobson")),
        Some(NullMode::Vanilla) => cfg.null_compression = NullCompression::Vanilla,
        Some(NullMode::Off) => cfg.null_compression = NullCompression::Off,
        None => {}
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn snapshot_dir() -> PathBuf {
    std::env::var_os(SNAPSHOT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from)
}

/// A path as given, unless it is a bare name that only exists in the
/// snapshot directory.
fn snapshot_path(s: &str) -> PathBuf {
    let p = PathBuf::from(s);
    if p.exists() || p.components().count() > 1 {
        return p;
    }
    let named = snapshot_dir().join(format!("{s}.snap"));
    if named.exists() {
        named
    } else {
        p
    }
}

fn open(src: &SourceArgs) -> Result<GraphStore> {
    if let Some(s) = &src.store {
        let path = snapshot_path(s);
        let store = GraphStore::load(&path).map_err(|e| user(format!("{}: {e}", path.display())))?;
        if src.storage.is_empty() {
            return Ok(store);
        }
        let config = storage_config(*store.config(), &src.storage)?;
        let data = store.to_graph_data().map_err(user)?;
        return build_storage(store.catalog(), &data, config).map_err(user);
    }
    let Some(schema) = &src.schema else {
        return Err(user("give --store, or --schema with --vertices and --edges"));
    };
    let config = storage_config(StorageConfig::default(), &src.storage)?;
    from_csv(schema, &src.vertices, &src.edges, config)
}

fn from_csv(schema: &Path, vertices: &[LabelPath], edges: &[LabelPath], config: StorageConfig) -> Result<GraphStore> {
    let text = std::fs::read_to_string(schema).map_err(|e| user(format!("{}: {e}", schema.display())))?;
    let doc = SchemaDoc::from_json(&text).map_err(|e| user(format!("{}: {e}", schema.display())))?;
    let catalog = Catalog::define_schema(&doc).map_err(user)?;
    let data = load_graph(&catalog, &label_files(vertices), &label_files(edges)).map_err(user)?;
    build_storage(&catalog, &data, config).map_err(user)
}

fn label_files(v: &[LabelPath]) -> Vec<(String, &Path)> {
    v.iter().map(|l| (l.label.clone(), l.path.as_path())).collect()
}
