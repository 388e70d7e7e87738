//! Benchmark suites over a loaded store. Each query is run five times and
//! timed as the average of the last three runs, alongside min and max.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::catalog::{Cardinality, Catalog, DataType, Direction, PropertyDoc};
use crate::compression::{JacobsonParams, NullCompression};
use crate::data::GraphData;
use crate::exec::{execute, ExecOptions, Executor, QueryResult};
use crate::query::{prepare, QueryError};
use crate::storage::{build_storage, EdgePropLayout, EdgeProps, GraphStore, StorageConfig, StorageError};
use crate::value::Value;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown suite {0:?} (expected one of {list})", list = Suite::ALL.map(|s| s.to_string()).join(", "))]
    UnknownSuite(String),
    #[error("suite needs {0}")]
    Unsuitable(String),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error(transparent)]
    Catalog(#[from] crate::catalog::CatalogError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    KhopFilter,
    KhopCount,
    PropPagesVsEdgeCols,
    NullDensity,
    KSweep,
    CmSweep,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::KhopFilter,
        Suite::KhopCount,
        Suite::PropPagesVsEdgeCols,
        Suite::NullDensity,
        Suite::KSweep,
        Suite::CmSweep,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::KhopFilter => "khop_filter",
            Suite::KhopCount => "khop_count",
            Suite::PropPagesVsEdgeCols => "proppages_vs_edgecols",
            Suite::NullDensity => "null_density",
            Suite::KSweep => "k_sweep",
            Suite::CmSweep => "cm_sweep",
        })
    }
}

impl FromStr for Suite {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| BenchError::UnknownSuite(s.to_owned()))
    }
}

/// Milliseconds over a five-run protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    /// average of the last three runs
    pub avg_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

pub const RUNS: usize = 5;
const TIMED: usize = 3;

/// Runs `f` five times; returns the timing and the last run's output.
pub fn time_runs<T>(mut f: impl FnMut() -> T) -> (Timing, T) {
    let mut ms = Vec::with_capacity(RUNS);
    let mut last = None;
    for _ in 0..RUNS {
        let t = Instant::now();
        let out = f();
        ms.push(t.elapsed().as_secs_f64() * 1e3);
        last = Some(out);
    }
    let timed = &ms[RUNS - TIMED..];
    let timing = Timing {
        avg_ms: timed.iter().sum::<f64>() / TIMED as f64,
        min_ms: ms.iter().copied().fold(f64::INFINITY, f64::min),
        max_ms: ms.iter().copied().fold(0.0, f64::max),
    };
    (timing, last.expect("at least one run"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub config: String,
    pub query: String,
    pub time: Timing,
    /// bytes of the structure the suite varies
    pub bytes: u64,
    /// auxiliary bytes (NULL indexes, page directories) of that structure
    pub aux_bytes: u64,
    pub result: String,
}

pub const TSV_HEADER: &str = "config\tquery\tavg_ms\tmin_ms\tmax_ms\tbytes\taux_bytes\tresult";

pub fn to_tsv(rows: &[BenchRow]) -> String {
    let mut out = format!("{TSV_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{:.3}\t{:.3}\t{:.3}\t{}\t{}\t{}\n",
            r.config, r.query, r.time.avg_ms, r.time.min_ms, r.time.max_ms, r.bytes, r.aux_bytes, r.result
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub exec: ExecOptions,
    pub seed: u64,
    /// hop counts for the k-hop suites
    pub hops: Vec<usize>,
    /// k values for `k_sweep`; defaults to powers of two 2..2^17
    pub ks: Vec<u64>,
    /// non-NULL percentages for `null_density`
    pub densities: Vec<u32>,
    /// `(c, m)` pairs for `cm_sweep`
    pub cms: Vec<(u32, u32)>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            exec: ExecOptions::default(),
            seed: 0,
            hops: vec![1, 2, 3],
            ks: (1..=17).map(|i| 1u64 << i).collect(),
            densities: (1..=10).map(|d| d * 10).collect(),
            cms: [8, 16]
                .into_iter()
                .flat_map(|c| [8, 16, 24, 32].map(|m| (c, m)))
                .collect(),
        }
    }
}

/// The labels and properties a suite's queries run over: an n-n edge label
/// `edge` from `vertex` to `vertex`, an INT64 vertex property and a numeric
/// edge property when present.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub vertex: String,
    pub edge: String,
    pub vertex_prop: Option<(String, i64)>,
    pub edge_prop: Option<(String, f64)>,
}

fn median_threshold(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(v[v.len() / 2])
}

impl Target {
    /// Picks the first n-n edge label whose source and destination share a
    /// label, preferring one with a numeric property.
    pub fn find(store: &GraphStore) -> Result<Target, BenchError> {
        let cat = store.catalog();
        let mut candidates: Vec<_> = cat
            .edge_labels()
            .iter()
            .filter(|e| e.cardinality == Cardinality::NN)
            .filter_map(|e| e.src_labels.iter().find(|l| e.dst_labels.contains(l)).map(|&v| (e, v)))
            .collect();
        candidates.sort_by_key(|(e, _)| !e.properties.iter().any(|p| is_numeric(p.datatype)));
        let (e, v) = candidates
            .first()
            .ok_or_else(|| BenchError::Unsuitable("an n-n edge label between vertices of one label".into()))?;
        let vdef = cat.vertex_label(*v);
        let vertex_prop = vdef
            .properties
            .iter()
            .enumerate()
            .find(|(_, p)| p.datatype == DataType::Int64)
            .and_then(|(i, p)| {
                let col = store.vertex_property(*v, i);
                median_threshold((0..col.len()).filter_map(|j| col.get(j).as_f64())).map(|t| (p.name.clone(), t as i64))
            });
        let edge_prop = match e.properties.iter().position(|p| is_numeric(p.datatype)) {
            Some(i) => {
                let reader = store.edge_prop_reader(e.id, Direction::Fwd, i)?;
                let mut vals = Vec::new();
                if let Some(csr) = store.csr(e.id, Direction::Fwd, *v)? {
                    for o in 0..csr.num_vertices() {
                        let list = csr.list(o);
                        let src = crate::ids::VertexId::new(*v, o as u64);
                        vals.extend((0..list.len()).filter_map(|j| reader.read(src, &list, j).as_f64()));
                    }
                }
                median_threshold(vals.into_iter()).map(|t| (e.properties[i].name.clone(), t))
            }
            None => None,
        };
        Ok(Target {
            vertex: vdef.name.clone(),
            edge: e.name.clone(),
            vertex_prop,
            edge_prop,
        })
    }

    /// `(a0:V)-[:E]->(a1:V)...` with `hops` edges.
    fn path(&self, hops: usize) -> String {
        let mut s = format!("(a0:{})", self.vertex);
        for i in 1..=hops {
            s.push_str(&format!("-[:{}]->(a{i}:{})", self.edge, self.vertex));
        }
        s
    }

    pub fn khop_count(&self, hops: usize) -> String {
        format!("MATCH {} RETURN COUNT(*)", self.path(hops))
    }

    pub fn khop_filter(&self, hops: usize) -> Result<String, BenchError> {
        let (p, t) = self
            .vertex_prop
            .as_ref()
            .ok_or_else(|| BenchError::Unsuitable(format!("an INT64 property on {}", self.vertex)))?;
        Ok(format!(
            "MATCH {} WHERE a{hops}.{p} < {t} RETURN COUNT(*)",
            self.path(hops)
        ))
    }

    /// A one-edge-property filter over `hops` edges in `dir`.
    pub fn edge_filter(&self, hops: usize, dir: Direction) -> Result<String, BenchError> {
        let (p, t) = self
            .edge_prop
            .as_ref()
            .ok_or_else(|| BenchError::Unsuitable(format!("a numeric property on {}", self.edge)))?;
        let mut s = format!("MATCH (a0:{})", self.vertex);
        let mut preds = Vec::new();
        for i in 1..=hops {
            match dir {
                Direction::Fwd => s.push_str(&format!("-[e{i}:{}]->(a{i}:{})", self.edge, self.vertex)),
                Direction::Bwd => s.push_str(&format!("<-[e{i}:{}]-(a{i}:{})", self.edge, self.vertex)),
            }
            preds.push(format!("e{i}.{p} < {t}"));
        }
        Ok(format!("{s} WHERE {} RETURN COUNT(*)", preds.join(" AND ")))
    }

    pub fn sparse_read(&self, prop: &str) -> String {
        format!(
            "MATCH (a:{v})-[:{e}]->(b:{v}) RETURN SUM(b.{prop})",
            v = self.vertex,
            e = self.edge
        )
    }
}

fn is_numeric(t: DataType) -> bool {
    matches!(t, DataType::Int64 | DataType::Double)
}

/// One-cell summary of a result: the count, the scalar, or the row count.
pub fn result_cell(r: &QueryResult) -> String {
    match r {
        QueryResult::Count(n) => n.to_string(),
        QueryResult::Scalar { value, .. } => value.to_string(),
        QueryResult::Rows { rows, .. } => format!("{} rows", rows.len()),
    }
}

/// Times one query on `store`.
pub fn time_query(
    store: &GraphStore,
    query: &str,
    executor: Executor,
    hint: Option<&str>,
    opts: &ExecOptions,
) -> Result<(Timing, QueryResult), QueryError> {
    let plan = prepare(query, store.catalog(), hint)?;
    let (t, r) = time_runs(|| execute(store, &plan, executor, opts));
    Ok((t, r?))
}

fn edge_prop_bytes(store: &GraphStore, label: &str) -> (u64, u64) {
    let id = store.catalog().edge_label_by_name(label).expect("target label").id;
    let (mut cols, mut dir_bytes) = (Vec::new(), 0u64);
    match store.edge_storage(id).props() {
        EdgeProps::None => {}
        EdgeProps::VertexColumns { columns, .. } => cols.extend(columns.iter().flatten().flatten()),
        EdgeProps::Pages { pages, .. } => {
            for p in pages.iter().flatten() {
                cols.extend(p.properties());
                dir_bytes += p.directory_bytes() as u64;
            }
        }
        EdgeProps::EdgeCols(alt) => cols.extend(alt.properties()),
    }
    let bytes = cols.iter().map(|c| c.value_bytes() as u64).sum();
    (
        bytes,
        dir_bytes + cols.iter().map(|c| c.aux_bytes() as u64).sum::<u64>(),
    )
}

/// Adds INT64 columns `nd{d}` to `vertex`, one per density `d` (percent
/// non-NULL), with values drawn from `0..1000`.
pub fn with_sparse_columns(
    catalog: &Catalog,
    data: &GraphData,
    vertex: &str,
    densities: &[u32],
    seed: u64,
) -> Result<(Catalog, GraphData), BenchError> {
    let mut doc = catalog.to_doc();
    let vl = doc
        .vertex_labels
        .iter_mut()
        .find(|v| v.name == vertex)
        .ok_or_else(|| BenchError::Unsuitable(format!("vertex label {vertex}")))?;
    for d in densities {
        vl.properties.push(PropertyDoc {
            name: format!("nd{d}"),
            datatype: DataType::Int64.as_str().to_owned(),
            nullable: true,
        });
    }
    let out = Catalog::define_schema(&doc)?;
    let mut data = data.clone();
    let id = out.vertex_label_by_name(vertex).expect("label").id;
    let t = &mut data.vertices[id.index()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &d in densities {
        let p = f64::from(d.min(100)) / 100.0;
        t.columns.push(
            (0..t.count)
                .map(|_| {
                    if rng.random_bool(p) {
                        Value::Int64(rng.random_range(0..1000))
                    } else {
                        Value::Null
                    }
                })
                .collect(),
        );
    }
    Ok((out, data))
}

fn nulls_config(base: &StorageConfig, mode: NullCompression) -> StorageConfig {
    StorageConfig {
        null_compression: mode,
        ..*base
    }
}

fn mode_name(mode: NullCompression) -> String {
    match mode {
        NullCompression::Jacobson(p) => format!("jacobson(c={},m={})", p.c(), p.m()),
        NullCompression::Vanilla => "vanilla".into(),
        NullCompression::Off => "uncompressed".into(),
    }
}

fn sparse_column_bytes(store: &GraphStore, vertex: &str, prop: &str) -> Result<(u64, u64), BenchError> {
    let id = store.catalog().vertex_label_by_name(vertex).expect("label").id;
    let col = store.vertex_property_by_name(id, prop)?;
    Ok((col.value_bytes() as u64, col.nulls().aux_bits().div_ceil(8)))
}

/// Runs `suite` over `store`, rebuilding it under other configurations where
/// the suite calls for it.
pub fn run_suite(suite: Suite, store: &GraphStore, opts: &BenchOptions) -> Result<Vec<BenchRow>, BenchError> {
    let target = Target::find(store)?;
    let ex = &opts.exec;
    let mut rows = Vec::new();
    let mut row = |config: String, query: &str, t: Timing, bytes: (u64, u64), r: &QueryResult| {
        rows.push(BenchRow {
            config,
            query: query.to_owned(),
            time: t,
            bytes: bytes.0,
            aux_bytes: bytes.1,
            result: result_cell(r),
        })
    };
    match suite {
        Suite::KhopCount | Suite::KhopFilter => {
            let adj = store.memory_ledger().adjacency();
            for &h in &opts.hops {
                let q = match suite {
                    Suite::KhopCount => target.khop_count(h),
                    _ => target.khop_filter(h)?,
                };
                for executor in [Executor::Lbp, Executor::Volcano] {
                    let (t, r) = time_query(store, &q, executor, Some("a0"), ex)?;
                    row(executor.to_string(), &q, t, (adj, 0), &r);
                }
            }
        }
        Suite::PropPagesVsEdgeCols => {
            let data = store.to_graph_data()?;
            let base = *store.config();
            for (name, layout) in [
                ("prop_pages", EdgePropLayout::PropPages),
                ("edge_cols", EdgePropLayout::EdgeCols),
            ] {
                let s = build_storage(
                    store.catalog(),
                    &data,
                    StorageConfig {
                        edge_prop_layout: layout,
                        pages_direction: Direction::Fwd,
                        ..base
                    },
                )?;
                let bytes = edge_prop_bytes(&s, &target.edge);
                for dir in Direction::BOTH {
                    for &h in opts.hops.iter().filter(|&&h| h <= 2) {
                        let q = target.edge_filter(h, dir)?;
                        let (t, r) = time_query(&s, &q, Executor::Lbp, Some("a0"), ex)?;
                        row(format!("{name}/{dir}"), &q, t, bytes, &r);
                    }
                }
            }
        }
        Suite::KSweep => {
            let data = store.to_graph_data()?;
            let base = *store.config();
            let mut layouts: Vec<(String, StorageConfig)> = opts
                .ks
                .iter()
                .map(|&k| {
                    (
                        format!("k={k}"),
                        StorageConfig {
                            edge_prop_layout: EdgePropLayout::PropPages,
                            pages_direction: Direction::Fwd,
                            k,
                            ..base
                        },
                    )
                })
                .collect();
            layouts.push((
                "edge_cols".into(),
                StorageConfig {
                    edge_prop_layout: EdgePropLayout::EdgeCols,
                    ..base
                },
            ));
            for (name, config) in layouts {
                let s = build_storage(store.catalog(), &data, config)?;
                let bytes = edge_prop_bytes(&s, &target.edge);
                for dir in Direction::BOTH {
                    let q = target.edge_filter(1, dir)?;
                    let (t, r) = time_query(&s, &q, Executor::Lbp, Some("a0"), ex)?;
                    row(format!("{name}/{dir}"), &q, t, bytes, &r);
                }
            }
        }
        Suite::NullDensity => {
            let (cat, data) = with_sparse_columns(
                store.catalog(),
                &store.to_graph_data()?,
                &target.vertex,
                &opts.densities,
                opts.seed,
            )?;
            let base = *store.config();
            for mode in [
                NullCompression::default(),
                NullCompression::Vanilla,
                NullCompression::Off,
            ] {
                let s = build_storage(&cat, &data, nulls_config(&base, mode))?;
                for d in &opts.densities {
                    let prop = format!("nd{d}");
                    let q = target.sparse_read(&prop);
                    let (t, r) = time_query(&s, &q, Executor::Lbp, Some("a"), ex)?;
                    row(
                        format!("{}/density={d}%", mode_name(mode)),
                        &q,
                        t,
                        sparse_column_bytes(&s, &target.vertex, &prop)?,
                        &r,
                    );
                }
            }
        }
        Suite::CmSweep => {
            let (cat, data) = with_sparse_columns(
                store.catalog(),
                &store.to_graph_data()?,
                &target.vertex,
                &[50],
                opts.seed,
            )?;
            let base = *store.config();
            for &(c, m) in &opts.cms {
                let mode = NullCompression::Jacobson(JacobsonParams::new(c, m).map_err(StorageError::from)?);
                let s = build_storage(&cat, &data, nulls_config(&base, mode))?;
                let q = target.sparse_read("nd50");
                let (t, r) = time_query(&s, &q, Executor::Lbp, Some("a"), ex)?;
                row(
                    mode_name(mode),
                    &q,
                    t,
                    sparse_column_bytes(&s, &target.vertex, "nd50")?,
                    &r,
                );
            }
        }
    }
    Ok(rows)
}
