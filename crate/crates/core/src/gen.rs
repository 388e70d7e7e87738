//! Seeded synthetic graphs: single-label graphs with uniform or zipf
//! out-degrees, random multi-label graphs and random queries over them.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use thiserror::Error;

use crate::catalog::{
    Cardinality, Catalog, CatalogError, DataType, EdgeLabelDoc, PropertyDoc, SchemaDoc, VertexLabelDoc,
};
use crate::data::GraphData;
use crate::ids::VertexId;
use crate::ingest::{write_edge_csv, write_vertex_csv};
use crate::value::Value;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegreeDist {
    Uniform,
    /// zipf-distributed source out-degrees with exponent `s`
    Zipf(f64),
}

impl FromStr for DegreeDist {
    type Err = GenError;

    /// `uniform`, `zipf` (s = 1.2) or `zipf:S`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GenError::InvalidSpec(format!("degree distribution {s:?} (expected uniform, zipf or zipf:S)"));
        match s.split_once(':') {
            None if s == "uniform" => Ok(DegreeDist::Uniform),
            None if s == "zipf" => Ok(DegreeDist::Zipf(1.2)),
            Some(("zipf", e)) => match e.parse::<f64>() {
                Ok(e) if e > 0.0 && e.is_finite() => Ok(DegreeDist::Zipf(e)),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        }
    }
}

/// A generated property: `name:TYPE` or `name:TYPE:NULL_FRACTION`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropSpec {
    pub name: String,
    pub datatype: DataType,
    pub null_fraction: f64,
}

impl FromStr for PropSpec {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| GenError::InvalidSpec(format!("property {s:?}: {why}"));
        let mut parts = s.split(':');
        let name = parts
            .next()
            .filter(|n| !n.is_empty())
            .ok_or_else(|| bad("missing name"))?;
        let datatype =
            DataType::parse(parts.next().ok_or_else(|| bad("missing type"))?).map_err(|e| bad(&e.to_string()))?;
        let null_fraction = match parts.next() {
            None => 0.0,
            Some(f) => f
                .parse::<f64>()
                .ok()
                .filter(|f| (0.0..=1.0).contains(f))
                .ok_or_else(|| bad("null fraction must be in [0, 1]"))?,
        };
        if parts.next().is_some() {
            return Err(bad("too many fields"));
        }
        Ok(Self {
            name: name.to_owned(),
            datatype,
            null_fraction,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub vertices: u64,
    pub edges: u64,
    pub dist: DegreeDist,
    pub seed: u64,
    pub vertex_label: String,
    pub edge_label: String,
    pub cardinality: Cardinality,
    pub vertex_props: Vec<PropSpec>,
    pub edge_props: Vec<PropSpec>,
}

impl Default for GenSpec {
    fn default() -> Self {
        Self {
            vertices: 1000,
            edges: 10_000,
            dist: DegreeDist::Uniform,
            seed: 0,
            vertex_label: "V".into(),
            edge_label: "E".into(),
            cardinality: Cardinality::NN,
            vertex_props: Vec::new(),
            edge_props: Vec::new(),
        }
    }
}

/// A generated graph with its schema.
#[derive(Debug, Clone)]
pub struct Generated {
    pub schema: SchemaDoc,
    pub catalog: Catalog,
    pub data: GraphData,
}

impl Generated {
    fn new(schema: SchemaDoc, build: impl FnOnce(&Catalog, &mut GraphData)) -> Result<Self, GenError> {
        let catalog = Catalog::define_schema(&schema)?;
        let mut data = GraphData::empty(&catalog);
        build(&catalog, &mut data);
        Ok(Self { schema, catalog, data })
    }

    /// Writes `schema.json` and one CSV per label into `dir`; returns the
    /// paths written.
    pub fn write_dir(&self, dir: &Path) -> Result<Vec<PathBuf>, GenError> {
        let io = |path: &Path| {
            let path = path.to_owned();
            move |source| GenError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::new();
        let schema_path = dir.join("schema.json");
        std::fs::write(&schema_path, self.schema.to_json() + "\n").map_err(io(&schema_path))?;
        written.push(schema_path);
        let csv_err = |path: &Path| {
            let path = path.to_owned();
            move |e: csv::Error| GenError::Io {
                path,
                source: std::io::Error::other(e),
            }
        };
        for def in self.catalog.vertex_labels() {
            let path = dir.join(format!("{}.csv", def.name));
            let f = BufWriter::new(File::create(&path).map_err(io(&path))?);
            write_vertex_csv(def, &self.data.vertices[def.id.index()], f).map_err(csv_err(&path))?;
            written.push(path);
        }
        for def in self.catalog.edge_labels() {
            let path = dir.join(format!("{}.csv", def.name));
            let f = BufWriter::new(File::create(&path).map_err(io(&path))?);
            write_edge_csv(&self.catalog, def, &self.data.edges[def.id.index()], f).map_err(csv_err(&path))?;
            written.push(path);
        }
        Ok(written)
    }
}

const COLOURS: [&str; 8] = ["red", "green", "blue", "cyan", "magenta", "yellow", "black", "white"];

fn random_value(rng: &mut ChaCha8Rng, datatype: DataType, null_fraction: f64) -> Value {
    if null_fraction > 0.0 && rng.random_bool(null_fraction) {
        return Value::Null;
    }
    match datatype {
        DataType::Int64 => Value::Int64(rng.random_range(0..1000)),
        DataType::Double => Value::Double((rng.random_range(0..1_000_000) as f64) / 1000.0),
        DataType::Boolean => Value::Bool(rng.random()),
        DataType::Date => Value::Date(rng.random_range(0..20_000)),
        DataType::String => Value::String(format!("s{}", rng.random_range(0..10_000))),
        DataType::Categorical => Value::String((*COLOURS.choose(rng).expect("non-empty")).to_owned()),
    }
}

fn prop_docs(props: &[PropSpec]) -> Vec<PropertyDoc> {
    props
        .iter()
        .map(|p| PropertyDoc {
            name: p.name.clone(),
            datatype: p.datatype.as_str().to_owned(),
            nullable: p.null_fraction > 0.0,
        })
        .collect()
}

/// A single-label graph following `spec`. Deterministic for a fixed spec.
pub fn generate(spec: &GenSpec) -> Result<Generated, GenError> {
    let n = spec.vertices;
    let m = spec.edges;
    if m > 0 && n == 0 {
        return Err(GenError::InvalidSpec("edges need at least one vertex".into()));
    }
    let (single_src, single_dst) = (
        spec.cardinality.is_single(crate::catalog::Direction::Fwd),
        spec.cardinality.is_single(crate::catalog::Direction::Bwd),
    );
    if (single_src || single_dst) && m > n {
        return Err(GenError::InvalidSpec(format!(
            "{} edges cannot exceed the vertex count ({m} > {n})",
            spec.cardinality.as_str()
        )));
    }
    if let DegreeDist::Zipf(s) = spec.dist {
        if !(s > 0.0 && s.is_finite()) {
            return Err(GenError::InvalidSpec(format!("zipf exponent {s}")));
        }
    }
    let schema = SchemaDoc {
        vertex_labels: vec![VertexLabelDoc {
            name: spec.vertex_label.clone(),
            properties: prop_docs(&spec.vertex_props),
        }],
        edge_labels: vec![EdgeLabelDoc {
            name: spec.edge_label.clone(),
            src: vec![spec.vertex_label.clone()],
            dst: vec![spec.vertex_label.clone()],
            cardinality: spec.cardinality.as_str().to_owned(),
            properties: prop_docs(&spec.edge_props),
        }],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Generated::new(schema, |catalog, data| {
        let label = catalog.vertex_labels()[0].id;
        let vt = &mut data.vertices[0];
        vt.count = n;
        for (p, col) in spec.vertex_props.iter().zip(vt.columns.iter_mut()) {
            col.extend((0..n).map(|_| random_value(&mut rng, p.datatype, p.null_fraction)));
        }
        // heavy zipf ranks land on random vertices rather than low offsets
        let mut rank_to_vertex: Vec<u64> = (0..n).collect();
        rank_to_vertex.shuffle(&mut rng);
        let zipf = match spec.dist {
            DegreeDist::Zipf(s) if n > 0 => Some(Zipf::new(n as f64, s).expect("validated exponent")),
            _ => None,
        };
        let distinct = |rng: &mut ChaCha8Rng| {
            let mut v: Vec<u64> = (0..n).collect();
            v.shuffle(rng);
            v.truncate(m as usize);
            v
        };
        let srcs: Option<Vec<u64>> = single_src.then(|| distinct(&mut rng));
        let dsts: Option<Vec<u64>> = single_dst.then(|| distinct(&mut rng));
        let et = &mut data.edges[0];
        et.src.reserve(m as usize);
        et.dst.reserve(m as usize);
        for i in 0..m as usize {
            let src = match (&srcs, &zipf) {
                (Some(s), _) => s[i],
                (None, Some(z)) => rank_to_vertex[(z.sample(&mut rng) as u64 - 1).min(n - 1) as usize],
                (None, None) => rng.random_range(0..n),
            };
            let dst = match &dsts {
                Some(d) => d[i],
                None => rng.random_range(0..n),
            };
            et.src.push(VertexId::new(label, src));
            et.dst.push(VertexId::new(label, dst));
        }
        for (p, col) in spec.edge_props.iter().zip(et.columns.iter_mut()) {
            col.extend((0..m).map(|_| random_value(&mut rng, p.datatype, p.null_fraction)));
        }
    })
}

/// A random schema of one to three vertex labels and one to four edge labels
/// of mixed cardinalities, populated with at most `max_vertices` vertices and
/// `max_edges` edges.
pub fn random_graph(seed: u64, max_vertices: u64, max_edges: u64) -> Result<Generated, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_vlabels = rng.random_range(1..=3usize);
    let vprops = [
        ("x", "INT64"),
        ("y", "DOUBLE"),
        ("s", "STRING"),
        ("c", "CATEGORICAL"),
        ("d", "DATE"),
    ];
    let mut vertex_labels = Vec::new();
    let mut null_fracs = Vec::new();
    for i in 0..n_vlabels {
        let mut properties = Vec::new();
        let mut fracs = Vec::new();
        for (name, ty) in vprops {
            if name == "x" || rng.random_bool(0.6) {
                let frac = if rng.random_bool(0.4) {
                    rng.random_range(0.05..0.95)
                } else {
                    0.0
                };
                properties.push(PropertyDoc {
                    name: name.into(),
                    datatype: ty.into(),
                    nullable: frac > 0.0,
                });
                fracs.push(frac);
            }
        }
        vertex_labels.push(VertexLabelDoc {
            name: format!("V{i}"),
            properties,
        });
        null_fracs.push(fracs);
    }
    let n_elabels = rng.random_range(1..=4usize);
    let mut edge_labels = Vec::new();
    let mut edge_fracs = Vec::new();
    let label_set = |rng: &mut ChaCha8Rng| {
        let mut names: Vec<String> = (0..n_vlabels).map(|i| format!("V{i}")).collect();
        names.shuffle(rng);
        names.truncate(rng.random_range(1..=n_vlabels.min(2)));
        names
    };
    for i in 0..n_elabels {
        let cardinality = *["n-n", "n-n", "n-1", "1-n", "1-1"].choose(&mut rng).expect("non-empty");
        let mut properties = Vec::new();
        let mut fracs = Vec::new();
        for (name, ty) in [("w", "INT64"), ("z", "DOUBLE")] {
            if rng.random_bool(0.5) {
                let frac = if rng.random_bool(0.3) {
                    rng.random_range(0.05..0.5)
                } else {
                    0.0
                };
                properties.push(PropertyDoc {
                    name: name.into(),
                    datatype: ty.into(),
                    nullable: frac > 0.0,
                });
                fracs.push(frac);
            }
        }
        edge_labels.push(EdgeLabelDoc {
            name: format!("E{i}"),
            src: label_set(&mut rng),
            dst: label_set(&mut rng),
            cardinality: cardinality.into(),
            properties,
        });
        edge_fracs.push(fracs);
    }
    let schema = SchemaDoc {
        vertex_labels,
        edge_labels,
    };
    let counts: Vec<u64> = (0..n_vlabels)
        .map(|_| rng.random_range(0..=(max_vertices / n_vlabels as u64).max(1)))
        .collect();
    Generated::new(schema, |catalog, data| {
        for (l, def) in catalog.vertex_labels().iter().enumerate() {
            let t = &mut data.vertices[l];
            t.count = counts[l];
            for ((col, p), frac) in t.columns.iter_mut().zip(&def.properties).zip(&null_fracs[l]) {
                col.extend((0..counts[l]).map(|_| random_value(&mut rng, p.datatype, *frac)));
            }
        }
        let mut budget = max_edges;
        for (e, def) in catalog.edge_labels().iter().enumerate() {
            let all = |labels: &[crate::catalog::VertexLabelId]| -> Vec<VertexId> {
                labels
                    .iter()
                    .flat_map(|&l| (0..counts[l.index()]).map(move |o| VertexId::new(l, o)))
                    .collect()
            };
            let (mut srcs, mut dsts) = (all(&def.src_labels), all(&def.dst_labels));
            if srcs.is_empty() || dsts.is_empty() {
                continue;
            }
            let single_src = def.cardinality.is_single(crate::catalog::Direction::Fwd);
            let single_dst = def.cardinality.is_single(crate::catalog::Direction::Bwd);
            let mut m = rng.random_range(0..=budget.min(max_edges / n_elabels as u64 + 1));
            if single_src {
                m = m.min(srcs.len() as u64);
                srcs.shuffle(&mut rng);
            }
            if single_dst {
                m = m.min(dsts.len() as u64);
                dsts.shuffle(&mut rng);
            }
            budget -= m;
            let t = &mut data.edges[e];
            for i in 0..m as usize {
                let s = if single_src {
                    srcs[i]
                } else {
                    *srcs.choose(&mut rng).expect("non-empty")
                };
                let d = if single_dst {
                    dsts[i]
                } else {
                    *dsts.choose(&mut rng).expect("non-empty")
                };
                let props = def
                    .properties
                    .iter()
                    .zip(&edge_fracs[e])
                    .map(|(p, frac)| random_value(&mut rng, p.datatype, *frac))
                    .collect();
                t.push(s, d, props);
            }
        }
    })
}

/// A random tree query of one to `max_hops` edges over `catalog`, with up to
/// two predicates and a random return clause. Returns `None` when the
/// catalog has no usable edge label.
pub fn random_query(catalog: &Catalog, rng: &mut impl Rng, max_hops: usize) -> Option<String> {
    struct Var {
        name: String,
        props: Vec<(String, DataType)>,
    }
    let start = catalog.vertex_labels().choose(rng)?;
    let mut vars = vec![Var {
        name: "n0".into(),
        props: start.properties.iter().map(|p| (p.name.clone(), p.datatype)).collect(),
    }];
    let mut node_labels = vec![start.id];
    let mut pattern = format!("(n0:{})", start.name);
    let hops = rng.random_range(1..=max_hops.max(1));
    let mut made = 0;
    for _ in 0..hops * 4 {
        if made == hops {
            break;
        }
        let from = rng.random_range(0..node_labels.len());
        let from_label = node_labels[from];
        let fwd = rng.random_bool(0.5);
        let candidates: Vec<_> = catalog
            .edge_labels()
            .iter()
            .filter(|e| {
                if fwd {
                    e.src_labels.contains(&from_label)
                } else {
                    e.dst_labels.contains(&from_label)
                }
            })
            .collect();
        let Some(edge) = candidates.choose(rng) else { continue };
        let to = *(if fwd { &edge.dst_labels } else { &edge.src_labels }).choose(rng)?;
        let to_def = catalog.vertex_label(to);
        let node = format!("n{}", node_labels.len());
        let evar = format!("e{made}");
        let from_name = format!("n{from}");
        if fwd {
            write!(
                pattern,
                ", ({from_name})-[{evar}:{}]->({node}:{})",
                edge.name, to_def.name
            )
            .ok()?;
        } else {
            write!(
                pattern,
                ", ({from_name})<-[{evar}:{}]-({node}:{})",
                edge.name, to_def.name
            )
            .ok()?;
        }
        node_labels.push(to);
        vars.push(Var {
            name: node,
            props: to_def.properties.iter().map(|p| (p.name.clone(), p.datatype)).collect(),
        });
        vars.push(Var {
            name: evar,
            props: edge.properties.iter().map(|p| (p.name.clone(), p.datatype)).collect(),
        });
        made += 1;
    }
    if made == 0 {
        return None;
    }
    let props: Vec<(String, DataType)> = vars
        .iter()
        .flat_map(|v| v.props.iter().map(move |(p, t)| (format!("{}.{}", v.name, p), *t)))
        .collect();
    let class = |t: DataType| match t {
        DataType::Int64 | DataType::Double => 0,
        DataType::Date => 1,
        DataType::Boolean => 2,
        DataType::String | DataType::Categorical => 3,
    };
    let mut preds = Vec::new();
    for _ in 0..rng.random_range(0..=2) {
        let Some((lhs, ty)) = props.choose(rng) else { break };
        let peers: Vec<_> = props
            .iter()
            .filter(|(p, t)| class(*t) == class(*ty) && p != lhs)
            .collect();
        let op = *["<", "<=", "=", "<>", ">=", ">"].choose(rng).expect("non-empty");
        if !peers.is_empty() && rng.random_bool(0.3) {
            preds.push(format!("{lhs} {op} {}", peers.choose(rng).expect("non-empty").0));
            continue;
        }
        let pred = match ty {
            DataType::Int64 => format!("{lhs} {op} {}", rng.random_range(0..1000)),
            DataType::Double => format!("{lhs} {op} {}.5", rng.random_range(0..1000)),
            DataType::Boolean => format!("{lhs} = {}", if rng.random() { "TRUE" } else { "FALSE" }),
            DataType::Date => format!(
                "{lhs} {op} '{}'",
                crate::value::format_date(rng.random_range(0..20_000))
            ),
            DataType::String => match rng.random_range(0..3) {
                0 => format!("{lhs} STARTS WITH 's{}'", rng.random_range(1..10)),
                1 => format!("{lhs} CONTAINS '{}'", rng.random_range(0..10)),
                _ => format!("{lhs} {op} 's{}'", rng.random_range(0..10_000)),
            },
            DataType::Categorical => format!("{lhs} {op} '{}'", COLOURS.choose(rng).expect("non-empty")),
        };
        preds.push(pred);
    }
    let numeric: Vec<_> = props
        .iter()
        .filter(|(_, t)| matches!(t, DataType::Int64 | DataType::Double))
        .collect();
    let ret = match rng.random_range(0..5) {
        0 => "COUNT(*)".to_owned(),
        1 if !numeric.is_empty() => format!("SUM({})", numeric.choose(rng).expect("non-empty").0),
        2 if !numeric.is_empty() => format!("MIN({})", numeric.choose(rng).expect("non-empty").0),
        3 if !props.is_empty() => {
            let picks: Vec<_> = props.choose_multiple(rng, 2).map(|(p, _)| p.clone()).collect();
            format!("n0, {}", picks.join(", "))
        }
        _ => "*".to_owned(),
    };
    let mut q = format!("MATCH {pattern}");
    if !preds.is_empty() {
        write!(q, " WHERE {}", preds.join(" AND ")).ok()?;
    }
    write!(q, " RETURN {ret}").ok()?;
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs_parse() {
        assert_eq!("uniform".parse::<DegreeDist>().unwrap(), DegreeDist::Uniform);
        assert_eq!("zipf:1.5".parse::<DegreeDist>().unwrap(), DegreeDist::Zipf(1.5));
        assert!("zipf:-1".parse::<DegreeDist>().is_err());
        let p: PropSpec = "age:INT64:0.3".parse().unwrap();
        assert_eq!(p.datatype, DataType::Int64);
        assert!("age".parse::<PropSpec>().is_err());
        assert!("age:INT64:2".parse::<PropSpec>().is_err());
    }

    #[test]
    fn edgeless_graph() {
        let g = generate(&GenSpec {
            vertices: 1000,
            edges: 0,
            ..GenSpec::default()
        })
        .unwrap();
        assert_eq!(g.data.vertices[0].count, 1000);
        assert_eq!(g.data.edge_count(), 0);
    }

    #[test]
    fn out_degrees_sum_to_edge_count() {
        let g = generate(&GenSpec {
            vertices: 500,
            edges: 5000,
            dist: DegreeDist::Zipf(1.2),
            seed: 3,
            ..GenSpec::default()
        })
        .unwrap();
        let mut deg = vec![0u64; 500];
        for s in &g.data.edges[0].src {
            deg[s.offset as usize] += 1;
        }
        assert_eq!(deg.iter().sum::<u64>(), 5000);
        // skewed: the heaviest source far exceeds the mean of 10
        assert!(*deg.iter().max().unwrap() > 100);
    }

    #[test]
    fn deterministic() {
        let spec = GenSpec {
            seed: 42,
            dist: DegreeDist::Zipf(1.2),
            vertex_props: vec!["x:INT64:0.2".parse().unwrap()],
            edge_props: vec!["w:DOUBLE".parse().unwrap()],
            ..GenSpec::default()
        };
        assert_eq!(generate(&spec).unwrap().data, generate(&spec).unwrap().data);
        assert_eq!(
            random_graph(7, 100, 500).unwrap().data,
            random_graph(7, 100, 500).unwrap().data
        );
    }

    #[test]
    fn single_cardinality_limits() {
        let spec = GenSpec {
            vertices: 10,
            edges: 11,
            cardinality: Cardinality::NOne,
            ..GenSpec::default()
        };
        assert!(matches!(generate(&spec), Err(GenError::InvalidSpec(_))));
        let g = generate(&GenSpec { edges: 10, ..spec }).unwrap();
        let mut srcs: Vec<_> = g.data.edges[0].src.clone();
        srcs.sort();
        srcs.dedup();
        assert_eq!(srcs.len(), 10);
    }
}
