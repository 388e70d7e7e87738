use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::{Catalog, Direction, EdgeLabelDef, PropertyDef, PropertyOwner};
use crate::compression::{JacobsonParams, NullCompression};
use crate::data::{EdgeTable, GraphData};
use crate::ids::{AdjEntryCodec, VertexId};
use crate::value::Value;

use super::{
    AdjacencyCsr, CsrOffsets, DirStorage, EdgeColumnAlt, EdgePropLayout, EdgeProps, EdgeStorage, GraphStore, NbrColumn,
    PropertyColumn, PropertyPages, StorageConfig, StorageError,
};

/// Edges of one direction grouped by anchor label, in CSR entry order.
struct DirOrder {
    /// per anchor label id: list lengths per vertex and edge indices in order
    per_label: Vec<Option<(Vec<u64>, Vec<usize>)>>,
    /// position of each edge within its anchor label's CSR
    position: Vec<u64>,
}

fn anchors(table: &EdgeTable, dir: Direction) -> &[VertexId] {
    match dir {
        Direction::Fwd => &table.src,
        Direction::Bwd => &table.dst,
    }
}

fn nbrs(table: &EdgeTable, dir: Direction) -> &[VertexId] {
    anchors(table, dir.reverse())
}

/// Stable counting sort of edges by anchor offset, one CSR per anchor label.
fn dir_order(def: &EdgeLabelDef, table: &EdgeTable, dir: Direction, counts: &[u64]) -> DirOrder {
    let num_labels = counts.len();
    let mut per_label: Vec<Option<(Vec<u64>, Vec<usize>)>> = vec![None; num_labels];
    for &l in def.anchor_labels(dir) {
        per_label[l.index()] = Some((vec![0; counts[l.index()] as usize], Vec::new()));
    }
    let anchor = anchors(table, dir);
    for v in anchor {
        let (lengths, _) = per_label[v.label.index()].as_mut().expect("validated label");
        lengths[v.offset as usize] += 1;
    }
    let mut cursors: Vec<Vec<u64>> = per_label
        .iter()
        .map(|p| match p {
            Some((lengths, _)) => {
                let mut acc = 0;
                lengths
                    .iter()
                    .map(|&l| {
                        let start = acc;
                        acc += l;
                        start
                    })
                    .collect()
            }
            None => Vec::new(),
        })
        .collect();
    for p in per_label.iter_mut().flatten() {
        let total = p.0.iter().sum::<u64>() as usize;
        p.1 = vec![0; total];
    }
    let mut position = vec![0u64; anchor.len()];
    for (e, v) in anchor.iter().enumerate() {
        let cursor = &mut cursors[v.label.index()][v.offset as usize];
        let pos = *cursor;
        *cursor += 1;
        position[e] = pos;
        per_label[v.label.index()].as_mut().expect("validated label").1[pos as usize] = e;
    }
    DirOrder { per_label, position }
}

fn check_nullable(label: &str, defs: &[PropertyDef], columns: &[Vec<Value>]) -> Result<(), StorageError> {
    for (def, col) in defs.iter().zip(columns) {
        if !def.nullable && col.iter().any(Value::is_null) {
            return Err(StorageError::NullViolation {
                label: label.to_owned(),
                property: def.name.clone(),
            });
        }
    }
    Ok(())
}

fn empty_list_params(mode: NullCompression) -> Option<JacobsonParams> {
    match mode {
        NullCompression::Jacobson(p) => Some(p),
        _ => None,
    }
}

/// Builds the columnar store for `data` under `config`.
pub fn build_storage(catalog: &Catalog, data: &GraphData, config: StorageConfig) -> Result<GraphStore, StorageError> {
    if config.k == 0 {
        return Err(StorageError::InvalidConfig("k must be positive".into()));
    }
    if data.vertices.len() != catalog.vertex_labels().len() || data.edges.len() != catalog.edge_labels().len() {
        return Err(StorageError::InvalidConfig(
            "data does not match the catalog's labels".into(),
        ));
    }
    let counts = data.vertex_counts();
    let catalog = catalog.with_vertex_counts(&counts);
    let mode = config.null_compression;

    let mut vertex_props = Vec::with_capacity(counts.len());
    for (def, table) in catalog.vertex_labels().iter().zip(&data.vertices) {
        if table.columns.len() != def.properties.len() || table.columns.iter().any(|c| c.len() as u64 != table.count) {
            return Err(StorageError::ShapeMismatch {
                label: def.name.clone(),
                expected: def.properties.len(),
                len: table.count,
            });
        }
        check_nullable(&def.name, &def.properties, &table.columns)?;
        let cols = def
            .properties
            .iter()
            .zip(&table.columns)
            .map(|(p, vals)| PropertyColumn::build(p.datatype, vals, mode))
            .collect::<Result<Vec<_>, _>>()?;
        vertex_props.push(cols);
    }

    let mut edges = Vec::with_capacity(data.edges.len());
    for (def, table) in catalog.edge_labels().iter().zip(&data.edges) {
        edges.push(build_edge(&catalog, def, table, &counts, &config)?);
    }
    Ok(GraphStore {
        catalog,
        config,
        vertex_props,
        edges,
    })
}

fn validate_edges(
    catalog: &Catalog,
    def: &EdgeLabelDef,
    table: &EdgeTable,
    counts: &[u64],
) -> Result<(), StorageError> {
    if table.dst.len() != table.src.len()
        || table.columns.len() != def.properties.len()
        || table.columns.iter().any(|c| c.len() != table.len())
    {
        return Err(StorageError::ShapeMismatch {
            label: def.name.clone(),
            expected: def.properties.len(),
            len: table.len() as u64,
        });
    }
    for dir in Direction::BOTH {
        let allowed = def.anchor_labels(dir);
        for (i, v) in anchors(table, dir).iter().enumerate() {
            let ok = allowed.contains(&v.label) && counts.get(v.label.index()).is_some_and(|&c| v.offset < c);
            if !ok {
                let label_name = catalog
                    .vertex_labels()
                    .get(v.label.index())
                    .map_or_else(|| format!("#{}", v.label.0), |l| l.name.clone());
                return Err(StorageError::DanglingReference {
                    label: def.name.clone(),
                    index: i,
                    vertex: format!("{label_name}:{}", v.offset),
                });
            }
        }
    }
    check_nullable(&def.name, &def.properties, &table.columns)
}

fn build_edge(
    catalog: &Catalog,
    def: &EdgeLabelDef,
    table: &EdgeTable,
    counts: &[u64],
    config: &StorageConfig,
) -> Result<EdgeStorage, StorageError> {
    validate_edges(catalog, def, table, counts)?;
    let mode = config.null_compression;
    let num_labels = counts.len();
    let num_edges = table.len();

    // single-cardinality directions become neighbour columns
    let mut single_cols: [Option<Vec<Option<NbrColumn>>>; 2] = [None, None];
    for dir in Direction::BOTH {
        if !def.cardinality.is_single(dir) {
            continue;
        }
        let decision = catalog.storage_decision(def.id, dir).expect("edge label of catalog");
        let mut per_label: Vec<Option<Vec<Option<VertexId>>>> = vec![None; num_labels];
        for &l in def.anchor_labels(dir) {
            per_label[l.index()] = Some(vec![None; counts[l.index()] as usize]);
        }
        for (a, n) in anchors(table, dir).iter().zip(nbrs(table, dir)) {
            let slot = &mut per_label[a.label.index()].as_mut().expect("validated label")[a.offset as usize];
            if slot.is_some() {
                return Err(StorageError::CardinalityViolation {
                    label: def.name.clone(),
                    vertex: format!("{}:{}", catalog.vertex_label(a.label).name, a.offset),
                });
            }
            *slot = Some(*n);
        }
        let cols = per_label
            .into_iter()
            .map(|p| {
                p.map(|n| NbrColumn::build(def.nbr_labels(dir).to_vec(), &n, decision.nbr_offset_bytes, mode))
                    .transpose()
            })
            .collect::<Result<Vec<_>, _>>()?;
        single_cols[dir.index()] = Some(cols);
    }

    let orders: [Option<DirOrder>; 2] =
        Direction::BOTH.map(|dir| (!def.cardinality.is_single(dir)).then(|| dir_order(def, table, dir, counts)));

    // edge properties, and for n-n labels the per-edge page offset or edge id
    let mut edge_ref: Option<Vec<u64>> = None;
    let mut ref_width = 0u8;
    let props = if def.properties.is_empty() {
        EdgeProps::None
    } else {
        match def.property_owner() {
            Some(owner) => {
                let owner_dir = match owner {
                    PropertyOwner::Src => Direction::Fwd,
                    PropertyOwner::Dst => Direction::Bwd,
                };
                let mut columns = vec![None; num_labels];
                for &l in def.anchor_labels(owner_dir) {
                    let n = counts[l.index()] as usize;
                    let mut vals: Vec<Vec<Value>> = vec![vec![Value::Null; n]; def.properties.len()];
                    for (e, a) in anchors(table, owner_dir).iter().enumerate() {
                        if a.label == l {
                            for (p, col) in table.columns.iter().enumerate() {
                                vals[p][a.offset as usize] = col[e].clone();
                            }
                        }
                    }
                    let cols = def
                        .properties
                        .iter()
                        .zip(&vals)
                        .map(|(p, v)| PropertyColumn::build(p.datatype, v, mode))
                        .collect::<Result<Vec<_>, _>>()?;
                    columns[l.index()] = Some(cols);
                }
                EdgeProps::VertexColumns {
                    owner: owner_dir,
                    columns,
                }
            }
            None => match config.edge_prop_layout {
                EdgePropLayout::PropPages => {
                    let dir = config.pages_direction;
                    let order = orders[dir.index()].as_ref().expect("n-n label has a CSR");
                    let mut pages = vec![None; num_labels];
                    let mut refs = vec![0u64; num_edges];
                    for (l, per) in order.per_label.iter().enumerate() {
                        let Some((lengths, edge_order)) = per else { continue };
                        let cols = def
                            .properties
                            .iter()
                            .zip(&table.columns)
                            .map(|(p, col)| {
                                let vals: Vec<Value> = edge_order.iter().map(|&e| col[e].clone()).collect();
                                PropertyColumn::build(p.datatype, &vals, mode)
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        let built = PropertyPages::build(config.k, lengths, cols)?;
                        let anchor = anchors(table, dir);
                        for &e in edge_order {
                            refs[e] = built.page_offset_of(anchor[e].offset, order.position[e]);
                        }
                        ref_width = ref_width.max(built.page_offset_bytes());
                        pages[l] = Some(built);
                    }
                    edge_ref = Some(refs);
                    EdgeProps::Pages { dir, pages }
                }
                EdgePropLayout::EdgeCols => {
                    let mut ids: Vec<u64> = (0..num_edges as u64).collect();
                    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
                    let mut cols = Vec::with_capacity(def.properties.len());
                    for (p, col) in def.properties.iter().zip(&table.columns) {
                        let mut vals = vec![Value::Null; num_edges];
                        for (e, v) in col.iter().enumerate() {
                            vals[ids[e] as usize] = v.clone();
                        }
                        cols.push(PropertyColumn::build(p.datatype, &vals, mode)?);
                    }
                    let alt = EdgeColumnAlt::new(num_edges as u64, cols)?;
                    ref_width = alt.id_bytes();
                    edge_ref = Some(ids);
                    EdgeProps::EdgeCols(alt)
                }
            },
        }
    };

    let mut dirs = Vec::with_capacity(2);
    for dir in Direction::BOTH {
        if let Some(cols) = single_cols[dir.index()].take() {
            dirs.push(DirStorage::Column(cols));
            continue;
        }
        let mut decision = catalog.storage_decision(def.id, dir).expect("edge label of catalog");
        if decision.store_page_offset {
            decision.page_offset_bytes = ref_width.max(1);
        }
        let codec = AdjEntryCodec::new(decision, def.nbr_labels(dir).to_vec());
        let order = orders[dir.index()].as_ref().expect("csr direction");
        let nbr = nbrs(table, dir);
        let width = codec.entry_width();
        let mut csrs = vec![None; num_labels];
        for (l, per) in order.per_label.iter().enumerate() {
            let Some((lengths, edge_order)) = per else { continue };
            let mut arena = vec![0u8; edge_order.len() * width];
            for (i, &e) in edge_order.iter().enumerate() {
                let page = if codec.stores_page_offset() {
                    Some(edge_ref.as_ref().map_or(0, |r| r[e]))
                } else {
                    None
                };
                codec.encode_into(&mut arena[i * width..(i + 1) * width], nbr[e], page)?;
            }
            let offsets = CsrOffsets::build(lengths, empty_list_params(config.null_compression));
            csrs[l] = Some(AdjacencyCsr::new(codec.clone(), offsets, arena));
        }
        dirs.push(DirStorage::Csr { codec, csrs });
    }
    let dirs: [DirStorage; 2] = dirs.try_into().expect("two directions");
    Ok(EdgeStorage {
        dirs,
        props,
        num_edges: num_edges as u64,
    })
}
