//! Columnar graph storage: CSR adjacency lists, vertex columns, and
//! single-indexed edge property pages.

mod build;
mod column;
mod csr;
mod pages;
mod snapshot;

pub use build::build_storage;
pub use column::{ColumnValues, PropertyColumn};
pub use csr::{AdjList, AdjacencyCsr, CsrOffsets, NbrColumn};
pub use pages::{EdgeColumnAlt, PropertyPages};
pub use snapshot::{SnapshotError, MAGIC as SNAPSHOT_MAGIC, VERSION as SNAPSHOT_VERSION};

use std::fmt;

use thiserror::Error;

use crate::catalog::{Catalog, DataType, Direction, EdgeLabelId, Layout, StorageDecision, VertexLabelId};
use crate::compression::{CompressionError, NullCompression};
use crate::data::GraphData;
use crate::ids::{AdjEntryCodec, EdgeId, IdError, VertexId};
use crate::value::ScalarRef;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StorageError {
    #[error("{label}: vertex {vertex} has more than one edge in a single-cardinality direction")]
    CardinalityViolation { label: String, vertex: String },
    #[error("{label}: edge {index} references missing vertex {vertex}")]
    DanglingReference {
        label: String,
        index: usize,
        vertex: String,
    },
    #[error("{label}: vertex offset {offset} appears twice")]
    DuplicateVertexOffset { label: String, offset: u64 },
    #[error("{label}: vertex offsets must be dense; offset {offset} is missing")]
    MissingVertexOffset { label: String, offset: u64 },
    #[error("{label}: property {property} is not nullable but has a NULL")]
    NullViolation { label: String, property: String },
    #[error("{label}: expected {expected} property columns of length {len}")]
    ShapeMismatch { label: String, expected: usize, len: u64 },
    #[error("edge label {label} {dir} uses {actual:?}")]
    WrongLayout {
        label: String,
        dir: Direction,
        actual: Layout,
    },
    #[error("edge properties of {label} are indexed {indexed}; read them by offset")]
    WrongDirection { label: String, indexed: Direction },
    #[error("no property slot at anchor {anchor}, page offset {page_offset}")]
    SlotUnassigned { anchor: u64, page_offset: u64 },
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("unknown property {0}")]
    UnknownProperty(String),
    #[error("expected a {} value, found {found}", expected.as_str())]
    TypeMismatch { expected: DataType, found: String },
    #[error("column exceeds 4 GiB of text")]
    TooLarge,
    #[error("position {index} out of bounds for length {len}")]
    OutOfBounds { index: u64, len: u64 },
    #[error("invalid storage config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Compression(CompressionError),
    #[error(transparent)]
    Id(#[from] IdError),
    #[error("corrupt store: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EdgePropLayout {
    #[default]
    PropPages,
    EdgeCols,
}

impl fmt::Display for EdgePropLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgePropLayout::PropPages => "prop_pages",
            EdgePropLayout::EdgeCols => "edge_cols",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StorageConfig {
    pub edge_prop_layout: EdgePropLayout,
    pub pages_direction: Direction,
    /// lists per property page
    pub k: u64,
    pub null_compression: NullCompression,
    /// seeds the edge-column id shuffle
    pub seed: u64,
}

impl Default for StorageConfig {
    fn default() -> Self {
        Self {
            edge_prop_layout: EdgePropLayout::PropPages,
            pages_direction: Direction::Fwd,
            k: 128,
            null_compression: NullCompression::default(),
            seed: 0,
        }
    }
}

/// Neighbour storage of one (edge label, direction), indexed by anchor label id.
#[derive(Debug, Clone, PartialEq)]
pub enum DirStorage {
    Csr {
        codec: AdjEntryCodec,
        csrs: Vec<Option<AdjacencyCsr>>,
    },
    Column(Vec<Option<NbrColumn>>),
}

/// Where the properties of one edge label live.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeProps {
    None,
    /// Single-cardinality edges: columns of the owning side, by vertex label id.
    VertexColumns {
        owner: Direction,
        columns: Vec<Option<Vec<PropertyColumn>>>,
    },
    /// Pages indexed in `dir`, by anchor label id.
    Pages {
        dir: Direction,
        pages: Vec<Option<PropertyPages>>,
    },
    EdgeCols(EdgeColumnAlt),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeStorage {
    pub(crate) dirs: [DirStorage; 2],
    pub(crate) props: EdgeProps,
    pub(crate) num_edges: u64,
}

impl EdgeStorage {
    pub fn dir(&self, dir: Direction) -> &DirStorage {
        &self.dirs[dir.index()]
    }

    pub fn props(&self) -> &EdgeProps {
        &self.props
    }

    pub fn num_edges(&self) -> u64 {
        self.num_edges
    }
}

/// Immutable columnar graph store.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStore {
    pub(crate) catalog: Catalog,
    pub(crate) config: StorageConfig,
    pub(crate) vertex_props: Vec<Vec<PropertyColumn>>,
    pub(crate) edges: Vec<EdgeStorage>,
}

/// Bytes attributed to each storage component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MemoryLedger {
    pub vertex_props: u64,
    pub edge_props: u64,
    pub fwd_adj: u64,
    pub bwd_adj: u64,
    /// NULL bitmaps, rank indexes, dictionaries and page directories
    pub aux: u64,
    pub total: u64,
}

impl MemoryLedger {
    pub fn rows(&self) -> [(&'static str, u64); 6] {
        [
            ("vertex_props", self.vertex_props),
            ("edge_props", self.edge_props),
            ("fwd_adj", self.fwd_adj),
            ("bwd_adj", self.bwd_adj),
            ("aux", self.aux),
            ("total", self.total),
        ]
    }

    pub fn adjacency(&self) -> u64 {
        self.fwd_adj + self.bwd_adj
    }
}

/// A slice of edge property values aligned with one adjacency list.
#[derive(Debug, Clone, Copy)]
pub struct PropSlice<'a> {
    column: Option<&'a PropertyColumn>,
    start: usize,
    len: usize,
}

impl<'a> PropSlice<'a> {
    const EMPTY: PropSlice<'static> = PropSlice {
        column: None,
        start: 0,
        len: 0,
    };

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> ScalarRef<'a> {
        debug_assert!(i < self.len);
        match self.column {
            Some(c) => c.get(self.start + i),
            None => ScalarRef::Null,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ScalarRef<'a>> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// Resolves one edge property for edges reached by a traversal in a fixed
/// direction; obtained once per operator and reused per edge.
#[derive(Debug, Clone, Copy)]
pub enum EdgePropReader<'a> {
    /// property of a single-cardinality edge, read from the owner's column;
    /// `owner_is_nbr` says whether the owner is the traversal's neighbour
    VertexColumn {
        columns: &'a [Option<Vec<PropertyColumn>>],
        prop: usize,
        owner_is_nbr: bool,
    },
    /// traversal follows the pages' indexed direction
    Sequential {
        pages: &'a [Option<PropertyPages>],
        prop: usize,
    },
    /// opposite direction: anchor is the neighbour, offset from the entry
    ByPageOffset {
        pages: &'a [Option<PropertyPages>],
        prop: usize,
    },
    EdgeCols {
        cols: &'a EdgeColumnAlt,
        prop: usize,
    },
}

impl<'a> EdgePropReader<'a> {
    /// Value of the `i`-th edge of `list`, the adjacency list of `src`.
    #[inline]
    pub fn read(&self, src: VertexId, list: &AdjList<'_>, i: usize) -> ScalarRef<'a> {
        match *self {
            EdgePropReader::Sequential { pages, prop } => match &pages[src.label.index()] {
                Some(p) => p.property(prop).get(list.start() + i),
                None => ScalarRef::Null,
            },
            EdgePropReader::VertexColumn {
                owner_is_nbr: false, ..
            } => self.read_parts(src, src, 0, None),
            _ => self.read_parts(src, list.nbr(i), list.start() + i, list.page_offset(i)),
        }
    }

    /// Value of an edge given its decoded parts: the traversal source, the
    /// neighbour, the entry's index in the source's CSR and its stored page
    /// offset.
    #[inline]
    pub fn read_parts(&self, src: VertexId, nbr: VertexId, entry: usize, page_offset: Option<u64>) -> ScalarRef<'a> {
        match *self {
            EdgePropReader::VertexColumn {
                columns,
                prop,
                owner_is_nbr,
            } => owner_column(columns, if owner_is_nbr { nbr } else { src }, prop),
            EdgePropReader::Sequential { pages, prop } => match &pages[src.label.index()] {
                Some(p) => p.property(prop).get(entry),
                None => ScalarRef::Null,
            },
            EdgePropReader::ByPageOffset { pages, prop } => match &pages[nbr.label.index()] {
                Some(p) => p
                    .get_by_offset(prop, nbr.offset, page_offset.unwrap_or(0))
                    .unwrap_or(ScalarRef::Null),
                None => ScalarRef::Null,
            },
            EdgePropReader::EdgeCols { cols, prop } => {
                cols.get(prop, page_offset.unwrap_or(0)).unwrap_or(ScalarRef::Null)
            }
        }
    }

    /// Value of the single-cardinality edge from `src` to `nbr`.
    #[inline]
    pub fn read_single(&self, src: VertexId, nbr: VertexId) -> ScalarRef<'a> {
        match *self {
            EdgePropReader::VertexColumn {
                columns,
                prop,
                owner_is_nbr,
            } => owner_column(columns, if owner_is_nbr { nbr } else { src }, prop),
            _ => ScalarRef::Null,
        }
    }
}

#[inline]
fn owner_column<'a>(columns: &'a [Option<Vec<PropertyColumn>>], owner: VertexId, prop: usize) -> ScalarRef<'a> {
    match &columns[owner.label.index()] {
        Some(cols) => cols[prop].get(owner.offset as usize),
        None => ScalarRef::Null,
    }
}

impl GraphStore {
    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn config(&self) -> &StorageConfig {
        &self.config
    }

    pub fn vertex_count(&self, label: VertexLabelId) -> u64 {
        self.catalog.vertex_count(label)
    }

    pub fn edge_storage(&self, label: EdgeLabelId) -> &EdgeStorage {
        &self.edges[label.index()]
    }

    pub fn edge_count(&self, label: EdgeLabelId) -> u64 {
        self.edges[label.index()].num_edges
    }

    pub fn layout(&self, label: EdgeLabelId, dir: Direction) -> Layout {
        match self.edges[label.index()].dir(dir) {
            DirStorage::Csr { .. } => Layout::CsrLayout,
            DirStorage::Column(_) => Layout::VertexColumnLayout,
        }
    }

    /// The decision actually used for the stored entries, with page-offset
    /// widths fixed by the built pages or edge columns.
    pub fn storage_decision(&self, label: EdgeLabelId, dir: Direction) -> StorageDecision {
        match self.edges[label.index()].dir(dir) {
            DirStorage::Csr { codec, .. } => *codec.decision(),
            DirStorage::Column(_) => self
                .catalog
                .storage_decision(label, dir)
                .expect("edge label of this store"),
        }
    }

    fn wrong_layout(&self, label: EdgeLabelId, dir: Direction, actual: Layout) -> StorageError {
        StorageError::WrongLayout {
            label: self.catalog.edge_label(label).name.clone(),
            dir,
            actual,
        }
    }

    /// CSR of `(label, dir)` anchored at vertices of `anchor`.
    #[inline]
    pub fn csr(
        &self,
        label: EdgeLabelId,
        dir: Direction,
        anchor: VertexLabelId,
    ) -> Result<Option<&AdjacencyCsr>, StorageError> {
        match self.edges[label.index()].dir(dir) {
            DirStorage::Csr { csrs, .. } => Ok(csrs.get(anchor.index()).and_then(Option::as_ref)),
            DirStorage::Column(_) => Err(self.wrong_layout(label, dir, Layout::VertexColumnLayout)),
        }
    }

    /// Neighbour column of `(label, dir)` for vertices of `anchor`.
    #[inline]
    pub fn nbr_column(
        &self,
        label: EdgeLabelId,
        dir: Direction,
        anchor: VertexLabelId,
    ) -> Result<Option<&NbrColumn>, StorageError> {
        match self.edges[label.index()].dir(dir) {
            DirStorage::Column(cols) => Ok(cols.get(anchor.index()).and_then(Option::as_ref)),
            DirStorage::Csr { .. } => Err(self.wrong_layout(label, dir, Layout::CsrLayout)),
        }
    }

    /// Zero-copy view of `v`'s adjacency list; empty when `v`'s label is not
    /// an anchor of the edge label in `dir`.
    pub fn adj_list(&self, v: VertexId, label: EdgeLabelId, dir: Direction) -> Result<AdjList<'_>, StorageError> {
        let DirStorage::Csr { codec, csrs } = self.edges[label.index()].dir(dir) else {
            return Err(self.wrong_layout(label, dir, Layout::VertexColumnLayout));
        };
        match csrs.get(v.label.index()).and_then(Option::as_ref) {
            Some(csr) if (v.offset as usize) < csr.num_vertices() => Ok(csr.list(v.offset as usize)),
            Some(csr) => Err(StorageError::OutOfBounds {
                index: v.offset,
                len: csr.num_vertices() as u64,
            }),
            None => Ok(AdjList::empty(codec)),
        }
    }

    pub fn single_nbr(
        &self,
        v: VertexId,
        label: EdgeLabelId,
        dir: Direction,
    ) -> Result<Option<VertexId>, StorageError> {
        match self.nbr_column(label, dir, v.label)? {
            Some(col) if (v.offset as usize) < col.len() => Ok(col.get(v.offset as usize)),
            Some(col) => Err(StorageError::OutOfBounds {
                index: v.offset,
                len: col.len() as u64,
            }),
            None => Ok(None),
        }
    }

    pub fn vertex_property(&self, label: VertexLabelId, prop: usize) -> &PropertyColumn {
        &self.vertex_props[label.index()][prop]
    }

    pub fn vertex_property_by_name(&self, label: VertexLabelId, name: &str) -> Result<&PropertyColumn, StorageError> {
        let idx = self
            .catalog
            .vertex_label(label)
            .properties
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| StorageError::UnknownProperty(name.to_owned()))?;
        Ok(self.vertex_property(label, idx))
    }

    fn edge_prop_index(&self, label: EdgeLabelId, property: &str) -> Result<usize, StorageError> {
        self.catalog
            .edge_label(label)
            .property_index(property)
            .ok_or_else(|| StorageError::UnknownProperty(property.to_owned()))
    }

    /// Property values of `v`'s list in the pages' indexed direction, aligned
    /// with `adj_list(v, label, indexed)`.
    pub fn edge_prop_sequential(
        &self,
        v: VertexId,
        label: EdgeLabelId,
        property: &str,
    ) -> Result<PropSlice<'_>, StorageError> {
        let prop = self.edge_prop_index(label, property)?;
        let indexed = match &self.edges[label.index()].props {
            EdgeProps::Pages { dir, pages } => {
                let list = self.adj_list(v, label, *dir)?;
                return Ok(match pages.get(v.label.index()).and_then(Option::as_ref) {
                    Some(p) => PropSlice {
                        column: Some(p.property(prop)),
                        start: list.start(),
                        len: list.len(),
                    },
                    None => PropSlice::EMPTY,
                });
            }
            EdgeProps::VertexColumns { owner, .. } => *owner,
            _ => self.config.pages_direction,
        };
        Err(StorageError::WrongDirection {
            label: self.catalog.edge_label(label).name.clone(),
            indexed,
        })
    }

    /// Reads one n-n edge property given the anchor of its page and its page
    /// offset: one directory lookup and one slot read.
    pub fn edge_prop_by_offset(
        &self,
        anchor: VertexId,
        page_offset: u64,
        label: EdgeLabelId,
        property: &str,
    ) -> Result<ScalarRef<'_>, StorageError> {
        let prop = self.edge_prop_index(label, property)?;
        match &self.edges[label.index()].props {
            EdgeProps::Pages { pages, .. } => match pages.get(anchor.label.index()).and_then(Option::as_ref) {
                Some(p) => p.get_by_offset(prop, anchor.offset, page_offset),
                None => Err(StorageError::SlotUnassigned {
                    anchor: anchor.offset,
                    page_offset,
                }),
            },
            _ => Err(StorageError::WrongLayout {
                label: self.catalog.edge_label(label).name.clone(),
                dir: self.config.pages_direction,
                actual: self.layout(label, self.config.pages_direction),
            }),
        }
    }

    /// Reader for property `prop` of edges traversed in `dir`.
    pub fn edge_prop_reader(
        &self,
        label: EdgeLabelId,
        dir: Direction,
        prop: usize,
    ) -> Result<EdgePropReader<'_>, StorageError> {
        let def = self.catalog.edge_label(label);
        if prop >= def.properties.len() {
            return Err(StorageError::UnknownProperty(format!("#{prop}")));
        }
        Ok(match &self.edges[label.index()].props {
            EdgeProps::None => return Err(StorageError::UnknownProperty(format!("#{prop}"))),
            EdgeProps::VertexColumns { owner, columns } => EdgePropReader::VertexColumn {
                columns,
                prop,
                // owner side Fwd means the source owns the column
                owner_is_nbr: *owner != dir,
            },
            EdgeProps::Pages { dir: indexed, pages } if *indexed == dir => EdgePropReader::Sequential { pages, prop },
            EdgeProps::Pages { pages, .. } => EdgePropReader::ByPageOffset { pages, prop },
            EdgeProps::EdgeCols(cols) => EdgePropReader::EdgeCols { cols, prop },
        })
    }

    /// Reconstructs the id of the `i`-th edge of `src`'s list in `dir`.
    pub fn edge_id(&self, label: EdgeLabelId, dir: Direction, src: VertexId, list: &AdjList<'_>, i: usize) -> EdgeId {
        self.edge_id_parts(label, dir, src, list.nbr(i), list.start() + i, list.page_offset(i))
    }

    /// Reconstructs an edge id from the traversal source, the neighbour, the
    /// entry's index in the source's CSR and its stored page offset. Edges of
    /// single-cardinality labels pass `entry = 0` and no page offset.
    pub fn edge_id_parts(
        &self,
        label: EdgeLabelId,
        dir: Direction,
        src: VertexId,
        nbr: VertexId,
        entry: usize,
        page_offset: Option<u64>,
    ) -> EdgeId {
        match &self.edges[label.index()].props {
            EdgeProps::Pages { dir: indexed, pages } if *indexed == dir => {
                let base = pages[src.label.index()].as_ref().map_or(0, |p| p.page_base(src.offset));
                EdgeId {
                    label,
                    anchor: src,
                    page_offset: entry as u64 - base,
                }
            }
            EdgeProps::Pages { .. } => EdgeId {
                label,
                anchor: nbr,
                page_offset: page_offset.unwrap_or(0),
            },
            EdgeProps::EdgeCols(_) => EdgeId {
                label,
                anchor: if dir == Direction::Fwd { src } else { nbr },
                page_offset: page_offset.unwrap_or(0),
            },
            // edges without identity: the source stands in for the anchor
            _ => EdgeId {
                label,
                anchor: if dir == Direction::Fwd { src } else { nbr },
                page_offset: 0,
            },
        }
    }

    pub fn memory_ledger(&self) -> MemoryLedger {
        let mut l = MemoryLedger::default();
        for cols in &self.vertex_props {
            for c in cols {
                l.vertex_props += c.value_bytes() as u64;
                l.aux += c.aux_bytes() as u64;
            }
        }
        for e in &self.edges {
            for dir in Direction::BOTH {
                let slot = if dir == Direction::Fwd {
                    &mut l.fwd_adj
                } else {
                    &mut l.bwd_adj
                };
                match e.dir(dir) {
                    DirStorage::Csr { csrs, .. } => {
                        for csr in csrs.iter().flatten() {
                            *slot += (csr.entries().len() + csr.offsets().offsets_bytes()) as u64;
                            l.aux += csr.offsets().aux_bytes() as u64;
                        }
                    }
                    DirStorage::Column(cols) => {
                        for col in cols.iter().flatten() {
                            *slot += col.payload_bytes() as u64;
                            l.aux += col.aux_bytes() as u64;
                        }
                    }
                }
            }
            let add_cols = |l: &mut MemoryLedger, cols: &[PropertyColumn]| {
                for c in cols {
                    l.edge_props += c.value_bytes() as u64;
                    l.aux += c.aux_bytes() as u64;
                }
            };
            match &e.props {
                EdgeProps::None => {}
                EdgeProps::VertexColumns { columns, .. } => columns.iter().flatten().for_each(|c| add_cols(&mut l, c)),
                EdgeProps::Pages { pages, .. } => {
                    for p in pages.iter().flatten() {
                        add_cols(&mut l, p.properties());
                        l.aux += p.directory_bytes() as u64;
                    }
                }
                EdgeProps::EdgeCols(cols) => add_cols(&mut l, cols.properties()),
            }
        }
        l.total = l.vertex_props + l.edge_props + l.fwd_adj + l.bwd_adj + l.aux;
        l
    }

    /// The graph as load-ready tables, with edges in forward CSR order.
    /// Rebuilding from it under another config yields an equivalent store.
    pub fn to_graph_data(&self) -> Result<GraphData, StorageError> {
        let mut data = GraphData::empty(&self.catalog);
        for (def, (t, cols)) in self
            .catalog
            .vertex_labels()
            .iter()
            .zip(data.vertices.iter_mut().zip(&self.vertex_props))
        {
            t.count = self.vertex_count(def.id);
            for (out, c) in t.columns.iter_mut().zip(cols) {
                *out = (0..c.len()).map(|i| c.get(i).to_value()).collect();
            }
        }
        for def in self.catalog.edge_labels() {
            let t = &mut data.edges[def.id.index()];
            let readers = (0..def.properties.len())
                .map(|p| self.edge_prop_reader(def.id, Direction::Fwd, p))
                .collect::<Result<Vec<_>, _>>()?;
            for &l in &def.src_labels {
                let n = self.vertex_count(l);
                match self.edges[def.id.index()].dir(Direction::Fwd) {
                    DirStorage::Csr { csrs, .. } => {
                        let Some(csr) = csrs[l.index()].as_ref() else { continue };
                        for v in 0..n {
                            let src = VertexId::new(l, v);
                            let list = csr.list(v as usize);
                            for i in 0..list.len() {
                                t.push(
                                    src,
                                    list.nbr(i),
                                    readers.iter().map(|r| r.read(src, &list, i).to_value()).collect(),
                                );
                            }
                        }
                    }
                    DirStorage::Column(cols) => {
                        let Some(col) = cols[l.index()].as_ref() else { continue };
                        for v in 0..n {
                            let src = VertexId::new(l, v);
                            if let Some(nbr) = col.get(v as usize) {
                                t.push(
                                    src,
                                    nbr,
                                    readers
                                        .iter()
                                        .map(|r| r.read_parts(src, nbr, 0, None).to_value())
                                        .collect(),
                                );
                            }
                        }
                    }
                }
            }
        }
        Ok(data)
    }

    /// Adjacency bytes of an uncompressed layout: every entry an 8-byte edge
    /// id plus an 8-byte vertex id, and 8-byte CSR offsets per anchor vertex.
    pub fn naive_adjacency_bytes(&self) -> u64 {
        let mut total = 0;
        for (e, def) in self.edges.iter().zip(self.catalog.edge_labels()) {
            for dir in Direction::BOTH {
                let anchors: u64 = def.anchor_labels(dir).iter().map(|&l| self.vertex_count(l) + 1).sum();
                total += e.num_edges * 16 + anchors * 8;
            }
        }
        total
    }

    /// Edge property bytes if every n-n property were stored once per
    /// direction, as in a double-indexed property CSR.
    pub fn double_indexed_edge_prop_bytes(&self) -> u64 {
        self.edges
            .iter()
            .map(|e| match &e.props {
                EdgeProps::Pages { pages, .. } => pages
                    .iter()
                    .flatten()
                    .flat_map(|p| p.properties())
                    .map(|c| 2 * c.value_bytes() as u64)
                    .sum(),
                EdgeProps::EdgeCols(cols) => cols.properties().iter().map(|c| 2 * c.value_bytes() as u64).sum(),
                _ => 0,
            })
            .sum()
    }
}
