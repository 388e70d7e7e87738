//! Graph schema: labels, properties, cardinalities and the per-direction
//! storage decisions derived from them.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compression::byte_width_for_bound;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("malformed schema document: {0}")]
    Malformed(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("duplicate property {property:?} on label {label:?}")]
    DuplicateProperty { label: String, property: String },
    #[error("edge label {edge:?} references unknown vertex label {vertex:?}")]
    UnknownLabelReference { edge: String, vertex: String },
    #[error("edge label {0:?} has an empty source or destination label set")]
    EmptyLabelSet(String),
    #[error("invalid cardinality {0:?} (expected one of 1-1, 1-n, n-1, n-n)")]
    InvalidCardinality(String),
    #[error("invalid data type {0:?}")]
    InvalidDataType(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("at most 256 labels of each kind are supported")]
    TooManyLabels,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexLabelId(pub u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeLabelId(pub u8);

impl VertexLabelId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeLabelId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Fwd,
    Bwd,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Fwd, Direction::Bwd];

    pub fn index(self) -> usize {
        match self {
            Direction::Fwd => 0,
            Direction::Bwd => 1,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Direction::Fwd => Direction::Bwd,
            Direction::Bwd => Direction::Fwd,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Fwd => "fwd",
            Direction::Bwd => "bwd",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cardinality {
    OneOne,
    OneN,
    NOne,
    NN,
}

impl Cardinality {
    pub fn parse(s: &str) -> Result<Self, CatalogError> {
        match s.to_ascii_lowercase().as_str() {
            "1-1" => Ok(Cardinality::OneOne),
            "1-n" => Ok(Cardinality::OneN),
            "n-1" => Ok(Cardinality::NOne),
            "n-n" => Ok(Cardinality::NN),
            _ => Err(CatalogError::InvalidCardinality(s.to_owned())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Cardinality::OneOne => "1-1",
            Cardinality::OneN => "1-n",
            Cardinality::NOne => "n-1",
            Cardinality::NN => "n-n",
        }
    }

    /// Whether a vertex has at most one edge of this label in `dir`.
    pub fn is_single(self, dir: Direction) -> bool {
        matches!(
            (self, dir),
            (Cardinality::OneOne, _) | (Cardinality::NOne, Direction::Fwd) | (Cardinality::OneN, Direction::Bwd)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DataType {
    Int64,
    Double,
    Boolean,
    /// Days since 1970-01-01.
    Date,
    String,
    Categorical,
}

impl DataType {
    pub fn parse(s: &str) -> Result<Self, CatalogError> {
        match s.to_ascii_uppercase().as_str() {
            "INT64" => Ok(DataType::Int64),
            "DOUBLE" => Ok(DataType::Double),
            "BOOLEAN" => Ok(DataType::Boolean),
            "DATE" => Ok(DataType::Date),
            "STRING" => Ok(DataType::String),
            "CATEGORICAL" => Ok(DataType::Categorical),
            _ => Err(CatalogError::InvalidDataType(s.to_owned())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DataType::Int64 => "INT64",
            DataType::Double => "DOUBLE",
            DataType::Boolean => "BOOLEAN",
            DataType::Date => "DATE",
            DataType::String => "STRING",
            DataType::Categorical => "CATEGORICAL",
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, DataType::Int64 | DataType::Double | DataType::Date)
    }

    pub fn is_textual(self) -> bool {
        matches!(self, DataType::String | DataType::Categorical)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyDef {
    pub name: String,
    pub datatype: DataType,
    pub nullable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexLabelDef {
    pub name: String,
    pub id: VertexLabelId,
    pub properties: Vec<PropertyDef>,
    pub vertex_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeLabelDef {
    pub name: String,
    pub id: EdgeLabelId,
    /// sorted by label id
    pub src_labels: Vec<VertexLabelId>,
    /// sorted by label id
    pub dst_labels: Vec<VertexLabelId>,
    pub cardinality: Cardinality,
    pub properties: Vec<PropertyDef>,
}

/// The side whose vertex columns hold a single-cardinality edge's properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropertyOwner {
    Src,
    Dst,
}

impl EdgeLabelDef {
    /// Vertex labels an adjacency list in `dir` is anchored at.
    pub fn anchor_labels(&self, dir: Direction) -> &[VertexLabelId] {
        match dir {
            Direction::Fwd => &self.src_labels,
            Direction::Bwd => &self.dst_labels,
        }
    }

    /// Vertex labels the neighbours in `dir` may carry.
    pub fn nbr_labels(&self, dir: Direction) -> &[VertexLabelId] {
        match dir {
            Direction::Fwd => &self.dst_labels,
            Direction::Bwd => &self.src_labels,
        }
    }

    /// `None` for n-n labels, whose properties live in property pages.
    pub fn property_owner(&self) -> Option<PropertyOwner> {
        match self.cardinality {
            Cardinality::OneOne | Cardinality::NOne => Some(PropertyOwner::Src),
            Cardinality::OneN => Some(PropertyOwner::Dst),
            Cardinality::NN => None,
        }
    }

    pub fn property_index(&self, name: &str) -> Option<usize> {
        self.properties.iter().position(|p| p.name == name)
    }

    /// Position of `label` among the neighbour labels of `dir`, i.e. the
    /// one-byte tag stored for it when the set has several members.
    pub fn nbr_tag(&self, dir: Direction, label: VertexLabelId) -> Option<u8> {
        self.nbr_labels(dir).iter().position(|&l| l == label).map(|i| i as u8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    VertexColumnLayout,
    CsrLayout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StorageDecision {
    pub store_page_offset: bool,
    pub store_nbr_label: bool,
    pub layout: Layout,
    pub nbr_offset_bytes: u8,
    pub page_offset_bytes: u8,
}

/// Page-offset width assumed before any page is built (pages of up to 64K slots).
pub const DEFAULT_PAGE_OFFSET_BYTES: u8 = 2;

/// Storage decision for one (edge label, direction).
///
/// Page-level offsets are dropped when the label has no properties or a
/// single-cardinality constraint (its properties then sit in vertex columns);
/// the neighbour label is dropped when only one label is possible.
pub fn decide(edge: &EdgeLabelDef, dir: Direction, nbr_vertex_count: u64) -> StorageDecision {
    let single = edge.cardinality.is_single(dir);
    let store_page_offset = !edge.properties.is_empty() && edge.cardinality == Cardinality::NN;
    StorageDecision {
        store_page_offset,
        store_nbr_label: edge.nbr_labels(dir).len() > 1,
        layout: if single {
            Layout::VertexColumnLayout
        } else {
            Layout::CsrLayout
        },
        nbr_offset_bytes: byte_width_for_bound(nbr_vertex_count),
        page_offset_bytes: if store_page_offset {
            DEFAULT_PAGE_OFFSET_BYTES
        } else {
            0
        },
    }
}

// Schema document (JSON).

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaDoc {
    pub vertex_labels: Vec<VertexLabelDoc>,
    #[serde(default)]
    pub edge_labels: Vec<EdgeLabelDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexLabelDoc {
    pub name: String,
    #[serde(default)]
    pub properties: Vec<PropertyDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeLabelDoc {
    pub name: String,
    pub src: Vec<String>,
    pub dst: Vec<String>,
    pub cardinality: String,
    #[serde(default)]
    pub properties: Vec<PropertyDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertyDoc {
    pub name: String,
    #[serde(rename = "type")]
    pub datatype: String,
    #[serde(default)]
    pub nullable: bool,
}

impl SchemaDoc {
    pub fn from_json(text: &str) -> Result<Self, CatalogError> {
        serde_json::from_str(text).map_err(|e| CatalogError::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }
}

/// The immutable schema plus precomputed storage decisions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    vertex_labels: Vec<VertexLabelDef>,
    edge_labels: Vec<EdgeLabelDef>,
    decisions: Vec<[StorageDecision; 2]>,
}

fn parse_properties(label: &str, docs: &[PropertyDoc]) -> Result<Vec<PropertyDef>, CatalogError> {
    let mut seen = HashSet::new();
    docs.iter()
        .map(|p| {
            if !seen.insert(p.name.as_str()) {
                return Err(CatalogError::DuplicateProperty {
                    label: label.to_owned(),
                    property: p.name.clone(),
                });
            }
            Ok(PropertyDef {
                name: p.name.clone(),
                datatype: DataType::parse(&p.datatype)?,
                nullable: p.nullable,
            })
        })
        .collect()
}

impl Catalog {
    pub fn define_schema(doc: &SchemaDoc) -> Result<Self, CatalogError> {
        if doc.vertex_labels.len() > 256 || doc.edge_labels.len() > 256 {
            return Err(CatalogError::TooManyLabels);
        }
        let mut names = HashSet::new();
        let mut vertex_labels = Vec::with_capacity(doc.vertex_labels.len());
        let mut vertex_ids = HashMap::new();
        for (i, v) in doc.vertex_labels.iter().enumerate() {
            if !names.insert(v.name.as_str()) {
                return Err(CatalogError::DuplicateLabel(v.name.clone()));
            }
            let id = VertexLabelId(i as u8);
            vertex_ids.insert(v.name.as_str(), id);
            vertex_labels.push(VertexLabelDef {
                name: v.name.clone(),
                id,
                properties: parse_properties(&v.name, &v.properties)?,
                vertex_count: 0,
            });
        }
        let mut edge_labels = Vec::with_capacity(doc.edge_labels.len());
        for (i, e) in doc.edge_labels.iter().enumerate() {
            if !names.insert(e.name.as_str()) {
                return Err(CatalogError::DuplicateLabel(e.name.clone()));
            }
            let resolve = |list: &[String]| -> Result<Vec<VertexLabelId>, CatalogError> {
                let set: BTreeSet<VertexLabelId> = list
                    .iter()
                    .map(|n| {
                        vertex_ids
                            .get(n.as_str())
                            .copied()
                            .ok_or_else(|| CatalogError::UnknownLabelReference {
                                edge: e.name.clone(),
                                vertex: n.clone(),
                            })
                    })
                    .collect::<Result<_, _>>()?;
                if set.is_empty() {
                    return Err(CatalogError::EmptyLabelSet(e.name.clone()));
                }
                Ok(set.into_iter().collect())
            };
            edge_labels.push(EdgeLabelDef {
                name: e.name.clone(),
                id: EdgeLabelId(i as u8),
                src_labels: resolve(&e.src)?,
                dst_labels: resolve(&e.dst)?,
                cardinality: Cardinality::parse(&e.cardinality)?,
                properties: parse_properties(&e.name, &e.properties)?,
            });
        }
        let mut catalog = Catalog {
            vertex_labels,
            edge_labels,
            decisions: Vec::new(),
        };
        catalog.recompute_decisions();
        Ok(catalog)
    }

    /// Returns a catalog whose vertex counts are set (from a load) and whose
    /// decisions are recomputed accordingly.
    pub fn with_vertex_counts(&self, counts: &[u64]) -> Self {
        let mut out = self.clone();
        for (def, &c) in out.vertex_labels.iter_mut().zip(counts) {
            def.vertex_count = c;
        }
        out.recompute_decisions();
        out
    }

    fn recompute_decisions(&mut self) {
        self.decisions = self
            .edge_labels
            .iter()
            .map(|e| {
                Direction::BOTH.map(|dir| {
                    let nbr_count = e
                        .nbr_labels(dir)
                        .iter()
                        .map(|l| self.vertex_labels[l.index()].vertex_count)
                        .max()
                        .unwrap_or(0);
                    decide(e, dir, nbr_count)
                })
            })
            .collect();
    }

    pub fn storage_decision(&self, edge: EdgeLabelId, dir: Direction) -> Result<StorageDecision, CatalogError> {
        self.decisions
            .get(edge.index())
            .map(|d| d[dir.index()])
            .ok_or_else(|| CatalogError::UnknownLabel(format!("#{}", edge.0)))
    }

    pub fn vertex_labels(&self) -> &[VertexLabelDef] {
        &self.vertex_labels
    }

    pub fn edge_labels(&self) -> &[EdgeLabelDef] {
        &self.edge_labels
    }

    pub fn vertex_label(&self, id: VertexLabelId) -> &VertexLabelDef {
        &self.vertex_labels[id.index()]
    }

    pub fn edge_label(&self, id: EdgeLabelId) -> &EdgeLabelDef {
        &self.edge_labels[id.index()]
    }

    pub fn vertex_label_by_name(&self, name: &str) -> Option<&VertexLabelDef> {
        self.vertex_labels.iter().find(|v| v.name == name)
    }

    pub fn edge_label_by_name(&self, name: &str) -> Option<&EdgeLabelDef> {
        self.edge_labels.iter().find(|e| e.name == name)
    }

    pub fn vertex_count(&self, id: VertexLabelId) -> u64 {
        self.vertex_labels[id.index()].vertex_count
    }

    /// Rebuilds the schema document this catalog was defined from.
    pub fn to_doc(&self) -> SchemaDoc {
        let props = |ps: &[PropertyDef]| {
            ps.iter()
                .map(|p| PropertyDoc {
                    name: p.name.clone(),
                    datatype: p.datatype.as_str().to_owned(),
                    nullable: p.nullable,
                })
                .collect()
        };
        let names = |ids: &[VertexLabelId]| ids.iter().map(|l| self.vertex_label(*l).name.clone()).collect();
        SchemaDoc {
            vertex_labels: self
                .vertex_labels
                .iter()
                .map(|v| VertexLabelDoc {
                    name: v.name.clone(),
                    properties: props(&v.properties),
                })
                .collect(),
            edge_labels: self
                .edge_labels
                .iter()
                .map(|e| EdgeLabelDoc {
                    name: e.name.clone(),
                    src: names(&e.src_labels),
                    dst: names(&e.dst_labels),
                    cardinality: e.cardinality.as_str().to_owned(),
                    properties: props(&e.properties),
                })
                .collect(),
        }
    }
}

impl VertexLabelDef {
    pub fn property_index(&self, name: &str) -> Option<usize> {
        self.properties.iter().position(|p| p.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog(json: &str) -> Result<Catalog, CatalogError> {
        Catalog::define_schema(&SchemaDoc::from_json(json)?)
    }

    const RUNNING: &str = r#"{
        "vertex_labels": [
            {"name": "PERSON", "properties": [{"name": "age", "type": "INT64"}]},
            {"name": "ORG", "properties": [{"name": "estd", "type": "INT64"}]}
        ],
        "edge_labels": [
            {"name": "WORKAT", "src": ["PERSON"], "dst": ["ORG"], "cardinality": "n-1",
             "properties": [{"name": "since", "type": "INT64"}]},
            {"name": "FOLLOWS", "src": ["PERSON"], "dst": ["PERSON"], "cardinality": "n-n",
             "properties": [{"name": "since", "type": "INT64"}]},
            {"name": "KNOWS", "src": ["PERSON"], "dst": ["PERSON"], "cardinality": "n-n"},
            {"name": "LIKES", "src": ["PERSON"], "dst": ["PERSON", "ORG"], "cardinality": "n-n",
             "properties": [{"name": "a", "type": "INT64"}, {"name": "b", "type": "DATE"}]},
            {"name": "MARRIED", "src": ["PERSON"], "dst": ["PERSON"], "cardinality": "1-1"},
            {"name": "OWNS", "src": ["ORG"], "dst": ["PERSON"], "cardinality": "1-n"}
        ]
    }"#;

    fn id(c: &Catalog, name: &str) -> EdgeLabelId {
        c.edge_label_by_name(name).unwrap().id
    }

    #[test]
    fn single_cardinality_forward_is_column() {
        let c = catalog(RUNNING).unwrap();
        let d = c.storage_decision(id(&c, "WORKAT"), Direction::Fwd).unwrap();
        assert_eq!(d.layout, Layout::VertexColumnLayout);
        assert!(!d.store_page_offset);
        let d = c.storage_decision(id(&c, "WORKAT"), Direction::Bwd).unwrap();
        assert_eq!(d.layout, Layout::CsrLayout);
    }

    #[test]
    fn nn_with_property_keeps_page_offset() {
        let c = catalog(RUNNING).unwrap();
        for dir in Direction::BOTH {
            let d = c.storage_decision(id(&c, "FOLLOWS"), dir).unwrap();
            assert!(d.store_page_offset);
            assert!(!d.store_nbr_label);
            assert_eq!(d.layout, Layout::CsrLayout);
        }
    }

    #[test]
    fn nn_without_properties_drops_page_offset() {
        let c = catalog(RUNNING).unwrap();
        let d = c.storage_decision(id(&c, "KNOWS"), Direction::Fwd).unwrap();
        assert!(!d.store_page_offset);
        assert_eq!(d.page_offset_bytes, 0);
    }

    #[test]
    fn mixed_neighbour_labels() {
        let c = catalog(RUNNING).unwrap();
        let d = c.storage_decision(id(&c, "LIKES"), Direction::Fwd).unwrap();
        assert!(d.store_page_offset);
        assert!(d.store_nbr_label);
        // backwards every neighbour is a PERSON
        assert!(
            !c.storage_decision(id(&c, "LIKES"), Direction::Bwd)
                .unwrap()
                .store_nbr_label
        );
    }

    #[test]
    fn one_one_and_one_n_layouts() {
        let c = catalog(RUNNING).unwrap();
        for dir in Direction::BOTH {
            assert_eq!(
                c.storage_decision(id(&c, "MARRIED"), dir).unwrap().layout,
                Layout::VertexColumnLayout
            );
        }
        assert_eq!(
            c.storage_decision(id(&c, "OWNS"), Direction::Fwd).unwrap().layout,
            Layout::CsrLayout
        );
        assert_eq!(
            c.storage_decision(id(&c, "OWNS"), Direction::Bwd).unwrap().layout,
            Layout::VertexColumnLayout
        );
    }

    #[test]
    fn nbr_offset_width_tracks_counts() {
        let c = catalog(RUNNING).unwrap();
        assert_eq!(
            c.storage_decision(id(&c, "KNOWS"), Direction::Fwd)
                .unwrap()
                .nbr_offset_bytes,
            1
        );
        let c = c.with_vertex_counts(&[100_000, 300]);
        assert_eq!(
            c.storage_decision(id(&c, "KNOWS"), Direction::Fwd)
                .unwrap()
                .nbr_offset_bytes,
            3
        );
        assert_eq!(
            c.storage_decision(id(&c, "WORKAT"), Direction::Fwd)
                .unwrap()
                .nbr_offset_bytes,
            2
        );
    }

    #[test]
    fn empty_edge_set() {
        let c = catalog(r#"{"vertex_labels": [{"name": "V"}]}"#).unwrap();
        assert!(c.edge_labels().is_empty());
        assert_eq!(c.vertex_labels().len(), 1);
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(
            catalog(r#"{"vertex_labels": [{"name": "V"}, {"name": "V"}]}"#),
            Err(CatalogError::DuplicateLabel(_))
        ));
        assert!(matches!(
            catalog(
                r#"{"vertex_labels": [{"name": "V"}], "edge_labels": [{"name": "E", "src": ["V"], "dst": ["W"], "cardinality": "n-n"}]}"#
            ),
            Err(CatalogError::UnknownLabelReference { .. })
        ));
        assert!(matches!(
            catalog(
                r#"{"vertex_labels": [{"name": "V"}], "edge_labels": [{"name": "E", "src": ["V"], "dst": ["V"], "cardinality": "m-n"}]}"#
            ),
            Err(CatalogError::InvalidCardinality(_))
        ));
        assert!(matches!(catalog("{"), Err(CatalogError::Malformed(_))));
        assert!(matches!(
            catalog(
                r#"{"vertex_labels": [{"name": "V", "properties": [{"name": "x", "type": "INT64"}, {"name": "x", "type": "DOUBLE"}]}]}"#
            ),
            Err(CatalogError::DuplicateProperty { .. })
        ));
    }

    #[test]
    fn doc_roundtrip() {
        let c = catalog(RUNNING).unwrap();
        let again = Catalog::define_schema(&c.to_doc()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn decision_is_pure() {
        let c = catalog(RUNNING).unwrap();
        for e in c.edge_labels() {
            for dir in Direction::BOTH {
                assert_eq!(c.storage_decision(e.id, dir), c.storage_decision(e.id, dir));
            }
        }
    }
}
