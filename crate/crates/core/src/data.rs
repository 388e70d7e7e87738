//! Logical graph data as loaded from input files, before columnar storage.

use crate::catalog::Catalog;
use crate::ids::VertexId;
use crate::value::Value;

/// All vertices of one label; `columns[p][offset]` is property `p`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VertexTable {
    pub count: u64,
    pub columns: Vec<Vec<Value>>,
}

/// All edges of one label in load order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeTable {
    pub src: Vec<VertexId>,
    pub dst: Vec<VertexId>,
    /// `columns[p][i]` is property `p` of edge `i`
    pub columns: Vec<Vec<Value>>,
}

impl EdgeTable {
    pub fn len(&self) -> usize {
        self.src.len()
    }

    pub fn is_empty(&self) -> bool {
        self.src.is_empty()
    }

    pub fn push(&mut self, src: VertexId, dst: VertexId, props: Vec<Value>) {
        self.src.push(src);
        self.dst.push(dst);
        if self.columns.len() < props.len() {
            self.columns.resize(props.len(), Vec::new());
        }
        for (col, v) in self.columns.iter_mut().zip(props) {
            col.push(v);
        }
    }
}

/// Tables indexed by label id, in catalog order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GraphData {
    pub vertices: Vec<VertexTable>,
    pub edges: Vec<EdgeTable>,
}

impl GraphData {
    /// Empty tables with the right number of property columns.
    pub fn empty(catalog: &Catalog) -> Self {
        Self {
            vertices: catalog
                .vertex_labels()
                .iter()
                .map(|v| VertexTable {
                    count: 0,
                    columns: vec![Vec::new(); v.properties.len()],
                })
                .collect(),
            edges: catalog
                .edge_labels()
                .iter()
                .map(|e| EdgeTable {
                    src: Vec::new(),
                    dst: Vec::new(),
                    columns: vec![Vec::new(); e.properties.len()],
                })
                .collect(),
        }
    }

    pub fn vertex_counts(&self) -> Vec<u64> {
        self.vertices.iter().map(|t| t.count).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(EdgeTable::len).sum()
    }
}
