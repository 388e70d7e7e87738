//! Tuple-at-a-time executor over the same storage. Every operator owns its
//! output row and copies its input into it on each `next` call.

use crate::catalog::{Direction, EdgeLabelId, VertexLabelId};
use crate::exec::{Accumulator, Binding, QueryResult};
use crate::ids::VertexId;
use crate::query::{
    eval_cmp, BoundOperand, BoundProp, CmpOp, PhysicalPlan, PlanOp, Projection, QueryError, Sink, VarKind,
};
use crate::storage::{AdjList, AdjacencyCsr, EdgePropReader, GraphStore, NbrColumn, PropertyColumn};
use crate::value::{ScalarRef, Value};

/// One variable's binding in a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Slot {
    #[default]
    Empty,
    Vertex(VertexId),
    /// `entry` is the index in `src`'s CSR (0 for single-cardinality edges)
    Edge {
        src: VertexId,
        nbr: VertexId,
        entry: usize,
        page_offset: Option<u64>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RowTuple {
    pub slots: Vec<Slot>,
}

impl RowTuple {
    #[inline]
    fn vertex(&self, var: usize) -> VertexId {
        match self.slots[var] {
            Slot::Vertex(v) => v,
            other => panic!("slot {var} holds {other:?}, not a vertex"),
        }
    }
}

pub trait Operator<'a> {
    fn open(&mut self);
    /// The next row, or `None` when exhausted.
    fn next(&mut self) -> Option<&RowTuple>;
    fn close(&mut self);
}

struct Scan {
    var: usize,
    label: VertexLabelId,
    count: u64,
    next: u64,
    out: RowTuple,
}

impl<'a> Operator<'a> for Scan {
    fn open(&mut self) {
        self.next = 0;
    }

    fn next(&mut self) -> Option<&RowTuple> {
        if self.next >= self.count {
            return None;
        }
        self.out.slots[self.var] = Slot::Vertex(VertexId::new(self.label, self.next));
        self.next += 1;
        Some(&self.out)
    }

    fn close(&mut self) {}
}

enum Source<'a> {
    List(Option<&'a AdjacencyCsr>),
    Column(Option<&'a NbrColumn>),
}

/// Index nested-loop join over adjacency lists or neighbour columns.
struct Extend<'a> {
    child: Box<dyn Operator<'a> + 'a>,
    src: usize,
    dst: usize,
    edge: usize,
    dst_label: VertexLabelId,
    source: Source<'a>,
    input: RowTuple,
    list: Option<(VertexId, AdjList<'a>)>,
    i: usize,
    out: RowTuple,
}

impl<'a> Operator<'a> for Extend<'a> {
    fn open(&mut self) {
        self.child.open();
        self.list = None;
    }

    fn next(&mut self) -> Option<&RowTuple> {
        loop {
            if let Some((src, list)) = &self.list {
                if self.i < list.len() {
                    let i = self.i;
                    self.i += 1;
                    let nbr = list.nbr(i);
                    if nbr.label != self.dst_label {
                        continue;
                    }
                    self.out.clone_from(&self.input);
                    self.out.slots[self.dst] = Slot::Vertex(nbr);
                    self.out.slots[self.edge] = Slot::Edge {
                        src: *src,
                        nbr,
                        entry: list.start() + i,
                        page_offset: list.page_offset(i),
                    };
                    return Some(&self.out);
                }
                self.list = None;
            }
            let row = self.child.next()?;
            self.input.clone_from(row);
            let src = self.input.vertex(self.src);
            match &self.source {
                Source::List(csr) => {
                    if let Some(csr) = csr {
                        self.list = Some((src, csr.list(src.offset as usize)));
                        self.i = 0;
                    }
                }
                Source::Column(col) => {
                    let Some(nbr) = col.and_then(|c| c.get(src.offset as usize)) else {
                        continue;
                    };
                    if nbr.label != self.dst_label {
                        continue;
                    }
                    self.out.clone_from(&self.input);
                    self.out.slots[self.dst] = Slot::Vertex(nbr);
                    self.out.slots[self.edge] = Slot::Edge {
                        src,
                        nbr,
                        entry: 0,
                        page_offset: None,
                    };
                    return Some(&self.out);
                }
            }
        }
    }

    fn close(&mut self) {
        self.child.close();
    }
}

/// Reads an operand from a row.
enum Access<'a> {
    Lit(ScalarRef<'a>),
    Vertex { var: usize, col: &'a PropertyColumn },
    Edge { var: usize, reader: EdgePropReader<'a> },
}

impl<'a> Access<'a> {
    #[inline]
    fn get(&self, row: &RowTuple) -> ScalarRef<'a> {
        match self {
            Access::Lit(v) => *v,
            Access::Vertex { var, col } => col.get(row.vertex(*var).offset as usize),
            Access::Edge { var, reader } => match row.slots[*var] {
                Slot::Edge {
                    src,
                    nbr,
                    entry,
                    page_offset,
                } => reader.read_parts(src, nbr, entry, page_offset),
                _ => ScalarRef::Null,
            },
        }
    }
}

struct Filter<'a> {
    child: Box<dyn Operator<'a> + 'a>,
    lhs: Access<'a>,
    op: CmpOp,
    rhs: Access<'a>,
    out: RowTuple,
}

impl<'a> Operator<'a> for Filter<'a> {
    fn open(&mut self) {
        self.child.open();
    }

    fn next(&mut self) -> Option<&RowTuple> {
        loop {
            let row = self.child.next()?;
            if eval_cmp(self.op, self.lhs.get(row), self.rhs.get(row)) {
                self.out.clone_from(row);
                return Some(&self.out);
            }
        }
    }

    fn close(&mut self) {
        self.child.close();
    }
}

#[derive(Clone, Copy)]
enum EdgeInfo {
    None,
    Edge(EdgeLabelId, Direction),
}

fn node_label(plan: &PhysicalPlan, var: usize) -> VertexLabelId {
    match plan.vars[var].kind {
        VarKind::Node(l) => l,
        VarKind::Edge(_) => panic!("variable {var} is not a node"),
    }
}

fn access<'a>(
    store: &'a GraphStore,
    plan: &PhysicalPlan,
    edges: &[EdgeInfo],
    p: &BoundProp,
) -> Result<Access<'a>, QueryError> {
    Ok(match plan.vars[p.var].kind {
        VarKind::Node(l) => Access::Vertex {
            var: p.var,
            col: store.vertex_property(l, p.prop),
        },
        VarKind::Edge(_) => match edges[p.var] {
            EdgeInfo::Edge(label, dir) => Access::Edge {
                var: p.var,
                reader: store.edge_prop_reader(label, dir, p.prop)?,
            },
            EdgeInfo::None => {
                return Err(QueryError::Unsupported {
                    pos: Default::default(),
                    message: format!("{} read before it is bound", p.text),
                })
            }
        },
    })
}

/// Builds the operator tree of `plan` (without its sink). Also returns how
/// each edge variable was traversed.
fn build<'a>(
    store: &'a GraphStore,
    plan: &'a PhysicalPlan,
) -> Result<(Box<dyn Operator<'a> + 'a>, Vec<EdgeInfo>), QueryError> {
    let width = plan.vars.len();
    let mut edges = vec![EdgeInfo::None; width];
    let mut root: Option<Box<dyn Operator<'a> + 'a>> = None;
    let row = || RowTuple {
        slots: vec![Slot::Empty; width],
    };
    let no_scan = || QueryError::Unsupported {
        pos: Default::default(),
        message: "plan has no leading scan".into(),
    };
    for op in &plan.ops {
        root = Some(match op {
            PlanOp::Scan { var, label } => {
                if root.is_some() {
                    return Err(QueryError::Unsupported {
                        pos: Default::default(),
                        message: "scan must be the first operator".into(),
                    });
                }
                Box::new(Scan {
                    var: *var,
                    label: *label,
                    count: store.vertex_count(*label),
                    next: 0,
                    out: row(),
                })
            }
            PlanOp::ListExtend(e) | PlanOp::ColumnExtend(e) => {
                let src_label = node_label(plan, e.src);
                let source = if matches!(op, PlanOp::ListExtend(_)) {
                    Source::List(store.csr(e.label, e.dir, src_label)?)
                } else {
                    Source::Column(store.nbr_column(e.label, e.dir, src_label)?)
                };
                edges[e.edge] = EdgeInfo::Edge(e.label, e.dir);
                Box::new(Extend {
                    child: root.take().ok_or_else(no_scan)?,
                    src: e.src,
                    dst: e.dst,
                    edge: e.edge,
                    dst_label: e.dst_label,
                    source,
                    input: row(),
                    list: None,
                    i: 0,
                    out: row(),
                })
            }
            PlanOp::Filter(p) => {
                let lhs = access(store, plan, &edges, &p.lhs)?;
                let rhs = match &p.rhs {
                    BoundOperand::Lit(v) => Access::Lit(v.as_ref()),
                    BoundOperand::Prop(q) => access(store, plan, &edges, q)?,
                };
                Box::new(Filter {
                    child: root.take().ok_or_else(no_scan)?,
                    lhs,
                    op: p.op,
                    rhs,
                    out: row(),
                })
            }
        });
    }
    Ok((root.ok_or_else(no_scan)?, edges))
}

pub fn execute(store: &GraphStore, plan: &PhysicalPlan) -> Result<QueryResult, QueryError> {
    let (mut root, edges) = build(store, plan)?;
    root.open();
    let result = match &plan.sink {
        Sink::Count => {
            let mut n = 0u64;
            while root.next().is_some() {
                n += 1;
            }
            QueryResult::Count(n)
        }
        Sink::Sum(p) | Sink::Min(p) => {
            let mut acc = Accumulator::for_sink(&plan.sink).expect("aggregate sink");
            let a = access(store, plan, &edges, p)?;
            while let Some(row) = root.next() {
                acc.add(a.get(row), 1);
            }
            QueryResult::Scalar {
                column: plan.columns[0].clone(),
                value: acc.finish()?,
            }
        }
        Sink::Rows(proj) => {
            let cols = proj
                .iter()
                .map(|p| match p {
                    Projection::Vertex(v) => Ok((Some(*v), None)),
                    Projection::Prop(bp) => access(store, plan, &edges, bp).map(|a| (None, Some(a))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut rows = Vec::new();
            while let Some(row) = root.next() {
                rows.push(
                    cols.iter()
                        .map(|c| match c {
                            (Some(v), _) => Value::Vertex(row.vertex(*v)),
                            (None, Some(a)) => a.get(row).to_value(),
                            (None, None) => unreachable!(),
                        })
                        .collect(),
                );
            }
            QueryResult::Rows {
                columns: plan.columns.clone(),
                rows,
            }
        }
    };
    root.close();
    Ok(result)
}

/// Every output row as one binding per plan variable.
pub fn bindings(store: &GraphStore, plan: &PhysicalPlan) -> Result<Vec<Vec<Binding>>, QueryError> {
    let mut out = Vec::new();
    for_each_binding(store, plan, |b| out.push(b.to_vec()))?;
    Ok(out)
}

/// Streams every output row to `f` as one binding per plan variable.
pub fn for_each_binding(
    store: &GraphStore,
    plan: &PhysicalPlan,
    mut f: impl FnMut(&[Binding]),
) -> Result<(), QueryError> {
    let (mut root, edges) = build(store, plan)?;
    root.open();
    let mut buf = Vec::new();
    while let Some(row) = root.next() {
        buf.clear();
        buf.extend(row.slots.iter().enumerate().map(|(var, s)| match (*s, edges[var]) {
            (Slot::Vertex(v), _) => Binding::Vertex(v),
            (
                Slot::Edge {
                    src,
                    nbr,
                    entry,
                    page_offset,
                },
                EdgeInfo::Edge(label, dir),
            ) => Binding::Edge(store.edge_id_parts(label, dir, src, nbr, entry, page_offset)),
            _ => unreachable!("every plan variable is bound in an output row"),
        }));
        f(&buf);
    }
    root.close();
    Ok(())
}
