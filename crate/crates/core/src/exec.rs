//! Types shared by both executors and the single entry point that runs a
//! plan under either of them.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::catalog::{Catalog, DataType};
use crate::ids::{EdgeId, VertexId};
use crate::query::{prepare, PhysicalPlan, QueryError, Sink};
use crate::storage::GraphStore;
use crate::value::{ScalarRef, Value};
use crate::{lbp, volcano};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Executor {
    #[default]
    Lbp,
    Volcano,
}

impl FromStr for Executor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lbp" => Ok(Executor::Lbp),
            "volcano" => Ok(Executor::Volcano),
            _ => Err(format!("unknown executor {s:?} (expected lbp or volcano)")),
        }
    }
}

impl fmt::Display for Executor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Executor::Lbp => "lbp",
            Executor::Volcano => "volcano",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecOptions {
    /// vertices per scan chunk
    pub morsel: usize,
}

impl Default for ExecOptions {
    fn default() -> Self {
        Self { morsel: 1024 }
    }
}

/// What one plan variable is bound to in a flat tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Binding {
    Vertex(VertexId),
    Edge(EdgeId),
}

#[derive(Debug, Clone, PartialEq)]
pub enum QueryResult {
    Rows {
        columns: Vec<String>,
        rows: Vec<Vec<Value>>,
    },
    Count(u64),
    Scalar {
        column: String,
        value: Value,
    },
}

impl QueryResult {
    /// Rows in a canonical order, for comparing result multisets.
    pub fn sorted(mut self) -> Self {
        if let QueryResult::Rows { rows, .. } = &mut self {
            rows.sort_by(|a, b| cmp_rows(a, b));
        }
        self
    }

    pub fn num_rows(&self) -> usize {
        match self {
            QueryResult::Rows { rows, .. } => rows.len(),
            _ => 1,
        }
    }

    /// Tab-separated rendering with a header line; vertices print as
    /// `LABEL:offset`.
    pub fn to_tsv(&self, catalog: &Catalog) -> String {
        let cell = |v: &Value| match v {
            Value::Vertex(id) => format!("{}:{}", catalog.vertex_label(id.label).name, id.offset),
            other => other.to_string(),
        };
        match self {
            QueryResult::Rows { columns, rows } => {
                let mut out = columns.join("\t");
                out.push('\n');
                for r in rows {
                    let cells: Vec<String> = r.iter().map(cell).collect();
                    out.push_str(&cells.join("\t"));
                    out.push('\n');
                }
                out
            }
            QueryResult::Count(n) => format!("{n}\n"),
            QueryResult::Scalar { value, .. } => format!("{}\n", cell(value)),
        }
    }
}

fn cmp_rows(a: &[Value], b: &[Value]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(a.len().cmp(&b.len()))
}

/// SUM/MIN state. Values arrive with a multiplicity so the factorized
/// executor can add a whole group at once.
#[derive(Debug, Clone)]
pub(crate) struct Accumulator {
    kind: AccKind,
    int: i128,
    float: f64,
    any: bool,
    overflow: bool,
    min: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AccKind {
    SumInt,
    SumFloat,
    Min,
}

impl Accumulator {
    pub(crate) fn for_sink(sink: &Sink) -> Option<Self> {
        let kind = match sink {
            Sink::Sum(p) if p.datatype == DataType::Int64 => AccKind::SumInt,
            Sink::Sum(_) => AccKind::SumFloat,
            Sink::Min(_) => AccKind::Min,
            _ => return None,
        };
        Some(Self {
            kind,
            int: 0,
            float: 0.0,
            any: false,
            overflow: false,
            min: Value::Null,
        })
    }

    #[inline]
    pub(crate) fn add(&mut self, v: ScalarRef<'_>, mult: u64) {
        if v.is_null() || mult == 0 {
            return;
        }
        self.any = true;
        match self.kind {
            AccKind::SumInt => {
                if let ScalarRef::Int(x) = v {
                    match (x as i128)
                        .checked_mul(mult as i128)
                        .and_then(|p| self.int.checked_add(p))
                    {
                        Some(s) => self.int = s,
                        None => self.overflow = true,
                    }
                }
            }
            AccKind::SumFloat => {
                if let Some(x) = v.as_f64() {
                    self.float += x * mult as f64;
                }
            }
            AccKind::Min => {
                if self.min.is_null() || v.compare(self.min.as_ref()) == Some(Ordering::Less) {
                    self.min = v.to_value();
                }
            }
        }
    }

    pub(crate) fn finish(self) -> Result<Value, QueryError> {
        if !self.any {
            return Ok(Value::Null);
        }
        match self.kind {
            AccKind::SumInt if self.overflow => Err(QueryError::Overflow),
            AccKind::SumInt => i64::try_from(self.int)
                .map(Value::Int64)
                .map_err(|_| QueryError::Overflow),
            AccKind::SumFloat => Ok(Value::Double(self.float)),
            AccKind::Min => Ok(self.min),
        }
    }
}

/// Runs `plan` under `executor`.
pub fn execute(
    store: &GraphStore,
    plan: &PhysicalPlan,
    executor: Executor,
    opts: &ExecOptions,
) -> Result<QueryResult, QueryError> {
    match executor {
        Executor::Lbp => lbp::execute(store, plan, opts).map(|(r, _)| r),
        Executor::Volcano => volcano::execute(store, plan),
    }
}

/// Parses, plans and runs query text.
pub fn run_query(
    store: &GraphStore,
    text: &str,
    executor: Executor,
    hint: Option<&str>,
    opts: &ExecOptions,
) -> Result<QueryResult, QueryError> {
    let plan = prepare(text, store.catalog(), hint)?;
    execute(store, &plan, executor, opts)
}

/// Every flat tuple of variable bindings the plan produces, ignoring the
/// sink; the reference semantics both executors must agree on.
pub fn bindings(
    store: &GraphStore,
    plan: &PhysicalPlan,
    executor: Executor,
    opts: &ExecOptions,
) -> Result<Vec<Vec<Binding>>, QueryError> {
    match executor {
        Executor::Lbp => lbp::bindings(store, plan, opts),
        Executor::Volcano => volcano::bindings(store, plan),
    }
}

/// Streams every flat output tuple to `f` without collecting them.
pub fn for_each_binding(
    store: &GraphStore,
    plan: &PhysicalPlan,
    executor: Executor,
    opts: &ExecOptions,
    f: impl FnMut(&[Binding]),
) -> Result<(), QueryError> {
    match executor {
        Executor::Lbp => lbp::for_each_binding(store, plan, opts, f),
        Executor::Volcano => volcano::for_each_binding(store, plan, f),
    }
}
