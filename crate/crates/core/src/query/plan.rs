use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

use super::ast::{AggFunc, CmpOp, Literal, Operand, Pos, PropRef, Query, Return, ReturnItem};
use super::parser::{parse_with_positions, SourceMap};
use super::QueryError;
use crate::catalog::{Catalog, DataType, Direction, EdgeLabelId, Layout, PropertyDef, VertexLabelId};
use crate::value::{parse_date, ScalarRef, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Node(VertexLabelId),
    Edge(EdgeLabelId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDef {
    /// `None` for an anonymous edge
    pub name: Option<String>,
    pub kind: VarKind,
}

/// A property of a plan variable, resolved against the catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundProp {
    pub var: usize,
    pub prop: usize,
    pub datatype: DataType,
    /// `var.prop` as written
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundOperand {
    Prop(BoundProp),
    Lit(Value),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundPredicate {
    pub lhs: BoundProp,
    pub op: CmpOp,
    pub rhs: BoundOperand,
}

impl BoundPredicate {
    /// Plan variables the predicate reads.
    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        let rhs = match &self.rhs {
            BoundOperand::Prop(p) => Some(p.var),
            BoundOperand::Lit(_) => None,
        };
        std::iter::once(self.lhs.var).chain(rhs)
    }
}

impl fmt::Display for BoundPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} ", self.lhs.text, self.op.as_str())?;
        match &self.rhs {
            BoundOperand::Prop(p) => f.write_str(&p.text),
            BoundOperand::Lit(Value::String(s)) => write!(f, "{:?}", s),
            BoundOperand::Lit(v) => write!(f, "{v}"),
        }
    }
}

/// Compares two scalars under the query semantics: NULL or incomparable
/// operands make every comparison false.
#[inline]
pub fn eval_cmp(op: CmpOp, l: ScalarRef<'_>, r: ScalarRef<'_>) -> bool {
    match op {
        CmpOp::Contains => matches!((l, r), (ScalarRef::Str(a), ScalarRef::Str(b)) if a.contains(b)),
        CmpOp::StartsWith => matches!((l, r), (ScalarRef::Str(a), ScalarRef::Str(b)) if a.starts_with(b)),
        _ => match l.compare(r) {
            None => false,
            Some(ord) => match op {
                CmpOp::Lt => ord == Ordering::Less,
                CmpOp::Le => ord != Ordering::Greater,
                CmpOp::Eq => ord == Ordering::Equal,
                CmpOp::Ne => ord != Ordering::Equal,
                CmpOp::Ge => ord != Ordering::Less,
                CmpOp::Gt => ord == Ordering::Greater,
                CmpOp::Contains | CmpOp::StartsWith => unreachable!(),
            },
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtendOp {
    pub edge: usize,
    pub label: EdgeLabelId,
    pub dir: Direction,
    pub src: usize,
    pub dst: usize,
    pub dst_label: VertexLabelId,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanOp {
    Scan { var: usize, label: VertexLabelId },
    ListExtend(ExtendOp),
    ColumnExtend(ExtendOp),
    Filter(BoundPredicate),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    Vertex(usize),
    Prop(BoundProp),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sink {
    Rows(Vec<Projection>),
    Count,
    Sum(BoundProp),
    Min(BoundProp),
}

/// A left-deep physical plan runnable by either executor.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalPlan {
    /// nodes in declaration order, then edges in declaration order
    pub vars: Vec<VarDef>,
    pub ops: Vec<PlanOp>,
    pub sink: Sink,
    /// output column names for `Sink::Rows`, or the aggregate's name
    pub columns: Vec<String>,
    pub var_names: Vec<String>,
    pub label_names: PlanLabels,
}

/// Label names captured for display, so plans print without a catalog.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlanLabels {
    pub vertex: Vec<String>,
    pub edge: Vec<String>,
}

impl PhysicalPlan {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    fn var_name(&self, v: usize) -> &str {
        &self.var_names[v]
    }
}

impl fmt::Display for PhysicalPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            match op {
                PlanOp::Scan { var, label } => writeln!(
                    f,
                    "Scan({}:{})",
                    self.var_name(*var),
                    self.label_names.vertex[label.index()]
                )?,
                PlanOp::ListExtend(e) | PlanOp::ColumnExtend(e) => {
                    let kind = if matches!(op, PlanOp::ListExtend(_)) {
                        "ListExtend"
                    } else {
                        "ColumnExtend"
                    };
                    writeln!(
                        f,
                        "{kind}({})-[{}:{}]-{}({}:{})",
                        self.var_name(e.src),
                        self.var_name(e.edge),
                        self.label_names.edge[e.label.index()],
                        if e.dir == Direction::Fwd { ">" } else { "<" },
                        self.var_name(e.dst),
                        self.label_names.vertex[e.dst_label.index()],
                    )?
                }
                PlanOp::Filter(p) => writeln!(f, "Filter({p})")?,
            }
        }
        match &self.sink {
            Sink::Rows(_) => write!(f, "Sink({})", self.columns.join(", ")),
            Sink::Count => f.write_str("Aggregate(COUNT(*))"),
            Sink::Sum(p) => write!(f, "Aggregate(SUM({}))", p.text),
            Sink::Min(p) => write!(f, "Aggregate(MIN({}))", p.text),
        }
    }
}

struct Binder<'a> {
    catalog: &'a Catalog,
    query: &'a Query,
    map: SourceMap,
    vars: Vec<VarDef>,
}

impl Binder<'_> {
    fn var_index(&self, name: &str) -> usize {
        self.vars
            .iter()
            .position(|v| v.name.as_deref() == Some(name))
            .expect("parser checked declarations")
    }

    fn prop(&self, r: &PropRef, pos: Pos) -> Result<BoundProp, QueryError> {
        let var = self.var_index(&r.var);
        let (label, props): (&str, &[PropertyDef]) = match self.vars[var].kind {
            VarKind::Node(l) => {
                let d = self.catalog.vertex_label(l);
                (&d.name, &d.properties)
            }
            VarKind::Edge(l) => {
                let d = self.catalog.edge_label(l);
                (&d.name, &d.properties)
            }
        };
        let prop = props
            .iter()
            .position(|p| p.name == r.prop)
            .ok_or_else(|| QueryError::UnknownProperty {
                pos,
                label: label.to_owned(),
                prop: r.prop.clone(),
            })?;
        Ok(BoundProp {
            var,
            prop,
            datatype: props[prop].datatype,
            text: r.to_string(),
        })
    }

    fn literal(&self, lhs: &BoundProp, op: CmpOp, lit: &Literal, pos: Pos) -> Result<Value, QueryError> {
        let mismatch = || QueryError::TypeMismatch {
            pos,
            message: format!("{} is {} but compared with {lit}", lhs.text, lhs.datatype.as_str()),
        };
        let text_op = matches!(op, CmpOp::Contains | CmpOp::StartsWith);
        if text_op && !lhs.datatype.is_textual() {
            return Err(mismatch());
        }
        Ok(match (lhs.datatype, lit) {
            (DataType::Int64 | DataType::Double, Literal::Int(v)) => Value::Int64(*v),
            (DataType::Int64 | DataType::Double, Literal::Float(v)) => Value::Double(*v),
            (DataType::Boolean, Literal::Bool(b)) => Value::Bool(*b),
            (DataType::Date, Literal::Str(s)) => {
                Value::Date(parse_date(s).ok_or_else(|| QueryError::TypeMismatch {
                    pos,
                    message: format!("{s:?} is not a YYYY-MM-DD date"),
                })?)
            }
            (DataType::String | DataType::Categorical, Literal::Str(s)) => Value::String(s.clone()),
            _ => return Err(mismatch()),
        })
    }

    fn comparable(a: DataType, b: DataType) -> bool {
        let class = |d: DataType| match d {
            DataType::Int64 | DataType::Double => 0,
            DataType::Date => 1,
            DataType::Boolean => 2,
            DataType::String | DataType::Categorical => 3,
        };
        class(a) == class(b)
    }

    fn predicates(&self) -> Result<Vec<BoundPredicate>, QueryError> {
        let mut out = Vec::new();
        for (i, p) in self.query.predicates.iter().enumerate() {
            let (lpos, rpos) = self.map.predicates.get(i).copied().unwrap_or_default();
            let lhs = self.prop(&p.lhs, lpos)?;
            let rhs = match &p.rhs {
                Operand::Lit(l) => BoundOperand::Lit(self.literal(&lhs, p.op, l, lpos)?),
                Operand::Prop(r) => {
                    let rhs = self.prop(r, rpos.unwrap_or_default())?;
                    let text_op = matches!(p.op, CmpOp::Contains | CmpOp::StartsWith);
                    if !Self::comparable(lhs.datatype, rhs.datatype) || (text_op && !lhs.datatype.is_textual()) {
                        return Err(QueryError::TypeMismatch {
                            pos: lpos,
                            message: format!(
                                "cannot compare {} ({}) with {} ({})",
                                lhs.text,
                                lhs.datatype.as_str(),
                                rhs.text,
                                rhs.datatype.as_str()
                            ),
                        });
                    }
                    BoundOperand::Prop(rhs)
                }
            };
            out.push(BoundPredicate { lhs, op: p.op, rhs });
        }
        Ok(out)
    }

    fn sink(&self) -> Result<(Sink, Vec<String>), QueryError> {
        let ret_pos = |i: usize| self.map.ret.get(i).copied().unwrap_or_default();
        Ok(match &self.query.ret {
            Return::Star => {
                let names: Vec<String> = self.query.nodes.iter().map(|n| n.var.clone()).collect();
                let proj = (0..self.query.nodes.len()).map(Projection::Vertex).collect();
                (Sink::Rows(proj), names)
            }
            Return::CountStar => (Sink::Count, vec!["COUNT(*)".into()]),
            Return::Agg(func, r) => {
                let p = self.prop(r, ret_pos(0))?;
                let ok = match func {
                    AggFunc::Sum => matches!(p.datatype, DataType::Int64 | DataType::Double),
                    AggFunc::Min => p.datatype.is_numeric(),
                };
                if !ok {
                    return Err(QueryError::NonNumericAggregate {
                        pos: ret_pos(0),
                        prop: p.text,
                        datatype: p.datatype.as_str(),
                    });
                }
                match func {
                    AggFunc::Sum => {
                        let name = format!("SUM({})", p.text);
                        (Sink::Sum(p), vec![name])
                    }
                    AggFunc::Min => {
                        let name = format!("MIN({})", p.text);
                        (Sink::Min(p), vec![name])
                    }
                }
            }
            Return::Items(items) => {
                let mut proj = Vec::new();
                let mut names = Vec::new();
                for (i, it) in items.iter().enumerate() {
                    match it {
                        ReturnItem::Var(v) => {
                            let idx = self.var_index(v);
                            if matches!(self.vars[idx].kind, VarKind::Edge(_)) {
                                return Err(QueryError::Unsupported {
                                    pos: ret_pos(i),
                                    message: format!("returning edge variable {v:?}; return its properties instead"),
                                });
                            }
                            proj.push(Projection::Vertex(idx));
                        }
                        ReturnItem::Prop(r) => proj.push(Projection::Prop(self.prop(r, ret_pos(i))?)),
                    }
                    names.push(it.to_string());
                }
                (Sink::Rows(proj), names)
            }
        })
    }
}

fn plan_inner(
    query: &Query,
    map: SourceMap,
    catalog: &Catalog,
    hint: Option<&str>,
) -> Result<PhysicalPlan, QueryError> {
    let mut vars = Vec::with_capacity(query.nodes.len() + query.edges.len());
    for (i, n) in query.nodes.iter().enumerate() {
        let label = catalog
            .vertex_label_by_name(&n.label)
            .ok_or_else(|| QueryError::UnknownLabel {
                pos: map.node_labels.get(i).copied().unwrap_or_default(),
                name: n.label.clone(),
            })?;
        vars.push(VarDef {
            name: Some(n.var.clone()),
            kind: VarKind::Node(label.id),
        });
    }
    let node_index = |name: &str| {
        query
            .nodes
            .iter()
            .position(|n| n.var == name)
            .expect("parser checked declarations")
    };
    let node_label = |vars: &[VarDef], i: usize| match vars[i].kind {
        VarKind::Node(l) => l,
        VarKind::Edge(_) => unreachable!(),
    };
    for (i, e) in query.edges.iter().enumerate() {
        let pos = map.edge_labels.get(i).copied().unwrap_or_default();
        let def = catalog
            .edge_label_by_name(&e.label)
            .ok_or_else(|| QueryError::UnknownLabel {
                pos,
                name: e.label.clone(),
            })?;
        for (end, labels) in [(&e.src, &def.src_labels), (&e.dst, &def.dst_labels)] {
            if !labels.contains(&node_label(&vars, node_index(end))) {
                return Err(QueryError::EndpointMismatch {
                    pos,
                    edge: e.label.clone(),
                    var: end.clone(),
                });
            }
        }
        vars.push(VarDef {
            name: e.var.clone(),
            kind: VarKind::Edge(def.id),
        });
    }

    let binder = Binder {
        catalog,
        query,
        map,
        vars,
    };
    let mut pending: Vec<Option<BoundPredicate>> = binder.predicates()?.into_iter().map(Some).collect();
    let (sink, columns) = binder.sink()?;
    let vars = binder.vars;
    let n_nodes = query.nodes.len();

    let start = match hint {
        Some(h) => query
            .nodes
            .iter()
            .position(|n| n.var == h)
            .ok_or_else(|| QueryError::InvalidHint(h.to_owned()))?,
        None => pending
            .iter()
            .flatten()
            .find(|p| p.op == CmpOp::Eq && p.lhs.var < n_nodes && matches!(p.rhs, BoundOperand::Lit(_)))
            .map(|p| p.lhs.var)
            .unwrap_or_else(|| {
                (0..n_nodes)
                    .min_by_key(|&i| (catalog.vertex_count(node_label(&vars, i)), i))
                    .expect("pattern has a node")
            }),
    };

    let mut bound = vec![false; vars.len()];
    let mut ops = Vec::with_capacity(vars.len() + pending.len());
    let place_filters = |bound: &[bool], pending: &mut [Option<BoundPredicate>], ops: &mut Vec<PlanOp>| {
        for slot in pending.iter_mut() {
            if slot.as_ref().is_some_and(|p| p.vars().all(|v| bound[v])) {
                ops.push(PlanOp::Filter(slot.take().expect("checked")));
            }
        }
    };

    ops.push(PlanOp::Scan {
        var: start,
        label: node_label(&vars, start),
    });
    bound[start] = true;
    place_filters(&bound, &mut pending, &mut ops);

    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        for (i, e) in query.edges.iter().enumerate() {
            let edge = n_nodes + i;
            if bound[edge] {
                continue;
            }
            let (src, dst) = (node_index(&e.src), node_index(&e.dst));
            let (dir, other) = if src == node {
                (Direction::Fwd, dst)
            } else if dst == node {
                (Direction::Bwd, src)
            } else {
                continue;
            };
            let label = match vars[edge].kind {
                VarKind::Edge(l) => l,
                VarKind::Node(_) => unreachable!(),
            };
            let decision = catalog
                .storage_decision(label, dir)
                .map_err(|e| QueryError::Unsupported {
                    pos: Pos::default(),
                    message: e.to_string(),
                })?;
            let ext = ExtendOp {
                edge,
                label,
                dir,
                src: node,
                dst: other,
                dst_label: node_label(&vars, other),
            };
            ops.push(match decision.layout {
                Layout::VertexColumnLayout => PlanOp::ColumnExtend(ext),
                Layout::CsrLayout => PlanOp::ListExtend(ext),
            });
            bound[edge] = true;
            bound[other] = true;
            place_filters(&bound, &mut pending, &mut ops);
            queue.push_back(other);
        }
    }
    debug_assert!(pending.iter().all(Option::is_none));

    let var_names = vars
        .iter()
        .enumerate()
        .map(|(i, v)| v.name.clone().unwrap_or_else(|| format!("_e{}", i - n_nodes)))
        .collect();
    Ok(PhysicalPlan {
        vars,
        ops,
        sink,
        columns,
        var_names,
        label_names: PlanLabels {
            vertex: catalog.vertex_labels().iter().map(|l| l.name.clone()).collect(),
            edge: catalog.edge_labels().iter().map(|l| l.name.clone()).collect(),
        },
    })
}

/// Binds a parsed query against `catalog` and picks a left-deep plan.
/// Errors carry no source positions; use [`prepare`] for those.
pub fn plan(query: &Query, catalog: &Catalog, hint: Option<&str>) -> Result<PhysicalPlan, QueryError> {
    plan_inner(query, SourceMap::default(), catalog, hint)
}

/// Parses, binds and plans query text.
pub fn prepare(text: &str, catalog: &Catalog, hint: Option<&str>) -> Result<PhysicalPlan, QueryError> {
    let (q, map) = parse_with_positions(text)?;
    plan_inner(&q, map, catalog, hint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::SchemaDoc;

    fn catalog() -> Catalog {
        let text = include_str!("../../../../fixtures/social/schema.json");
        Catalog::define_schema(&SchemaDoc::from_json(text).unwrap())
            .unwrap()
            .with_vertex_counts(&[6, 3])
    }

    fn shape(p: &PhysicalPlan) -> Vec<String> {
        p.to_string().lines().map(str::to_owned).collect()
    }

    #[test]
    fn work_at_with_hint() {
        let q = "MATCH (a:PERSON)-[e:WORKAT]->(b:ORG) WHERE a.age > 22 AND b.estd < 2015 RETURN *";
        let p = prepare(q, &catalog(), Some("a")).unwrap();
        assert_eq!(
            shape(&p),
            [
                "Scan(a:PERSON)",
                "Filter(a.age > 22)",
                "ColumnExtend(a)-[e:WORKAT]->(b:ORG)",
                "Filter(b.estd < 2015)",
                "Sink(a, b)"
            ]
        );
    }

    #[test]
    fn two_hop_path_with_hint() {
        let q = "MATCH (a:PERSON)-[:FOLLOWS]->(b:PERSON)-[:FOLLOWS]->(c:PERSON)-[:STUDYAT]->(d:ORG) \
                 WHERE a.age > 50 AND d.name = 'UW' RETURN *";
        let p = prepare(q, &catalog(), Some("a")).unwrap();
        let kinds: Vec<&str> = p
            .ops
            .iter()
            .map(|op| match op {
                PlanOp::Scan { .. } => "scan",
                PlanOp::ListExtend(_) => "list",
                PlanOp::ColumnExtend(_) => "column",
                PlanOp::Filter(_) => "filter",
            })
            .collect();
        assert_eq!(kinds, ["scan", "filter", "list", "list", "column", "filter"]);
    }

    #[test]
    fn default_start_variable() {
        let c = catalog();
        // equality literal wins
        let p = prepare(
            "MATCH (a:PERSON)-[:WORKAT]->(b:ORG) WHERE a.name = 'Bob' RETURN *",
            &c,
            None,
        )
        .unwrap();
        assert!(matches!(p.ops[0], PlanOp::Scan { var: 0, .. }));
        // otherwise the smaller label, traversed backward
        let p = prepare("MATCH (a:PERSON)-[:WORKAT]->(b:ORG) RETURN COUNT(*)", &c, None).unwrap();
        assert_eq!(
            shape(&p),
            [
                "Scan(b:ORG)",
                "ListExtend(b)-[_e0:WORKAT]-<(a:PERSON)",
                "Aggregate(COUNT(*))"
            ]
        );
        // ties go to the first declared
        let p = prepare("MATCH (x:PERSON)-[:FOLLOWS]->(y:PERSON) RETURN *", &c, None).unwrap();
        assert!(matches!(p.ops[0], PlanOp::Scan { var: 0, .. }));
    }

    #[test]
    fn single_node_plan() {
        let p = prepare("MATCH (a:PERSON) RETURN COUNT(*)", &catalog(), None).unwrap();
        assert_eq!(shape(&p), ["Scan(a:PERSON)", "Aggregate(COUNT(*))"]);
    }

    #[test]
    fn every_edge_and_predicate_once() {
        let q = "MATCH (c:PERSON)<-[f:FOLLOWS]-(a:PERSON)-[w:WORKAT]->(o:ORG), (a)-[:STUDYAT]->(s:ORG) \
                 WHERE f.since > 2012 AND o.estd < s.estd AND a.age >= 20 RETURN a.name, o.name";
        let c = catalog();
        let p = prepare(q, &c, Some("o")).unwrap();
        let extends = p
            .ops
            .iter()
            .filter(|o| matches!(o, PlanOp::ListExtend(_) | PlanOp::ColumnExtend(_)));
        assert_eq!(extends.count(), 3);
        assert_eq!(p.ops.iter().filter(|o| matches!(o, PlanOp::Filter(_))).count(), 3);
        assert_eq!(prepare(q, &c, Some("o")).unwrap().to_string(), p.to_string());
    }

    #[test]
    fn binding_errors() {
        let c = catalog();
        let err = |q: &str| prepare(q, &c, None).unwrap_err();
        assert!(matches!(
            err("MATCH (a:NOPE) RETURN *"),
            QueryError::UnknownLabel {
                pos: Pos { line: 1, col: 10 },
                ..
            }
        ));
        assert!(matches!(
            err("MATCH (a:PERSON) WHERE a.height > 1 RETURN *"),
            QueryError::UnknownProperty { .. }
        ));
        assert!(matches!(
            err("MATCH (a:PERSON) WHERE a.age = 'x' RETURN *"),
            QueryError::TypeMismatch { .. }
        ));
        assert!(matches!(
            err("MATCH (a:PERSON) WHERE a.age CONTAINS 'x' RETURN *"),
            QueryError::TypeMismatch { .. }
        ));
        assert!(matches!(
            err("MATCH (a:PERSON)-[:WORKAT]->(b:ORG) WHERE a.name < b.estd RETURN *"),
            QueryError::TypeMismatch { .. }
        ));
        assert!(matches!(
            err("MATCH (a:ORG)-[:WORKAT]->(b:ORG) RETURN *"),
            QueryError::EndpointMismatch { .. }
        ));
        assert!(matches!(
            err("MATCH (a:PERSON) RETURN SUM(a.name)"),
            QueryError::NonNumericAggregate { .. }
        ));
        assert!(matches!(
            err("MATCH (a:PERSON)-[e:FOLLOWS]->(b:PERSON) RETURN e"),
            QueryError::Unsupported { .. }
        ));
        assert!(matches!(
            prepare("MATCH (a:PERSON) RETURN *", &c, Some("zz")),
            Err(QueryError::InvalidHint(_))
        ));
    }

    #[test]
    fn null_and_type_semantics() {
        assert!(!eval_cmp(CmpOp::Eq, ScalarRef::Null, ScalarRef::Null));
        assert!(!eval_cmp(CmpOp::Ne, ScalarRef::Null, ScalarRef::Int(1)));
        assert!(eval_cmp(CmpOp::Lt, ScalarRef::Int(1), ScalarRef::Double(1.5)));
        assert!(eval_cmp(
            CmpOp::StartsWith,
            ScalarRef::Str("Carol"),
            ScalarRef::Str("Ca")
        ));
        assert!(!eval_cmp(CmpOp::Contains, ScalarRef::Null, ScalarRef::Str("")));
    }
}
