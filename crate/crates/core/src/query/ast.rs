use std::fmt;

pub(crate) const KEYWORDS: [&str; 12] = [
    "MATCH", "WHERE", "RETURN", "AND", "COUNT", "SUM", "MIN", "CONTAINS", "STARTS", "WITH", "TRUE", "FALSE",
];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(s))
}

/// Writes an identifier, backquoting it when it would not lex back as one.
struct Ident<'a>(&'a str);

impl fmt::Display for Ident<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.0;
        let mut chars = s.chars();
        let simple = chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
            && chars.all(|c| c.is_alphanumeric() || c == '_')
            && !is_keyword(s);
        if simple {
            f.write_str(s)
        } else {
            write!(f, "`{s}`")
        }
    }
}

/// Line and column (both 1-based) of a token in the query text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodePattern {
    pub var: String,
    pub label: String,
}

/// An edge normalised to source → destination regardless of how it was written.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePattern {
    pub var: Option<String>,
    pub label: String,
    pub src: String,
    pub dst: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropRef {
    pub var: String,
    pub prop: String,
}

impl fmt::Display for PropRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", Ident(&self.var), Ident(&self.prop))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(v) => write!(f, "{v}"),
            Literal::Float(v) => {
                if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 {
                    write!(f, "{v:.1}")
                } else {
                    write!(f, "{v:?}")
                }
            }
            Literal::Str(s) => write!(f, "'{}'", s.replace('\\', "\\\\").replace('\'', "\\'")),
            Literal::Bool(b) => write!(f, "{}", if *b { "TRUE" } else { "FALSE" }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Prop(PropRef),
    Lit(Literal),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Prop(p) => p.fmt(f),
            Operand::Lit(l) => l.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
    Contains,
    StartsWith,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
            CmpOp::Contains => "CONTAINS",
            CmpOp::StartsWith => "STARTS WITH",
        }
    }

    /// The operator with its operands swapped (`a < b` ⇔ `b > a`).
    pub fn flip(self) -> Option<CmpOp> {
        Some(match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
            CmpOp::Eq | CmpOp::Ne => self,
            CmpOp::Contains | CmpOp::StartsWith => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub lhs: PropRef,
    pub op: CmpOp,
    pub rhs: Operand,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.as_str(), self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggFunc {
    Sum,
    Min,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReturnItem {
    Var(String),
    Prop(PropRef),
}

impl fmt::Display for ReturnItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReturnItem::Var(v) => Ident(v).fmt(f),
            ReturnItem::Prop(p) => p.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Return {
    Star,
    CountStar,
    Items(Vec<ReturnItem>),
    Agg(AggFunc, PropRef),
}

/// A parsed query: a tree-shaped pattern, a conjunction of predicates and a
/// return clause.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    /// in order of first appearance
    pub nodes: Vec<NodePattern>,
    pub edges: Vec<EdgePattern>,
    pub predicates: Vec<Predicate>,
    pub ret: Return,
}

impl Query {
    pub fn node(&self, var: &str) -> Option<&NodePattern> {
        self.nodes.iter().find(|n| n.var == var)
    }
}

impl fmt::Display for Query {
    /// Canonical text: node declarations first, then one path per edge
    /// written source to destination. Parsing it yields an identical AST.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MATCH ")?;
        let mut first = true;
        for n in &self.nodes {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "({}:{})", Ident(&n.var), Ident(&n.label))?;
        }
        for e in &self.edges {
            write!(f, ", ({})-[", Ident(&e.src))?;
            if let Some(v) = &e.var {
                Ident(v).fmt(f)?;
            }
            write!(f, ":{}]->({})", Ident(&e.label), Ident(&e.dst))?;
        }
        if !self.predicates.is_empty() {
            f.write_str(" WHERE ")?;
            for (i, p) in self.predicates.iter().enumerate() {
                if i > 0 {
                    f.write_str(" AND ")?;
                }
                p.fmt(f)?;
            }
        }
        f.write_str(" RETURN ")?;
        match &self.ret {
            Return::Star => f.write_str("*"),
            Return::CountStar => f.write_str("COUNT(*)"),
            Return::Items(items) => {
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    it.fmt(f)?;
                }
                Ok(())
            }
            Return::Agg(func, p) => {
                let name = match func {
                    AggFunc::Sum => "SUM",
                    AggFunc::Min => "MIN",
                };
                write!(f, "{name}({p})")
            }
        }
    }
}
