//! Cypher-like query subset: lexer, parser, binder and a deterministic
//! left-deep planner.

mod ast;
mod lexer;
mod parser;
mod plan;

use thiserror::Error;

pub use ast::{
    AggFunc, CmpOp, EdgePattern, Literal, NodePattern, Operand, Pos, Predicate, PropRef, Query, Return, ReturnItem,
};
pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse, parse_with_positions, SourceMap};
pub use plan::{
    eval_cmp, plan, prepare, BoundOperand, BoundPredicate, BoundProp, ExtendOp, PhysicalPlan, PlanLabels, PlanOp,
    Projection, Sink, VarDef, VarKind,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueryError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("undeclared variable {var:?} at {pos}")]
    UndeclaredVariable { pos: Pos, var: String },
    #[error("variable {var:?} declared twice at {pos}")]
    DuplicateVariable { pos: Pos, var: String },
    #[error("variable {var:?} given a second, different label at {pos}")]
    LabelConflict { pos: Pos, var: String },
    #[error("node {var:?} needs a label at its first occurrence ({pos})")]
    MissingLabel { pos: Pos, var: String },
    #[error("cyclic pattern closed by the edge at {pos}; only tree patterns are supported")]
    CyclicPattern { pos: Pos },
    #[error("pattern is not connected")]
    DisconnectedPattern,
    #[error("unknown label {name:?} at {pos}")]
    UnknownLabel { pos: Pos, name: String },
    #[error("label {label:?} has no property {prop:?} ({pos})")]
    UnknownProperty { pos: Pos, label: String, prop: String },
    #[error("edge {edge:?} cannot connect to {var:?} ({pos})")]
    EndpointMismatch { pos: Pos, edge: String, var: String },
    #[error("type mismatch at {pos}: {message}")]
    TypeMismatch { pos: Pos, message: String },
    #[error("cannot aggregate {prop} of type {datatype} ({pos})")]
    NonNumericAggregate {
        pos: Pos,
        prop: String,
        datatype: &'static str,
    },
    #[error("hint {0:?} is not a node variable of the pattern")]
    InvalidHint(String),
    #[error("unsupported at {pos}: {message}")]
    Unsupported { pos: Pos, message: String },
    #[error("integer overflow in SUM")]
    Overflow,
    #[error(transparent)]
    Storage(#[from] crate::storage::StorageError),
}
