use std::collections::HashMap;

use super::ast::{
    is_keyword, AggFunc, CmpOp, EdgePattern, Literal, NodePattern, Operand, Pos, Predicate, PropRef, Query, Return,
    ReturnItem,
};
use super::lexer::{tokenize, Tok, Token};
use super::QueryError;

/// Token positions of the AST parts the binder may report on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SourceMap {
    pub node_labels: Vec<Pos>,
    pub edge_labels: Vec<Pos>,
    pub predicates: Vec<(Pos, Option<Pos>)>,
    pub ret: Vec<Pos>,
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    nodes: Vec<NodePattern>,
    node_pos: HashMap<String, usize>,
    edges: Vec<EdgePattern>,
    edge_vars: HashMap<String, Pos>,
    map: SourceMap,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> QueryError {
        QueryError::Syntax {
            pos: self.pos(),
            message: format!("expected {expected}, found {}", self.peek().describe()),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Pos, QueryError> {
        if *self.peek() == tok {
            Ok(self.next().pos)
        } else {
            Err(self.unexpected(what))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s.eq_ignore_ascii_case(kw))
    }

    fn keyword(&mut self, kw: &str) -> Result<Pos, QueryError> {
        if self.at_keyword(kw) {
            Ok(self.next().pos)
        } else {
            Err(self.unexpected(kw))
        }
    }

    /// Any identifier (labels, property names).
    fn name(&mut self, what: &str) -> Result<(String, Pos), QueryError> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::QuotedIdent(s) => Ok((s, self.next().pos)),
            _ => Err(self.unexpected(what)),
        }
    }

    /// A variable: an identifier that is not a reserved word.
    fn var(&mut self) -> Result<(String, Pos), QueryError> {
        match self.peek().clone() {
            Tok::Ident(s) if is_keyword(&s) => Err(QueryError::Syntax {
                pos: self.pos(),
                message: format!("reserved word {s} cannot name a variable"),
            }),
            Tok::Ident(s) | Tok::QuotedIdent(s) => Ok((s, self.next().pos)),
            _ => Err(self.unexpected("variable")),
        }
    }

    fn node(&mut self) -> Result<String, QueryError> {
        self.expect(Tok::LParen, "'('")?;
        let (var, pos) = self.var()?;
        let label = if *self.peek() == Tok::Colon {
            self.next();
            Some(self.name("label")?)
        } else {
            None
        };
        self.expect(Tok::RParen, "')'")?;
        if self.edge_vars.contains_key(&var) {
            return Err(QueryError::DuplicateVariable { pos, var });
        }
        match (self.node_pos.get(&var), label) {
            (Some(&i), Some((l, lpos))) if self.nodes[i].label != l => {
                Err(QueryError::LabelConflict { pos: lpos, var })
            }
            (Some(_), _) => Ok(var),
            (None, Some((label, lpos))) => {
                self.node_pos.insert(var.clone(), self.nodes.len());
                self.nodes.push(NodePattern {
                    var: var.clone(),
                    label,
                });
                self.map.node_labels.push(lpos);
                Ok(var)
            }
            (None, None) => Err(QueryError::MissingLabel { pos, var }),
        }
    }

    /// `-[e:L]->` or `<-[e:L]-`.
    fn rel(&mut self) -> Result<Rel, QueryError> {
        let backward = *self.peek() == Tok::Lt;
        if backward {
            self.next();
        }
        self.expect(Tok::Dash, "'-'")?;
        self.expect(Tok::LBracket, "'['")?;
        let var = if *self.peek() == Tok::Colon {
            None
        } else {
            Some(self.var()?)
        };
        self.expect(Tok::Colon, "':'")?;
        let (label, lpos) = self.name("edge label")?;
        self.expect(Tok::RBracket, "']'")?;
        self.expect(Tok::Dash, "'-'")?;
        if !backward {
            self.expect(Tok::Gt, "'>'")?;
        } else if *self.peek() == Tok::Gt {
            return Err(QueryError::Syntax {
                pos: self.pos(),
                message: "undirected or bidirectional edges are not supported".into(),
            });
        }
        Ok(Rel {
            var,
            label,
            label_pos: lpos,
            forward: !backward,
        })
    }

    fn path(&mut self) -> Result<(), QueryError> {
        let mut left = self.node()?;
        while matches!(self.peek(), Tok::Dash | Tok::Lt) {
            let Rel {
                var,
                label,
                label_pos: lpos,
                forward,
            } = self.rel()?;
            let right = self.node()?;
            let var = match var {
                Some((v, pos)) => {
                    if self.node_pos.contains_key(&v) || self.edge_vars.insert(v.clone(), pos).is_some() {
                        return Err(QueryError::DuplicateVariable { pos, var: v });
                    }
                    Some(v)
                }
                None => None,
            };
            let (src, dst) = if forward {
                (left, right.clone())
            } else {
                (right.clone(), left)
            };
            self.edges.push(EdgePattern { var, label, src, dst });
            self.map.edge_labels.push(lpos);
            left = right;
        }
        Ok(())
    }

    fn prop_ref(&mut self) -> Result<(PropRef, Pos), QueryError> {
        let (var, pos) = self.var()?;
        self.expect(Tok::Dot, "'.'")?;
        let (prop, _) = self.name("property name")?;
        self.check_declared(&var, pos)?;
        Ok((PropRef { var, prop }, pos))
    }

    fn check_declared(&self, var: &str, pos: Pos) -> Result<(), QueryError> {
        if self.node_pos.contains_key(var) || self.edge_vars.contains_key(var) {
            Ok(())
        } else {
            Err(QueryError::UndeclaredVariable {
                pos,
                var: var.to_owned(),
            })
        }
    }

    fn literal(&mut self) -> Result<Literal, QueryError> {
        let negative = *self.peek() == Tok::Dash;
        if negative {
            self.next();
        }
        let pos = self.pos();
        let lit = match self.peek().clone() {
            Tok::Int(v) => {
                self.next();
                if negative {
                    if v > i64::MAX as u64 + 1 {
                        return Err(QueryError::Syntax {
                            pos,
                            message: "integer out of range".into(),
                        });
                    }
                    Literal::Int((v as i64).wrapping_neg())
                } else {
                    Literal::Int(i64::try_from(v).map_err(|_| QueryError::Syntax {
                        pos,
                        message: "integer out of range".into(),
                    })?)
                }
            }
            Tok::Float(v) => {
                self.next();
                Literal::Float(if negative { -v } else { v })
            }
            Tok::Str(s) if !negative => {
                self.next();
                Literal::Str(s)
            }
            Tok::Ident(s) if !negative && s.eq_ignore_ascii_case("TRUE") => {
                self.next();
                Literal::Bool(true)
            }
            Tok::Ident(s) if !negative && s.eq_ignore_ascii_case("FALSE") => {
                self.next();
                Literal::Bool(false)
            }
            _ => return Err(self.unexpected(if negative { "number" } else { "literal or property" })),
        };
        Ok(lit)
    }

    fn predicate(&mut self) -> Result<Predicate, QueryError> {
        let (lhs, lpos) = self.prop_ref()?;
        let op = match self.peek() {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Ge => CmpOp::Ge,
            Tok::Gt => CmpOp::Gt,
            Tok::Ident(s) if s.eq_ignore_ascii_case("CONTAINS") => CmpOp::Contains,
            Tok::Ident(s) if s.eq_ignore_ascii_case("STARTS") => {
                self.next();
                if !self.at_keyword("WITH") {
                    return Err(self.unexpected("WITH"));
                }
                CmpOp::StartsWith
            }
            _ => return Err(self.unexpected("comparison operator")),
        };
        self.next();
        let is_prop =
            matches!(self.peek(), Tok::Ident(s) if !is_keyword(s)) || matches!(self.peek(), Tok::QuotedIdent(_));
        let (rhs, rpos) = if is_prop {
            let (p, pos) = self.prop_ref()?;
            (Operand::Prop(p), Some(pos))
        } else {
            (Operand::Lit(self.literal()?), None)
        };
        self.map.predicates.push((lpos, rpos));
        Ok(Predicate { lhs, op, rhs })
    }

    fn ret(&mut self) -> Result<Return, QueryError> {
        if *self.peek() == Tok::Star {
            self.next();
            return Ok(Return::Star);
        }
        for (kw, func) in [
            ("COUNT", None),
            ("SUM", Some(AggFunc::Sum)),
            ("MIN", Some(AggFunc::Min)),
        ] {
            if self.at_keyword(kw) {
                self.next();
                self.expect(Tok::LParen, "'('")?;
                let out = match func {
                    None => {
                        self.expect(Tok::Star, "'*'")?;
                        Return::CountStar
                    }
                    Some(f) => {
                        let (p, pos) = self.prop_ref()?;
                        self.map.ret.push(pos);
                        Return::Agg(f, p)
                    }
                };
                self.expect(Tok::RParen, "')'")?;
                return Ok(out);
            }
        }
        let mut items = Vec::new();
        loop {
            let (var, pos) = self.var()?;
            self.check_declared(&var, pos)?;
            let item = if *self.peek() == Tok::Dot {
                self.next();
                let (prop, _) = self.name("property name")?;
                ReturnItem::Prop(PropRef { var, prop })
            } else {
                ReturnItem::Var(var)
            };
            items.push(item);
            self.map.ret.push(pos);
            if *self.peek() != Tok::Comma {
                break;
            }
            self.next();
        }
        Ok(Return::Items(items))
    }

    fn query(&mut self) -> Result<Query, QueryError> {
        self.keyword("MATCH")?;
        loop {
            self.path()?;
            if *self.peek() != Tok::Comma {
                break;
            }
            self.next();
        }
        let mut predicates = Vec::new();
        if self.at_keyword("WHERE") {
            self.next();
            loop {
                predicates.push(self.predicate()?);
                if !self.at_keyword("AND") {
                    break;
                }
                self.next();
            }
        }
        self.keyword("RETURN")?;
        let ret = self.ret()?;
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected("end of input"));
        }
        Ok(Query {
            nodes: std::mem::take(&mut self.nodes),
            edges: std::mem::take(&mut self.edges),
            predicates,
            ret,
        })
    }
}

struct Rel {
    var: Option<(String, Pos)>,
    label: String,
    label_pos: Pos,
    forward: bool,
}

/// Rejects patterns that are not a single tree.
fn check_tree(q: &Query, map: &SourceMap) -> Result<(), QueryError> {
    let index: HashMap<&str, usize> = q.nodes.iter().enumerate().map(|(i, n)| (n.var.as_str(), i)).collect();
    let mut parent: Vec<usize> = (0..q.nodes.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, e) in q.edges.iter().enumerate() {
        let (a, b) = (
            find(&mut parent, index[e.src.as_str()]),
            find(&mut parent, index[e.dst.as_str()]),
        );
        if a == b {
            return Err(QueryError::CyclicPattern {
                pos: map.edge_labels[i],
            });
        }
        parent[a] = b;
    }
    if q.nodes.len() != q.edges.len() + 1 {
        return Err(QueryError::DisconnectedPattern);
    }
    Ok(())
}

/// Parses query text, also returning token positions for later diagnostics.
pub fn parse_with_positions(text: &str) -> Result<(Query, SourceMap), QueryError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        at: 0,
        nodes: Vec::new(),
        node_pos: HashMap::new(),
        edges: Vec::new(),
        edge_vars: HashMap::new(),
        map: SourceMap::default(),
    };
    let q = p.query()?;
    check_tree(&q, &p.map)?;
    Ok((q, p.map))
}

pub fn parse(text: &str) -> Result<Query, QueryError> {
    parse_with_positions(text).map(|(q, _)| q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filtered_single_edge_query() {
        let q = parse("MATCH (a:P)-[e:F]->(b:P) WHERE a.age > 50 RETURN *").unwrap();
        assert_eq!(q.nodes.len(), 2);
        assert_eq!(q.edges.len(), 1);
        assert_eq!(q.predicates.len(), 1);
        assert_eq!(q.ret, Return::Star);
    }

    #[test]
    fn count_star_single_node() {
        let q = parse("match (a:P) return count(*)").unwrap();
        assert_eq!(q.nodes.len(), 1);
        assert_eq!(q.ret, Return::CountStar);
    }

    #[test]
    fn backward_edges_normalise() {
        let a = parse("MATCH (b:ORG)<-[e:WORKAT]-(a:PERSON) RETURN *").unwrap();
        assert_eq!(a.edges[0].src, "a");
        assert_eq!(a.edges[0].dst, "b");
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            parse("MATCH (a:P) WHERE c.x = 1 RETURN *"),
            Err(QueryError::UndeclaredVariable {
                pos: Pos { line: 1, col: 19 },
                ..
            })
        ));
        assert!(matches!(
            parse("MATCH (a:P)-[:F]->(b:P)-[:F]->(a) RETURN *"),
            Err(QueryError::CyclicPattern { .. })
        ));
        assert!(matches!(
            parse("MATCH (a:P)-[:F]->(a) RETURN *"),
            Err(QueryError::CyclicPattern { .. })
        ));
        assert!(matches!(
            parse("MATCH (a:P), (b:P) RETURN *"),
            Err(QueryError::DisconnectedPattern)
        ));
        assert!(matches!(
            parse("MATCH (a) RETURN *"),
            Err(QueryError::MissingLabel { .. })
        ));
        assert!(matches!(
            parse("MATCH (a:P), (a:Q) RETURN *"),
            Err(QueryError::LabelConflict { .. })
        ));
        assert!(matches!(
            parse("MATCH (a:P)-[a:F]->(b:P) RETURN *"),
            Err(QueryError::DuplicateVariable { .. })
        ));
    }

    #[test]
    fn syntax_errors_point_at_token() {
        match parse("MATCH (a:P)\nRETURN a.") {
            Err(QueryError::Syntax { pos, .. }) => assert_eq!(pos, Pos { line: 2, col: 10 }),
            other => panic!("{other:?}"),
        }
        assert!(parse("MATCH (a:P)-[:F]-(b:P) RETURN *").is_err());
        assert!(parse("MATCH (a:P)<-[:F]->(b:P) RETURN *").is_err());
        assert!(parse("MATCH (match:P) RETURN *").is_err());
    }

    #[test]
    fn pretty_print_round_trip() {
        for text in [
            "MATCH (a:PERSON)-[e:WORKAT]->(b:ORG) WHERE a.age > 22 AND b.estd < 2015 RETURN *",
            "MATCH (c:Q), (a:P)<-[:F]-(c) WHERE a.name STARTS WITH 'x\\'y' AND c.v <> -3.5 RETURN a, c.v",
            "MATCH (a:P)-[e:F]->(b:P) WHERE e.w >= -9223372036854775808 RETURN SUM(e.w)",
            "MATCH (`a b`:`MATCH`) WHERE `a b`.`x` CONTAINS 'q' RETURN MIN(`a b`.x)",
        ] {
            let q = parse(text).unwrap();
            let printed = q.to_string();
            assert_eq!(parse(&printed).unwrap(), q, "{printed}");
        }
    }
}
