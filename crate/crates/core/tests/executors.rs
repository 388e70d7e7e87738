mod common;

use colgraph::exec::{bindings, run_query, ExecOptions, Executor, QueryResult};
use colgraph::ids::VertexId;
use colgraph::query::prepare;
use colgraph::storage::{EdgePropLayout, StorageConfig};
use colgraph::value::Value;

const BOTH: [Executor; 2] = [Executor::Lbp, Executor::Volcano];

fn configs() -> Vec<StorageConfig> {
    let mut out = Vec::new();
    for layout in [EdgePropLayout::PropPages, EdgePropLayout::EdgeCols] {
        for dir in colgraph::catalog::Direction::BOTH {
            for k in [1, 2, 128] {
                out.push(StorageConfig {
                    edge_prop_layout: layout,
                    pages_direction: dir,
                    k,
                    ..StorageConfig::default()
                });
            }
        }
    }
    out
}

fn rows(r: QueryResult) -> Vec<Vec<Value>> {
    match r.sorted() {
        QueryResult::Rows { rows, .. } => rows,
        other => panic!("expected rows, got {other:?}"),
    }
}

fn person(o: u64) -> Value {
    Value::Vertex(VertexId::new(colgraph::catalog::VertexLabelId(0), o))
}

fn org(o: u64) -> Value {
    Value::Vertex(VertexId::new(colgraph::catalog::VertexLabelId(1), o))
}

#[test]
fn work_at_join_on_fixture() {
    let store = common::social(StorageConfig::default());
    let q = "MATCH (a:PERSON)-[e:WORKAT]->(b:ORG) WHERE a.age > 22 AND b.estd < 2015 RETURN *";
    for ex in BOTH {
        for hint in [Some("a"), Some("b"), None] {
            let r = run_query(&store, q, ex, hint, &ExecOptions::default()).unwrap();
            assert_eq!(
                rows(r),
                vec![
                    vec![person(0), org(2)],
                    vec![person(2), org(0)],
                    vec![person(5), org(2)]
                ],
                "{ex} hint {hint:?}"
            );
        }
    }
}

#[test]
fn counts_and_aggregates_on_fixture() {
    let cases: &[(&str, QueryResult)] = &[
        ("MATCH (a:PERSON) RETURN COUNT(*)", QueryResult::Count(6)),
        (
            "MATCH (a:PERSON)-[:FOLLOWS]->(b:PERSON) RETURN COUNT(*)",
            QueryResult::Count(10),
        ),
        // two-hop paths: sum over edges (a,b) of out-degree(b)
        (
            "MATCH (a:PERSON)-[:FOLLOWS]->(b:PERSON)-[:FOLLOWS]->(c:PERSON) RETURN COUNT(*)",
            QueryResult::Count(19),
        ),
        (
            "MATCH (a:PERSON)-[e:FOLLOWS]->(b:PERSON) WHERE e.since >= 2015 RETURN COUNT(*)",
            QueryResult::Count(6),
        ),
        (
            "MATCH (a:PERSON)<-[e:FOLLOWS]-(b:PERSON) WHERE e.since < 2014 RETURN MIN(e.since)",
            QueryResult::Scalar {
                column: "MIN(e.since)".into(),
                value: Value::Int64(2011),
            },
        ),
        (
            "MATCH (a:PERSON)-[w:WORKAT]->(o:ORG) RETURN SUM(w.since)",
            QueryResult::Scalar {
                column: "SUM(w.since)".into(),
                value: Value::Int64(2010 + 2001 + 2017 + 1995),
            },
        ),
        (
            "MATCH (a:PERSON)-[s:STUDYAT]->(o:ORG) WHERE o.name = 'UW' RETURN SUM(a.age)",
            QueryResult::Scalar {
                column: "SUM(a.age)".into(),
                value: Value::Int64(21 + 33),
            },
        ),
        (
            "MATCH (a:PERSON) WHERE a.gender = 'X' RETURN MIN(a.age)",
            QueryResult::Scalar {
                column: "MIN(a.age)".into(),
                value: Value::Null,
            },
        ),
    ];
    for config in configs() {
        let store = common::social(config);
        for (q, want) in cases {
            for ex in BOTH {
                for hint in [None, Some("a")] {
                    let got = run_query(&store, q, ex, hint, &ExecOptions { morsel: 4 }).unwrap();
                    assert_eq!(&got, want, "{q} under {ex} hint {hint:?} {config:?}");
                }
            }
        }
    }
}

#[test]
fn two_hop_follows_on_fixture() {
    // a older than 50 -> b -> c -> studies at UW
    let q = "MATCH (a:PERSON)-[:FOLLOWS]->(b:PERSON)-[:FOLLOWS]->(c:PERSON)-[:STUDYAT]->(d:ORG) \
             WHERE a.age > 50 AND d.name = 'UW' RETURN a.name, b.name, c.name";
    let want = vec![
        vec![
            Value::String("Carol".into()),
            Value::String("Alice".into()),
            Value::String("Bob".into()),
        ],
        vec![
            Value::String("Frank".into()),
            Value::String("Alice".into()),
            Value::String("Bob".into()),
        ],
        vec![
            Value::String("Frank".into()),
            Value::String("Carol".into()),
            Value::String("Dan".into()),
        ],
    ];
    for ex in BOTH {
        for hint in [Some("a"), Some("c"), Some("d"), None] {
            let r = run_query(
                &common::social(StorageConfig::default()),
                q,
                ex,
                hint,
                &ExecOptions::default(),
            );
            let got = rows(r.unwrap());
            assert_eq!(got, want, "{ex} hint {hint:?}");
        }
    }
}

#[test]
fn flat_bindings_agree_including_edges() {
    let queries = [
        "MATCH (a:PERSON)-[e:FOLLOWS]->(b:PERSON)<-[f:FOLLOWS]-(c:PERSON) WHERE e.since < f.since RETURN *",
        "MATCH (b:PERSON)<-[e:FOLLOWS]-(a:PERSON)-[f:FOLLOWS]->(c:PERSON), (c)-[w:WORKAT]->(o:ORG) \
         WHERE b.age < c.age AND w.since > 2000 RETURN *",
        "MATCH (a:PERSON)-[s:STUDYAT]->(o:ORG)<-[w:WORKAT]-(b:PERSON) WHERE s.year > w.since RETURN *",
    ];
    for config in configs() {
        let store = common::social(config);
        for q in queries {
            for hint in ["a", "b", "c"] {
                let Ok(plan) = prepare(q, store.catalog(), Some(hint)) else {
                    continue;
                };
                let mut l = bindings(&store, &plan, Executor::Lbp, &ExecOptions { morsel: 3 }).unwrap();
                let mut v = bindings(&store, &plan, Executor::Volcano, &ExecOptions::default()).unwrap();
                l.sort();
                v.sort();
                assert_eq!(l, v, "{q} hint {hint}\n{plan}");
                assert!(!l.is_empty() || q.contains("s.year"), "{q} hint {hint}");
            }
        }
    }
}

#[test]
fn dense_integer_filters_match_volcano() {
    let g = colgraph::gen::generate(&colgraph::gen::GenSpec {
        vertices: 300,
        edges: 3000,
        dist: colgraph::gen::DegreeDist::Zipf(1.2),
        vertex_props: vec!["x:INT64".parse().unwrap()],
        ..Default::default()
    })
    .unwrap();
    let store = colgraph::storage::build_storage(&g.catalog, &g.data, StorageConfig::default()).unwrap();
    for op in ["<", "<=", "=", "<>", ">=", ">"] {
        for q in [
            format!("MATCH (a:V)-[:E]->(b:V) WHERE b.x {op} 500 RETURN COUNT(*)"),
            format!("MATCH (a:V)-[:E]->(b:V)<-[:E]-(c:V) WHERE c.x {op} 250 RETURN a, b, c"),
            format!("MATCH (a:V) WHERE a.x {op} 700 RETURN a"),
        ] {
            let [l, v] = BOTH.map(|ex| {
                run_query(&store, &q, ex, None, &ExecOptions::default())
                    .unwrap()
                    .sorted()
            });
            assert_eq!(l, v, "{q}");
        }
    }
}
