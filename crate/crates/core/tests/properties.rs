//! Property tests for the storage, compression, query and generator
//! invariants.

use colgraph::catalog::{Cardinality, Direction, EdgeLabelDef, Layout};
use colgraph::compression::{
    BitVec, Dictionary, JacobsonIndex, JacobsonNullColumn, JacobsonParams, NullCompression, NullMap, PackedUints,
};
use colgraph::exec::{bindings, ExecOptions, Executor};
use colgraph::gen::{generate, random_graph, random_query, DegreeDist, GenSpec, Generated, PropSpec};
use colgraph::ids::{AdjEntryCodec, VertexId};
use colgraph::query::{parse, prepare, PlanOp};
use colgraph::storage::{build_storage, DirStorage, EdgePropLayout, EdgeProps, GraphStore, StorageConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params() -> impl Strategy<Value = JacobsonParams> {
    (prop_oneof![Just(8u32), Just(16)], prop_oneof![Just(8u32), Just(16)])
        .prop_map(|(c, m)| JacobsonParams::new(c, m).unwrap())
}

fn null_mode() -> impl Strategy<Value = NullCompression> {
    prop_oneof![
        Just(NullCompression::Off),
        Just(NullCompression::Vanilla),
        params().prop_map(NullCompression::Jacobson),
    ]
}

fn config() -> impl Strategy<Value = StorageConfig> {
    (
        any::<bool>(),
        any::<bool>(),
        prop_oneof![Just(1u64), Just(2), Just(5), Just(128)],
        null_mode(),
        any::<u64>(),
    )
        .prop_map(|(cols, bwd, k, null_compression, seed)| StorageConfig {
            edge_prop_layout: if cols {
                EdgePropLayout::EdgeCols
            } else {
                EdgePropLayout::PropPages
            },
            pages_direction: if bwd { Direction::Bwd } else { Direction::Fwd },
            k,
            null_compression,
            seed,
        })
}

fn anchors(def: &EdgeLabelDef, dir: Direction) -> &[colgraph::catalog::VertexLabelId] {
    match dir {
        Direction::Fwd => &def.src_labels,
        Direction::Bwd => &def.dst_labels,
    }
}

/// Every stored (src, dst) pair of `def` as seen from `dir`, sorted.
fn stored_pairs(store: &GraphStore, def: &EdgeLabelDef, dir: Direction) -> Vec<(VertexId, VertexId)> {
    let mut out = Vec::new();
    for &label in anchors(def, dir) {
        for offset in 0..store.vertex_count(label) {
            let v = VertexId::new(label, offset);
            let nbrs: Vec<VertexId> = match store.layout(def.id, dir) {
                Layout::CsrLayout => store.adj_list(v, def.id, dir).unwrap().iter().collect(),
                Layout::VertexColumnLayout => store.single_nbr(v, def.id, dir).unwrap().into_iter().collect(),
            };
            for n in nbrs {
                out.push(match dir {
                    Direction::Fwd => (v, n),
                    Direction::Bwd => (n, v),
                });
            }
        }
    }
    out.sort();
    out
}

fn small_graph(seed: u64) -> Generated {
    random_graph(seed, 120, 800).unwrap()
}

fn ident() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => "[a-z][a-z0-9_]{0,4}".prop_filter("keyword", |s| !is_reserved(s)),
        1 => "[A-Za-z ]{1,6}".prop_map(|s| format!("`{s}`")),
    ]
}

fn is_reserved(s: &str) -> bool {
    [
        "match", "where", "return", "and", "count", "sum", "min", "contains", "starts", "with", "true", "false",
    ]
    .contains(&s.to_ascii_lowercase().as_str())
}

fn literal() -> impl Strategy<Value = String> {
    prop_oneof![
        any::<i64>().prop_map(|v| v.to_string()),
        (0.0f64..1e12).prop_map(|v| format!("{v:?}")),
        (0.0f64..1e6).prop_map(|v| format!("-{v:?}")),
        "[a-z' \\\\]{0,6}".prop_map(|s| format!("'{}'", s.replace('\\', "\\\\").replace('\'', "\\'"))),
        Just("TRUE".to_owned()),
        Just("false".to_owned()),
    ]
}

prop_compose! {
    /// A tree-shaped query: a path, optionally followed by a branch off one
    /// of its nodes.
    fn query_text()(
        labels in prop::collection::vec("[A-Z]{1,3}", 2..6),
        dirs in prop::collection::vec((any::<bool>(), any::<bool>(), "[A-Z]{1,3}"), 0..4),
        branch in prop::option::of((any::<prop::sample::Index>(), any::<bool>(), "[A-Z]{1,3}")),
        names in prop::collection::vec(ident(), 12),
        preds in prop::collection::vec((any::<prop::sample::Index>(), "[a-z]{1,3}", 0usize..8, prop::option::of((any::<prop::sample::Index>(), "[a-z]{1,3}")), literal()), 0..3),
        ret in 0usize..5,
        kw_case in any::<bool>(),
    ) -> String {
        let mut names = names;
        names.sort();
        names.dedup();
        let var = |i: usize| format!("v{i}_{}", names[i % names.len()].trim_matches('`').replace(' ', "_"));
        let mut text = String::from(if kw_case { "MATCH " } else { "match " });
        let mut vars = vec![var(0)];
        text += &format!("({}:{})", vars[0], labels[0]);
        let mut edges = 0;
        for (i, (fwd, named, label)) in dirs.iter().enumerate() {
            let v = var(i + 1);
            let e = if *named { edges += 1; format!("e{edges}") } else { String::new() };
            let node = format!("({v}:{})", labels[(i + 1) % labels.len()]);
            text += &if *fwd { format!("-[{e}:{label}]->{node}") } else { format!("<-[{e}:{label}]-{node}") };
            vars.push(v);
        }
        if let Some((at, fwd, label)) = branch {
            let from = at.get(&vars).clone();
            let v = var(vars.len());
            text += &format!(", ({from})");
            text += &if fwd { format!("-[:{label}]->({v}:Q)") } else { format!("<-[:{label}]-({v}:Q)") };
            vars.push(v);
        }
        let ops = ["<", "<=", "=", "<>", ">=", ">", "CONTAINS", "STARTS WITH"];
        for (i, (at, prop, op, rhs, lit)) in preds.iter().enumerate() {
            text += if i == 0 { " WHERE " } else { " AND " };
            text += &format!("{}.{prop} {} ", at.get(&vars), ops[*op]);
            text += &match rhs {
                Some((r, p)) => format!("{}.{p}", r.get(&vars)),
                None => lit.clone(),
            };
        }
        text += if kw_case { " RETURN " } else { " return " };
        text += &match ret {
            0 => "*".to_owned(),
            1 => "count(*)".to_owned(),
            2 => format!("SUM({}.p)", vars[0]),
            3 => format!("MIN({}.p)", vars[vars.len() - 1]),
            _ => format!("{}, {}.p", vars[0], vars[vars.len() - 1]),
        };
        text
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobson_rank_and_get_match_oracle(values in prop::collection::vec(prop::option::of(any::<u16>()), 0..3000), p in params()) {
        let bits = BitVec::from_bools(values.iter().map(Option::is_some));
        let index = JacobsonIndex::build(bits.clone(), p);
        let mut ones = 0;
        for (i, v) in values.iter().enumerate() {
            prop_assert_eq!(index.rank(i), ones);
            prop_assert_eq!(index.rank(i), bits.rank_linear(i));
            ones += v.is_some() as usize;
        }
        let n = values.len() as u64;
        prop_assert_eq!(index.aux_bits(), n + n.div_ceil(p.c() as u64) * p.m() as u64);
        let col = JacobsonNullColumn::build(&values, p);
        for (i, v) in values.iter().enumerate() {
            prop_assert_eq!(col.get(i).unwrap(), v.as_ref());
        }
        prop_assert_eq!(col.values().len(), ones);
    }

    #[test]
    fn null_map_modes_agree(presence in prop::collection::vec(any::<bool>(), 0..2000), mode in null_mode()) {
        let bits = BitVec::from_bools(presence.iter().copied());
        let reference = NullMap::build(bits.clone(), NullCompression::Vanilla);
        let map = NullMap::build(bits, mode);
        prop_assert_eq!(map.len(), presence.len());
        for (i, &present) in presence.iter().enumerate() {
            prop_assert_eq!(map.is_null(i), !present);
            if map.stores_dense_values() {
                prop_assert_eq!(map.slot(i), reference.slot(i));
            } else {
                prop_assert_eq!(map.slot(i), present.then_some(i));
            }
        }
    }

    #[test]
    fn dictionary_is_a_bijection(values in prop::collection::vec("[a-z]{0,4}", 1..600)) {
        let dict = Dictionary::build(values.iter().map(String::as_str)).unwrap();
        prop_assert!((1..=4).contains(&dict.code_width()));
        let mut codes: Vec<u32> = dict.domain().iter().map(|v| dict.encode(v).unwrap()).collect();
        codes.sort();
        prop_assert_eq!(codes, (0..dict.len() as u32).collect::<Vec<_>>());
        for v in &values {
            prop_assert_eq!(dict.decode(dict.encode(v).unwrap()).unwrap(), v.as_str());
        }
    }

    #[test]
    fn packed_uints_round_trip(values in prop::collection::vec(any::<u64>().prop_map(|v| v >> (v % 64)), 0..500)) {
        let packed = PackedUints::from_values(&values);
        prop_assert_eq!(packed.len(), values.len());
        prop_assert_eq!(packed.payload().len(), values.len() * packed.width() as usize);
        prop_assert_eq!(packed.iter().collect::<Vec<_>>(), values);
    }

    #[test]
    fn printed_queries_reparse_identically(text in query_text()) {
        let q = parse(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        let printed = q.to_string();
        let again = parse(&printed).map_err(|e| TestCaseError::fail(format!("{printed}: {e}")))?;
        prop_assert_eq!(&again, &q);
        prop_assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn arbitrary_text_never_panics_the_parser(text in "[ -~\n]{0,80}") {
        if let Ok(q) = parse(&text) {
            prop_assert_eq!(parse(&q.to_string()).unwrap(), q);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn storage_decisions_are_pure_and_entry_widths_add_up(seed in any::<u64>()) {
        let g = small_graph(seed);
        for def in g.catalog.edge_labels() {
            for dir in [Direction::Fwd, Direction::Bwd] {
                let d = g.catalog.storage_decision(def.id, dir).unwrap();
                prop_assert_eq!(d, g.catalog.storage_decision(def.id, dir).unwrap());
                let single = matches!(
                    (def.cardinality, dir),
                    (Cardinality::OneOne, _) | (Cardinality::NOne, Direction::Fwd) | (Cardinality::OneN, Direction::Bwd)
                );
                prop_assert_eq!(d.layout == Layout::VertexColumnLayout, single);
                prop_assert_eq!(d.store_nbr_label, def.nbr_labels(dir).len() > 1);
                if def.properties.is_empty() || single {
                    prop_assert!(!d.store_page_offset);
                }
                let codec = AdjEntryCodec::new(d, def.nbr_labels(dir).to_vec());
                let expect = d.store_nbr_label as usize
                    + d.nbr_offset_bytes as usize
                    + if d.store_page_offset { d.page_offset_bytes as usize } else { 0 };
                prop_assert_eq!(codec.entry_width(), expect);
            }
        }
    }

    #[test]
    fn built_storage_is_well_formed(seed in any::<u64>(), cfg in config()) {
        let g = small_graph(seed);
        let store = build_storage(&g.catalog, &g.data, cfg).unwrap();
        for def in g.catalog.edge_labels() {
            let table = &g.data.edges[def.id.index()];
            let mut expect: Vec<_> = table.src.iter().copied().zip(table.dst.iter().copied()).collect();
            expect.sort();
            for dir in [Direction::Fwd, Direction::Bwd] {
                prop_assert_eq!(&stored_pairs(&store, def, dir), &expect, "{} {:?}", def.name, dir);
                if let DirStorage::Csr { codec, csrs } = store.edge_storage(def.id).dir(dir) {
                    let mut entries = 0;
                    for csr in csrs.iter().flatten() {
                        let offsets = csr.offsets();
                        // compressed offsets report empty lists as (0, 0)
                        let (mut prev, mut len) = (0, 0);
                        for v in 0..csr.num_vertices() {
                            let (lo, hi) = offsets.range(v);
                            prop_assert!(lo <= hi);
                            if lo < hi {
                                prop_assert_eq!(lo, prev);
                                prev = hi;
                            }
                            len += hi - lo;
                        }
                        prop_assert_eq!(prev, offsets.total());
                        prop_assert_eq!(len, offsets.total());
                        prop_assert_eq!(csr.entries().len() as u64, offsets.total() * codec.entry_width() as u64);
                        entries += offsets.total();
                    }
                    prop_assert_eq!(entries, table.len() as u64);
                }
            }
            if !def.properties.is_empty() {
                let stored = match store.edge_storage(def.id).props() {
                    EdgeProps::Pages { pages, .. } => pages.iter().flatten().map(|p| p.num_values()).sum::<u64>(),
                    EdgeProps::EdgeCols(cols) => cols.num_edges(),
                    EdgeProps::VertexColumns { .. } => table.len() as u64,
                    EdgeProps::None => 0,
                };
                prop_assert_eq!(stored, table.len() as u64, "{}", def.name);
            }
        }
        let ledger = store.memory_ledger();
        let rows = ledger.rows();
        let (total, parts) = rows.split_last().unwrap();
        prop_assert_eq!(total.1, parts.iter().map(|r| r.1).sum::<u64>());
        let reloaded = GraphStore::from_snapshot(&store.to_snapshot()).unwrap();
        prop_assert!(reloaded == store);
        prop_assert_eq!(reloaded.memory_ledger(), ledger);
    }

    #[test]
    fn plans_are_deterministic_and_cover_the_pattern(seed in any::<u64>(), qseed in any::<u64>()) {
        let g = small_graph(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(qseed);
        for _ in 0..8 {
            let Some(text) = random_query(&g.catalog, &mut rng, 3) else { continue };
            let plan = prepare(&text, &g.catalog, None).unwrap();
            let again = prepare(&text, &g.catalog, None).unwrap();
            prop_assert_eq!(format!("{plan:?}"), format!("{again:?}"));
            let q = parse(&text).unwrap();
            let mut seen = vec![0; q.edges.len()];
            let mut filters = 0;
            for op in &plan.ops {
                match op {
                    PlanOp::ListExtend(e) | PlanOp::ColumnExtend(e) => {
                        seen[e.edge - q.nodes.len()] += 1;
                        let column = matches!(op, PlanOp::ColumnExtend(_));
                        let layout = g.catalog.storage_decision(e.label, e.dir).unwrap().layout;
                        prop_assert_eq!(column, layout == Layout::VertexColumnLayout, "{}", text);
                    }
                    PlanOp::Filter(_) => filters += 1,
                    PlanOp::Scan { .. } => {}
                }
            }
            prop_assert!(seen.iter().all(|&n| n == 1), "{}: {:?}", text, seen);
            prop_assert_eq!(filters, q.predicates.len());
        }
    }

    #[test]
    fn executors_produce_the_same_bindings(seed in any::<u64>(), qseed in any::<u64>(), cfg in config(), morsel in prop_oneof![Just(1usize), Just(3), Just(1024)]) {
        let g = random_graph(seed, 60, 300).unwrap();
        let store = build_storage(&g.catalog, &g.data, cfg).unwrap();
        let opts = ExecOptions { morsel };
        let mut rng = ChaCha8Rng::seed_from_u64(qseed);
        for _ in 0..4 {
            let Some(text) = random_query(&g.catalog, &mut rng, 3) else { continue };
            let plan = prepare(&text, &g.catalog, None).unwrap();
            let mut lbp = bindings(&store, &plan, Executor::Lbp, &opts).unwrap();
            let mut vol = bindings(&store, &plan, Executor::Volcano, &opts).unwrap();
            lbp.sort();
            vol.sort();
            prop_assert_eq!(lbp, vol, "{}", text);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), n in 1u64..300, m in 0u64..2000, zipf in any::<bool>()) {
        let spec = GenSpec {
            vertices: n,
            edges: m,
            dist: if zipf { DegreeDist::Zipf(1.2) } else { DegreeDist::Uniform },
            seed,
            vertex_props: vec!["x:INT64".parse::<PropSpec>().unwrap(), "s:STRING:0.2".parse().unwrap()],
            edge_props: vec!["w:DOUBLE:0.5".parse::<PropSpec>().unwrap()],
            ..GenSpec::default()
        };
        let (a, b) = (generate(&spec).unwrap(), generate(&spec).unwrap());
        prop_assert!(a.data == b.data);
        let tmp = tempfile::tempdir().unwrap();
        let fa = a.write_dir(&tmp.path().join("a")).unwrap();
        let fb = b.write_dir(&tmp.path().join("b")).unwrap();
        for (x, y) in fa.iter().zip(&fb) {
            prop_assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
        }
    }
}
