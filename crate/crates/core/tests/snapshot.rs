mod common;

use colgraph::catalog::Direction;
use colgraph::compression::NullCompression;
use colgraph::exec::{run_query, ExecOptions, Executor};
use colgraph::gen::{random_graph, random_query};
use colgraph::storage::{build_storage, EdgePropLayout, GraphStore, SnapshotError, StorageConfig, SNAPSHOT_MAGIC};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn configs() -> Vec<StorageConfig> {
    let mut out = Vec::new();
    for layout in [EdgePropLayout::PropPages, EdgePropLayout::EdgeCols] {
        for dir in Direction::BOTH {
            for null_compression in [
                NullCompression::Off,
                NullCompression::Vanilla,
                NullCompression::default(),
            ] {
                out.push(StorageConfig {
                    edge_prop_layout: layout,
                    pages_direction: dir,
                    k: 2,
                    null_compression,
                    seed: 5,
                });
            }
        }
    }
    out
}

#[test]
fn fixture_round_trips_exactly() {
    for config in configs() {
        let store = common::social(config);
        let bytes = store.to_snapshot();
        assert_eq!(&bytes[..8], &SNAPSHOT_MAGIC);
        let back = GraphStore::from_snapshot(&bytes).unwrap();
        assert_eq!(back, store);
        assert_eq!(back.to_snapshot(), bytes, "save after load is byte-identical");
    }
}

#[test]
fn random_graphs_answer_queries_identically_after_reload() {
    for seed in 0..30u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(seed, 200, 2000).unwrap();
        let config = configs()[rng.random_range(0..configs().len())];
        let store = build_storage(&g.catalog, &g.data, config).unwrap();
        let back = GraphStore::from_snapshot(&store.to_snapshot()).unwrap();
        assert_eq!(back, store);
        for _ in 0..5 {
            let Some(q) = random_query(&g.catalog, &mut rng, 3) else {
                continue;
            };
            let opts = ExecOptions::default();
            let a = run_query(&store, &q, Executor::Lbp, None, &opts).map(|r| r.sorted());
            let b = run_query(&back, &q, Executor::Lbp, None, &opts).map(|r| r.sorted());
            assert_eq!(a, b, "{q}");
        }
    }
}

#[test]
fn save_and_load_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.snap");
    let store = common::social(StorageConfig::default());
    store.save(&path).unwrap();
    assert_eq!(GraphStore::load(&path).unwrap(), store);
}

#[test]
fn rejects_bad_headers() {
    let bytes = common::social(StorageConfig::default()).to_snapshot();
    assert!(matches!(
        GraphStore::from_snapshot(b"nope"),
        Err(SnapshotError::BadMagic)
    ));
    let mut v = bytes.clone();
    v[8] = 9;
    assert!(matches!(
        GraphStore::from_snapshot(&v),
        Err(SnapshotError::UnsupportedVersion(9))
    ));
    let mut v = bytes.clone();
    v.push(0);
    assert!(GraphStore::from_snapshot(&v).is_err());
}

#[test]
fn truncations_and_bit_flips_never_panic() {
    let bytes = common::social(StorageConfig {
        k: 2,
        ..StorageConfig::default()
    })
    .to_snapshot();
    for cut in 0..bytes.len() {
        assert!(
            GraphStore::from_snapshot(&bytes[..cut]).is_err(),
            "prefix of {cut} bytes accepted"
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..3000 {
        let mut v = bytes.clone();
        for _ in 0..rng.random_range(1..4) {
            let i = rng.random_range(0..v.len());
            v[i] ^= 1 << rng.random_range(0..8);
        }
        if let Ok(store) = GraphStore::from_snapshot(&v) {
            // a flip that survives validation must still yield a usable store
            for q in [
                "MATCH (a:PERSON)-[e:FOLLOWS]->(b:PERSON) RETURN COUNT(*)",
                "MATCH (a:PERSON)<-[e:FOLLOWS]-(b:PERSON) WHERE e.since > 2000 RETURN a, b, e.since",
                "MATCH (a:PERSON)-[:WORKAT]->(b:ORG) RETURN a.name, a.gender, b.name",
            ] {
                for ex in [Executor::Lbp, Executor::Volcano] {
                    let _ = run_query(&store, q, ex, None, &ExecOptions::default());
                }
            }
        }
    }
}
