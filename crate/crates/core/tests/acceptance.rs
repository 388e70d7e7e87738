//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::hash::{Hash, Hasher};
use std::time::Instant;

use colgraph::bench::{run_suite, BenchOptions, BenchRow, Suite};
use colgraph::catalog::Direction;
use colgraph::compression::{rank_map, BitVec, JacobsonIndex, JacobsonNullColumn, JacobsonParams, NullCompression};
use colgraph::exec::{bindings, execute, for_each_binding, Binding, ExecOptions, Executor, QueryResult};
use colgraph::gen::{generate, random_graph, random_query, DegreeDist, GenSpec};
use colgraph::lbp::{self, LbpStats, Pipeline};
use colgraph::query::{prepare, QueryError, Sink};
use colgraph::storage::{build_storage, GraphStore, StorageConfig};
use colgraph::value::Value;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHasher;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn check_rank(bits: &[bool], params: JacobsonParams) -> Result<(), String> {
    let idx = JacobsonIndex::build(BitVec::from_bools(bits.iter().copied()), params);
    let values: Vec<Option<u32>> = bits.iter().enumerate().map(|(i, &b)| b.then_some(i as u32)).collect();
    let col = JacobsonNullColumn::build(&values, params);
    let mut ones = 0;
    for (p, &b) in bits.iter().enumerate() {
        if idx.rank(p) != ones || col.rank(p) != Ok(ones) {
            return Err(format!(
                "rank({p}) of a length-{} vector: got {}, want {ones}",
                bits.len(),
                idx.rank(p)
            ));
        }
        if col.get(p) != Ok(values[p].as_ref()) {
            return Err(format!("null_get({p}) of a length-{} vector", bits.len()));
        }
        ones += b as usize;
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let params = [JacobsonParams::default(), JacobsonParams::new(8, 8).unwrap()];
    let mut exhaustive = 0u64;
    for len in 0..=20usize {
        for pattern in 0u32..(1 << len) {
            let bits: Vec<bool> = (0..len).map(|i| pattern >> i & 1 == 1).collect();
            for &p in &params {
                check_rank(&bits, p)?;
            }
            exhaustive += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let densities = [0.01, 0.10, 0.50, 0.90, 0.99];
    let mut positions = 0u64;
    for i in 0..10_000 {
        let len = rng.random_range(1..=65_536);
        let d = densities[i % densities.len()];
        let bits: Vec<bool> = (0..len).map(|_| rng.random_bool(d)).collect();
        check_rank(&bits, params[i % 2])?;
        positions += len as u64;
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(
        secs < 60.0,
        format!("{exhaustive} exhaustive vectors and 10000 random columns ({positions} positions) match the oracle in {secs:.1}s"),
    )
}

fn criterion_2() -> Outcome {
    let n = 1 << 20;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let bits = BitVec::from_bools((0..n).map(|_| rng.random_bool(0.5)));
    let idx = JacobsonIndex::build(bits, JacobsonParams::default());
    let per_element = idx.aux_bits() as f64 / n as f64;
    let map = rank_map(16).size_bytes();
    ensure(
        idx.aux_bits() == 2 * n as u64 && map == 1_048_576,
        format!("(c,m)=(16,16): {per_element} aux bits per element, rank map {map} bytes"),
    )
}

fn same(a: &QueryResult, b: &QueryResult) -> bool {
    match (a, b) {
        (
            QueryResult::Scalar {
                value: Value::Double(x),
                ..
            },
            QueryResult::Scalar {
                value: Value::Double(y),
                ..
            },
        ) => (x - y).abs() <= 1e-6 * x.abs().max(y.abs()).max(1.0),
        _ => a == b,
    }
}

/// Flat results up to this size are sorted and compared tuple by tuple.
const EXACT_LIMIT: u64 = 500_000;

/// Order-independent fingerprint of a multiset of flat tuples.
#[derive(Default, PartialEq, Eq, Debug)]
struct Digest {
    count: u64,
    lo: u64,
    hi: u64,
}

impl Digest {
    fn add(&mut self, tuple: &[Binding]) {
        let hash = |salt: u64| {
            let mut h = FxHasher::with_seed(salt as usize);
            tuple.hash(&mut h);
            splitmix(h.finish())
        };
        self.count += 1;
        self.lo = self.lo.wrapping_add(hash(0x51ed_270b));
        self.hi = self.hi.wrapping_add(hash(0x2545_f491));
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Criteria 3 and 8 share the differential corpus.
fn differential_corpus() -> (Outcome, Outcome) {
    let t = Instant::now();
    let mut queries = 0;
    let mut exact = 0;
    let mut largest = 0;
    let mut stats = LbpStats::default();
    let mut failure = None;
    'graphs: for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(seed, 1000, 20_000).map_err(|e| e.to_string()).unwrap();
        let config = StorageConfig {
            edge_prop_layout: if rng.random() {
                colgraph::storage::EdgePropLayout::PropPages
            } else {
                colgraph::storage::EdgePropLayout::EdgeCols
            },
            pages_direction: if rng.random() { Direction::Fwd } else { Direction::Bwd },
            k: [2, 16, 128][rng.random_range(0..3)],
            null_compression: [
                NullCompression::default(),
                NullCompression::Vanilla,
                NullCompression::Off,
            ][rng.random_range(0..3)],
            seed,
        };
        let store = build_storage(&g.catalog, &g.data, config).unwrap();
        let opts = ExecOptions {
            morsel: [64, 1024][rng.random_range(0..2)],
        };
        for _ in 0..10 {
            let Some(q) = random_query(&g.catalog, &mut rng, 3) else {
                continue;
            };
            let plan = prepare(&q, &g.catalog, None).unwrap();
            let mut p = Pipeline::new(&store, &plan, &opts).unwrap();
            let mut lbp_digest = Digest::default();
            let mut chunks_agree = true;
            while p.next_chunk() {
                let before = lbp_digest.count;
                p.for_each_flat(|b| lbp_digest.add(b));
                chunks_agree &= p.count_star() == lbp_digest.count - before;
            }
            let mut vol_digest = Digest::default();
            for_each_binding(&store, &plan, Executor::Volcano, &opts, |b| vol_digest.add(b)).unwrap();
            let flat = lbp_digest.count;
            let small = flat <= EXACT_LIMIT;
            if small {
                exact += 1;
            }
            let agree = if small || !matches!(plan.sink, Sink::Rows(_)) {
                match (
                    lbp::execute(&store, &plan, &opts),
                    execute(&store, &plan, Executor::Volcano, &opts),
                ) {
                    (Ok((a, s)), Ok(b)) => {
                        stats.extends_checked += s.extends_checked;
                        stats.copies_detected += s.copies_detected;
                        same(&a.sorted(), &b.sorted())
                    }
                    (Err(QueryError::Overflow), Err(QueryError::Overflow)) => true,
                    _ => false,
                }
            } else {
                true
            };
            let flat_agree = if small {
                let mut fl = bindings(&store, &plan, Executor::Lbp, &opts).unwrap();
                let mut fv = bindings(&store, &plan, Executor::Volcano, &opts).unwrap();
                fl.sort_unstable();
                fv.sort_unstable();
                fl == fv
            } else {
                lbp_digest == vol_digest
            };
            largest = largest.max(flat);
            if !agree || !flat_agree || !chunks_agree || lbp_digest != vol_digest {
                failure = Some(format!("seed {seed}: {q}"));
                break 'graphs;
            }
            queries += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let c3 = match failure {
        Some(f) => Err(format!("executors disagree on {f}")),
        None => ensure(
            secs < 300.0 && queries >= 500,
            format!(
                "{queries} queries over 100 random graphs agree on results, flat bindings and factorized counts \
                 ({exact} compared tuple by tuple, the rest by count and multiset digest; largest {largest} tuples) in {secs:.1}s"
            ),
        ),
    };
    let c8 = ensure(
        stats.copies_detected == 0 && stats.extends_checked > 0,
        format!(
            "{} list extends checked, {} copies detected",
            stats.extends_checked, stats.copies_detected
        ),
    );
    (c3, c8)
}

fn zipf_store() -> GraphStore {
    let g = generate(&GenSpec {
        vertices: 200_000,
        edges: 2_000_000,
        dist: DegreeDist::Zipf(1.2),
        seed: 42,
        vertex_label: "V".into(),
        edge_label: "E".into(),
        vertex_props: vec!["x:INT64".parse().unwrap()],
        edge_props: vec!["w:INT64".parse().unwrap()],
        ..GenSpec::default()
    })
    .unwrap();
    build_storage(&g.catalog, &g.data, StorageConfig::default()).unwrap()
}

fn find<'a>(rows: &'a [BenchRow], config: &str, query_has: &str) -> &'a BenchRow {
    rows.iter()
        .find(|r| r.config == config && r.query.contains(query_has))
        .unwrap_or_else(|| panic!("no row {config} / {query_has}"))
}

fn criterion_4(store: &GraphStore) -> Outcome {
    let t = Instant::now();
    let opts = BenchOptions {
        hops: vec![2],
        ..BenchOptions::default()
    };
    let count = run_suite(Suite::KhopCount, store, &opts).map_err(|e| e.to_string())?;
    let filter = run_suite(Suite::KhopFilter, store, &opts).map_err(|e| e.to_string())?;
    let speedup = |rows: &[BenchRow]| {
        let (l, v) = (find(rows, "lbp", "MATCH"), find(rows, "volcano", "MATCH"));
        assert_eq!(l.result, v.result, "executors disagree on {}", l.query);
        (
            v.time.avg_ms / l.time.avg_ms,
            l.time.avg_ms,
            v.time.avg_ms,
            l.result.clone(),
        )
    };
    let (cs, cl, cv, cn) = speedup(&count);
    let (fs, fl, fv, fnn) = speedup(&filter);
    let secs = t.elapsed().as_secs_f64();
    ensure(
        cs >= 3.0 && fs >= 2.0 && secs < 600.0,
        format!(
            "2-hop COUNT(*) = {cn}: lbp {cl:.1}ms vs volcano {cv:.1}ms ({cs:.2}x, need 3x); \
             2-hop FILTER = {fnn}: lbp {fl:.1}ms vs volcano {fv:.1}ms ({fs:.2}x, need 2x)"
        ),
    )
}

fn criterion_5(store: &GraphStore) -> Outcome {
    let t = Instant::now();
    let rows = run_suite(
        Suite::PropPagesVsEdgeCols,
        store,
        &BenchOptions {
            hops: vec![1],
            ..BenchOptions::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let ms = |c: &str| find(&rows, c, "MATCH").time.avg_ms;
    let (pf, ef, pb, eb) = (
        ms("prop_pages/fwd"),
        ms("edge_cols/fwd"),
        ms("prop_pages/bwd"),
        ms("edge_cols/bwd"),
    );
    let fwd = ef / pf;
    let bwd = (pb - eb).abs() / pb.min(eb);
    let secs = t.elapsed().as_secs_f64();
    ensure(
        fwd >= 1.3 && bwd <= 0.30 && secs < 600.0,
        format!(
            "forward: pages {pf:.1}ms vs edge columns {ef:.1}ms ({fwd:.2}x, need 1.3x); \
             backward: pages {pb:.1}ms vs edge columns {eb:.1}ms (differ by {:.0}%, limit 30%)",
            bwd * 100.0
        ),
    )
}

fn criterion_6() -> Outcome {
    let g = generate(&GenSpec {
        vertices: 100_000,
        edges: 1_000_000,
        seed: 6,
        ..GenSpec::default()
    })
    .unwrap();
    let store = build_storage(&g.catalog, &g.data, StorageConfig::default()).unwrap();
    let ledger = store.memory_ledger();
    let ours = ledger.adjacency();
    let naive = store.naive_adjacency_bytes();
    let ratio = naive as f64 / ours as f64;
    ensure(
        ratio >= 2.0 && ledger.total == ledger.rows()[..5].iter().map(|r| r.1).sum::<u64>(),
        format!(
            "adjacency {ours} bytes (fwd {} + bwd {}) vs naive {naive} bytes: {ratio:.2}x, need 2.0x",
            ledger.fwd_adj, ledger.bwd_adj
        ),
    )
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let g = generate(&GenSpec {
        vertices: 200_000,
        edges: 1_000_000,
        seed: 7,
        ..GenSpec::default()
    })
    .unwrap();
    let store = build_storage(&g.catalog, &g.data, StorageConfig::default()).unwrap();
    let rows = run_suite(Suite::NullDensity, &store, &BenchOptions::default()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut report = Vec::new();
    let mut crossover = Vec::new();
    for d in (1..=10).map(|d| d * 10) {
        let cfg = |m: &str| format!("{m}/density={d}%");
        let j = find(&rows, &cfg("jacobson(c=16,m=16)"), "MATCH");
        let u = find(&rows, &cfg("uncompressed"), "MATCH");
        let v = find(&rows, &cfg("vanilla"), "MATCH");
        if j.result != u.result || j.result != v.result {
            return Err(format!("null schemes disagree at {d}% density"));
        }
        let r = j.time.avg_ms / u.time.avg_ms;
        worst = worst.max(r);
        if r < 1.0 {
            crossover.push(d);
        }
        report.push(format!("{d}%:{r:.2}x(vanilla {:.1}x)", v.time.avg_ms / j.time.avg_ms));
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(
        worst <= 1.6 && secs < 300.0,
        format!(
            "jacobson/uncompressed time per density {}; worst {worst:.2}x (limit 1.6x); jacobson faster at densities {crossover:?}",
            report.join(" ")
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut failed = 0;
    let mut report = |n: u32, name: &str, outcome: Outcome| match &outcome {
        Ok(msg) => println!("criterion {n} PASS {name}: {msg}"),
        Err(msg) => {
            failed += 1;
            println!("criterion {n} FAIL {name}: {msg}");
        }
    };
    report(1, "jacobson rank and null_get", criterion_1());
    report(2, "null-compression overhead", criterion_2());

    let (c3, c8) = differential_corpus();
    report(3, "executor equivalence", c3);
    let store = zipf_store();
    report(4, "lbp speedup", criterion_4(&store));
    report(5, "property pages vs edge columns", criterion_5(&store));
    drop(store);
    report(6, "memory ledger", criterion_6());
    report(7, "sparse-column overhead", criterion_7());
    report(8, "zero-copy list extends", c8);
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
