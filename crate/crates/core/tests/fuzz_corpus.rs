//! Replays the checked-in fuzz corpus through the fuzz target bodies, so the
//! seeds stay valid on stable toolchains.

use std::path::{Path, PathBuf};

use colgraph::catalog::{Catalog, Layout, SchemaDoc, StorageDecision, VertexLabelId};
use colgraph::ids::AdjEntryCodec;
use colgraph::ingest::{read_edge_csv, read_vertex_csv};
use colgraph::query::{parse, prepare};
use colgraph::storage::GraphStore;

const SCHEMA: &str = include_str!("../../../fixtures/social/schema.json");

fn fixture_catalog() -> Catalog {
    Catalog::define_schema(&SchemaDoc::from_json(SCHEMA).unwrap()).unwrap()
}

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn parse_query(data: &[u8]) -> bool {
    let Ok(text) = std::str::from_utf8(data) else {
        return false;
    };
    let Ok(q) = parse(text) else { return false };
    let printed = q.to_string();
    let again = parse(&printed).expect("printed query parses");
    assert_eq!(again.to_string(), printed);
    prepare(text, &fixture_catalog(), None).is_ok()
}

fn parse_schema(data: &[u8]) -> bool {
    let Ok(text) = std::str::from_utf8(data) else {
        return false;
    };
    let Ok(doc) = SchemaDoc::from_json(text) else {
        return false;
    };
    let Ok(catalog) = Catalog::define_schema(&doc) else {
        return false;
    };
    let back = Catalog::define_schema(&catalog.to_doc()).expect("exported schema is valid");
    assert_eq!(back.to_doc(), catalog.to_doc());
    true
}

fn load_csv(data: &[u8]) -> bool {
    let Some((&which, csv)) = data.split_first() else {
        return false;
    };
    let catalog = fixture_catalog();
    let nv = catalog.vertex_labels().len();
    let i = which as usize % (nv + catalog.edge_labels().len());
    if i < nv {
        read_vertex_csv(&catalog.vertex_labels()[i], csv, "seed").is_ok()
    } else {
        read_edge_csv(&catalog, &catalog.edge_labels()[i - nv], csv, "seed").is_ok()
    }
}

fn decode_snapshot(data: &[u8]) -> bool {
    let Ok(store) = GraphStore::from_snapshot(data) else {
        return false;
    };
    let again = GraphStore::from_snapshot(&store.to_snapshot()).expect("re-encoded snapshot loads");
    assert!(again == store);
    true
}

fn decode_entry(data: &[u8]) -> bool {
    let [flags, nbr, page, labels, entry @ ..] = data else {
        return false;
    };
    let store_page_offset = flags & 1 == 1;
    let decision = StorageDecision {
        store_page_offset,
        store_nbr_label: flags & 2 == 2,
        layout: Layout::CsrLayout,
        nbr_offset_bytes: nbr % 8 + 1,
        page_offset_bytes: if store_page_offset { page % 8 + 1 } else { 0 },
    };
    let codec = AdjEntryCodec::new(decision, (0..=*labels % 4).map(VertexLabelId).collect());
    let Ok((v, p)) = codec.decode_entry(entry) else {
        return false;
    };
    assert_eq!(codec.encode_entry(v, p).expect("decoded entry re-encodes"), entry);
    true
}

/// Runs every seed of `target`; returns how many were accepted as valid input.
fn replay(target: &str, body: fn(&[u8]) -> bool) -> usize {
    seeds(target).iter().filter(|(_, bytes)| body(bytes)).count()
}

#[test]
fn parse_query_seeds() {
    // seed-8 uses an inline property map, which the grammar does not have
    assert_eq!(replay("parse_query", parse_query), seeds("parse_query").len() - 1);
}

#[test]
fn parse_schema_seeds() {
    assert_eq!(replay("parse_schema", parse_schema), seeds("parse_schema").len());
}

#[test]
fn load_csv_seeds() {
    // the last seed holds an out-of-range integer and must be rejected
    assert_eq!(replay("load_csv", load_csv), seeds("load_csv").len() - 1);
}

#[test]
fn decode_snapshot_seeds() {
    assert_eq!(
        replay("decode_snapshot", decode_snapshot),
        seeds("decode_snapshot").len()
    );
}

#[test]
fn decode_entry_seeds() {
    // seed-2 carries label tag 0xff
    assert_eq!(replay("decode_entry", decode_entry), seeds("decode_entry").len() - 1);
}
