#![allow(dead_code)]

use std::path::{Path, PathBuf};

use colgraph::catalog::{Catalog, SchemaDoc};
use colgraph::ingest::load_graph;
use colgraph::storage::{build_storage, GraphStore, StorageConfig};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/social")
}

pub fn social(config: StorageConfig) -> GraphStore {
    let dir = fixture_dir();
    let doc = SchemaDoc::from_json(&std::fs::read_to_string(dir.join("schema.json")).unwrap()).unwrap();
    let catalog = Catalog::define_schema(&doc).unwrap();
    let files = |names: &[&str]| -> Vec<(String, PathBuf)> {
        names
            .iter()
            .map(|n| (n.to_string(), dir.join(format!("{n}.csv"))))
            .collect()
    };
    let vertices = files(&["PERSON", "ORG"]);
    let edges = files(&["FOLLOWS", "WORKAT", "STUDYAT"]);
    let data = load_graph(&catalog, &as_refs(&vertices), &as_refs(&edges)).unwrap();
    build_storage(&catalog, &data, config).unwrap()
}

fn as_refs(v: &[(String, PathBuf)]) -> Vec<(String, &Path)> {
    v.iter().map(|(l, p)| (l.clone(), p.as_path())).collect()
}
