#![no_main]

use colgraph::catalog::{Catalog, SchemaDoc};
use colgraph::ingest::{read_edge_csv, read_vertex_csv};
use libfuzzer_sys::fuzz_target;

const SCHEMA: &str = include_str!("../../fixtures/social/schema.json");

// The first byte picks the label; the rest is the file.
fuzz_target!(|data: &[u8]| {
    let Some((&which, csv)) = data.split_first() else {
        return;
    };
    let catalog = Catalog::define_schema(&SchemaDoc::from_json(SCHEMA).unwrap()).unwrap();
    let nv = catalog.vertex_labels().len();
    let i = which as usize % (nv + catalog.edge_labels().len());
    if i < nv {
        let _ = read_vertex_csv(&catalog.vertex_labels()[i], csv, "fuzz");
    } else {
        let _ = read_edge_csv(&catalog, &catalog.edge_labels()[i - nv], csv, "fuzz");
    }
});
