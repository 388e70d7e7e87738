#![no_main]

use colgraph::catalog::{Catalog, SchemaDoc};
use colgraph::query::{parse, prepare};
use libfuzzer_sys::fuzz_target;

const SCHEMA: &str = include_str!("../../fixtures/social/schema.json");

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(q) = parse(text) else { return };
    let printed = q.to_string();
    let again = parse(&printed).expect("printed query parses");
    assert_eq!(again.to_string(), printed);
    let catalog = Catalog::define_schema(&SchemaDoc::from_json(SCHEMA).unwrap()).unwrap();
    let _ = prepare(text, &catalog, None);
});
