#![no_main]

use colgraph::catalog::{Catalog, SchemaDoc};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = SchemaDoc::from_json(text) else { return };
    if let Ok(catalog) = Catalog::define_schema(&doc) {
        let back = Catalog::define_schema(&catalog.to_doc()).expect("exported schema is valid");
        assert_eq!(back.to_doc(), catalog.to_doc());
    }
});
