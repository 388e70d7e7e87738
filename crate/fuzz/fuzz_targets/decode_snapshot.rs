#![no_main]

use colgraph::storage::GraphStore;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(store) = GraphStore::from_snapshot(data) {
        let bytes = store.to_snapshot();
        let again = GraphStore::from_snapshot(&bytes).expect("re-encoded snapshot loads");
        assert!(again == store);
    }
});
