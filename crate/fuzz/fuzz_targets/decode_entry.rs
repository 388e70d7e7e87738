#![no_main]

use colgraph::catalog::{Layout, StorageDecision, VertexLabelId};
use colgraph::ids::AdjEntryCodec;
use libfuzzer_sys::fuzz_target;

// Header bytes: flags, neighbour offset width, page offset width, label count.
fuzz_target!(|data: &[u8]| {
    let [flags, nbr, page, labels, entry @ ..] = data else {
        return;
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
    if let Ok((v, p)) = codec.decode_entry(entry) {
        assert_eq!(codec.encode_entry(v, p).expect("decoded entry re-encodes"), entry);
    }
});
