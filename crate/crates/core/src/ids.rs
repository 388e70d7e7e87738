//! Vertex and edge identifiers and the fixed-width adjacency entry codec.
//!
//! An adjacency entry stores only what cannot be factored out of its
//! (edge label, direction) list: an optional one-byte neighbour label tag, the
//! neighbour's label-level offset, and an optional page-level offset of the
//! edge. Each field is zero-suppressed to a fixed byte width so any entry of a
//! list decodes in constant time.

use std::fmt;

use thiserror::Error;

use crate::catalog::{EdgeLabelId, StorageDecision, VertexLabelId};
use crate::compression::{read_uint, write_uint, READ_PAD};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdError {
    #[error("value {value} does not fit in {width} bytes")]
    OffsetOverflow { value: u64, width: u8 },
    #[error("vertex label {0:?} is not a valid neighbour label for this list")]
    LabelNotAllowed(VertexLabelId),
    #[error("page offset must be given exactly when the codec stores one")]
    PageOffsetMismatch,
    #[error("encoded entry has {got} bytes, expected {expected}")]
    WrongEntryWidth { got: usize, expected: usize },
    #[error("label tag {tag} is out of range for {labels} neighbour labels")]
    BadLabelTag { tag: u8, labels: usize },
}

/// (vertex label, label-level positional offset).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId {
    pub label: VertexLabelId,
    pub offset: u64,
}

impl VertexId {
    pub fn new(label: VertexLabelId, offset: u64) -> Self {
        Self { label, offset }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.label.0, self.offset)
    }
}

/// (edge label, anchor vertex, page-level positional offset).
///
/// The anchor is the vertex on the side the edge's property pages are indexed
/// by; the page offset is the edge's slot within the anchor's page.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    pub label: EdgeLabelId,
    pub anchor: VertexId,
    pub page_offset: u64,
}

/// Encoder/decoder for the entries of one (edge label, direction) list set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjEntryCodec {
    decision: StorageDecision,
    nbr_labels: Vec<VertexLabelId>,
    tag_bytes: u8,
    page_at: u8,
    entry_width: u8,
}

impl AdjEntryCodec {
    /// `nbr_labels` must be the sorted neighbour label set of the list.
    pub fn new(decision: StorageDecision, nbr_labels: Vec<VertexLabelId>) -> Self {
        assert!(!nbr_labels.is_empty(), "neighbour label set cannot be empty");
        assert!((1..=8).contains(&decision.nbr_offset_bytes));
        assert!(!decision.store_page_offset || (1..=8).contains(&decision.page_offset_bytes));
        let tag_bytes = u8::from(decision.store_nbr_label);
        let page_bytes = if decision.store_page_offset {
            decision.page_offset_bytes
        } else {
            0
        };
        let page_at = tag_bytes + decision.nbr_offset_bytes;
        Self {
            decision,
            nbr_labels,
            tag_bytes,
            page_at,
            entry_width: page_at + page_bytes,
        }
    }

    pub fn decision(&self) -> &StorageDecision {
        &self.decision
    }

    pub fn nbr_labels(&self) -> &[VertexLabelId] {
        &self.nbr_labels
    }

    /// `(label tag ? 1 : 0) + nbr_offset_bytes + (page offset ? page_offset_bytes : 0)`.
    pub fn entry_width(&self) -> usize {
        self.entry_width as usize
    }

    pub fn stores_page_offset(&self) -> bool {
        self.decision.store_page_offset
    }

    /// Writes one entry into `out[..entry_width]`.
    pub fn encode_into(&self, out: &mut [u8], nbr: VertexId, page_offset: Option<u64>) -> Result<(), IdError> {
        if page_offset.is_some() != self.decision.store_page_offset {
            return Err(IdError::PageOffsetMismatch);
        }
        let tag = self
            .nbr_labels
            .iter()
            .position(|&l| l == nbr.label)
            .ok_or(IdError::LabelNotAllowed(nbr.label))?;
        check_fits(nbr.offset, self.decision.nbr_offset_bytes)?;
        if let Some(p) = page_offset {
            check_fits(p, self.decision.page_offset_bytes)?;
        }
        if self.tag_bytes == 1 {
            out[0] = tag as u8;
        }
        write_uint(
            &mut out[self.tag_bytes as usize..],
            nbr.offset,
            self.decision.nbr_offset_bytes,
        );
        if let Some(p) = page_offset {
            write_uint(&mut out[self.page_at as usize..], p, self.decision.page_offset_bytes);
        }
        Ok(())
    }

    pub fn encode_entry(&self, nbr: VertexId, page_offset: Option<u64>) -> Result<Vec<u8>, IdError> {
        let mut out = vec![0u8; self.entry_width()];
        self.encode_into(&mut out, nbr, page_offset)?;
        Ok(out)
    }

    /// Inverse of [`AdjEntryCodec::encode_entry`].
    pub fn decode_entry(&self, bytes: &[u8]) -> Result<(VertexId, Option<u64>), IdError> {
        if bytes.len() != self.entry_width() {
            return Err(IdError::WrongEntryWidth {
                got: bytes.len(),
                expected: self.entry_width(),
            });
        }
        let mut padded = bytes.to_vec();
        padded.extend_from_slice(&[0u8; READ_PAD]);
        let tag = self.tag_at(&padded, 0);
        let Some(&label) = self.nbr_labels.get(tag as usize) else {
            return Err(IdError::BadLabelTag {
                tag,
                labels: self.nbr_labels.len(),
            });
        };
        Ok((
            VertexId::new(label, self.nbr_offset_at(&padded, 0)),
            self.decision.store_page_offset.then(|| self.page_offset_at(&padded, 0)),
        ))
    }

    /// Neighbour offset of entry `i` of a padded arena.
    #[inline]
    pub(crate) fn nbr_offset_at(&self, arena: &[u8], i: usize) -> u64 {
        read_uint(
            arena,
            i * self.entry_width as usize + self.tag_bytes as usize,
            self.decision.nbr_offset_bytes,
        )
    }

    #[inline]
    pub(crate) fn tag_at(&self, arena: &[u8], i: usize) -> u8 {
        if self.tag_bytes == 0 {
            0
        } else {
            arena[i * self.entry_width as usize]
        }
    }

    #[inline]
    pub(crate) fn label_at(&self, arena: &[u8], i: usize) -> VertexLabelId {
        // tags are validated on build and on snapshot load
        self.nbr_labels[self.tag_at(arena, i) as usize]
    }

    #[inline]
    pub(crate) fn page_offset_at(&self, arena: &[u8], i: usize) -> u64 {
        read_uint(
            arena,
            i * self.entry_width as usize + self.page_at as usize,
            self.decision.page_offset_bytes,
        )
    }
}

fn check_fits(value: u64, width: u8) -> Result<(), IdError> {
    if width < 8 && value >> (8 * width as u32) != 0 {
        return Err(IdError::OffsetOverflow { value, width });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Layout;
    use proptest::prelude::*;

    fn decision(tag: bool, nbr: u8, page: u8) -> StorageDecision {
        StorageDecision {
            store_page_offset: page > 0,
            store_nbr_label: tag,
            layout: Layout::CsrLayout,
            nbr_offset_bytes: nbr,
            page_offset_bytes: page,
        }
    }

    fn v(label: u8, offset: u64) -> VertexId {
        VertexId::new(VertexLabelId(label), offset)
    }

    /// The width an uncompressed (8-byte edge id, 8-byte vertex id) entry takes.
    const NAIVE_ENTRY_BYTES: usize = 16;

    #[test]
    fn three_byte_neighbour() {
        let codec = AdjEntryCodec::new(decision(false, 3, 0), vec![VertexLabelId(0)]);
        let bytes = codec.encode_entry(v(0, 70_000), None).unwrap();
        assert_eq!(bytes.len(), 3);
        // naive reference: the low three bytes of the 8-byte little-endian value
        assert_eq!(bytes[..], 70_000u64.to_le_bytes()[..3]);
        assert_eq!(codec.decode_entry(&bytes).unwrap(), (v(0, 70_000), None));
    }

    #[test]
    fn zeros() {
        let codec = AdjEntryCodec::new(decision(false, 2, 2), vec![VertexLabelId(0)]);
        assert_eq!(codec.encode_entry(v(0, 0), Some(0)).unwrap(), vec![0; 4]);
    }

    #[test]
    fn hundred_thousand_vertices_use_three_bytes() {
        let d = crate::catalog::decide(
            &crate::catalog::EdgeLabelDef {
                name: "E".into(),
                id: EdgeLabelId(0),
                src_labels: vec![VertexLabelId(0)],
                dst_labels: vec![VertexLabelId(0)],
                cardinality: crate::catalog::Cardinality::NN,
                properties: vec![],
            },
            crate::catalog::Direction::Fwd,
            100_000,
        );
        let codec = AdjEntryCodec::new(d, vec![VertexLabelId(0)]);
        assert_eq!(codec.entry_width(), 3);
        assert!(NAIVE_ENTRY_BYTES as f64 / codec.entry_width() as f64 > 5.0);
    }

    #[test]
    fn single_label_is_factored_out() {
        let codec = AdjEntryCodec::new(decision(false, 1, 0), vec![VertexLabelId(3)]);
        let bytes = codec.encode_entry(v(3, 9), None).unwrap();
        assert_eq!(bytes.len(), 1);
        assert_eq!(codec.decode_entry(&bytes).unwrap().0.label, VertexLabelId(3));
    }

    #[test]
    fn mixed_labels_tag_by_set_order() {
        let codec = AdjEntryCodec::new(decision(true, 1, 0), vec![VertexLabelId(0), VertexLabelId(4)]);
        let bytes = codec.encode_entry(v(4, 2), None).unwrap();
        assert_eq!(bytes, vec![1, 2]);
        assert_eq!(codec.decode_entry(&[1, 7]).unwrap().0, v(4, 7));
        assert_eq!(
            codec.encode_entry(v(2, 0), None),
            Err(IdError::LabelNotAllowed(VertexLabelId(2)))
        );
    }

    #[test]
    fn errors() {
        let codec = AdjEntryCodec::new(decision(false, 1, 1), vec![VertexLabelId(0)]);
        assert_eq!(
            codec.encode_entry(v(0, 256), Some(0)),
            Err(IdError::OffsetOverflow { value: 256, width: 1 })
        );
        assert_eq!(codec.encode_entry(v(0, 1), None), Err(IdError::PageOffsetMismatch));
        assert!(matches!(codec.decode_entry(&[0]), Err(IdError::WrongEntryWidth { .. })));
        let tagged = AdjEntryCodec::new(decision(true, 1, 0), vec![VertexLabelId(0), VertexLabelId(2)]);
        assert_eq!(
            tagged.decode_entry(&[2, 9]),
            Err(IdError::BadLabelTag { tag: 2, labels: 2 })
        );
    }

    #[test]
    fn width_monotone_in_flags() {
        let full = AdjEntryCodec::new(decision(true, 3, 2), vec![VertexLabelId(0), VertexLabelId(1)]);
        let no_tag = AdjEntryCodec::new(decision(false, 3, 2), vec![VertexLabelId(0)]);
        let bare = AdjEntryCodec::new(decision(false, 3, 0), vec![VertexLabelId(0)]);
        assert!(full.entry_width() >= no_tag.entry_width());
        assert!(no_tag.entry_width() >= bare.entry_width());
        assert_eq!(full.entry_width(), 6);
    }

    #[test]
    fn exhaustive_small_widths() {
        for nbr_w in 1..=2u8 {
            for page_w in 0..=1u8 {
                let codec = AdjEntryCodec::new(decision(true, nbr_w, page_w), vec![VertexLabelId(0), VertexLabelId(1)]);
                let max_nbr = if nbr_w == 1 { 255 } else { 1000 };
                for label in 0..2u8 {
                    for off in (0..=max_nbr).step_by(7) {
                        for page in 0..(if page_w == 0 { 1 } else { 256 }) {
                            let p = (page_w > 0).then_some(page as u64);
                            let e = codec.encode_entry(v(label, off), p).unwrap();
                            assert_eq!(codec.decode_entry(&e).unwrap(), (v(label, off), p));
                        }
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn roundtrip(nbr_w in 1u8..=8, page_w in 0u8..=8, tag in any::<bool>(), raw_off in any::<u64>(), raw_page in any::<u64>(), which in 0usize..3) {
            let labels = if tag { vec![VertexLabelId(0), VertexLabelId(1), VertexLabelId(2)] } else { vec![VertexLabelId(1)] };
            let codec = AdjEntryCodec::new(decision(tag, nbr_w, page_w), labels.clone());
            let mask = |w: u8| if w >= 8 { u64::MAX } else { (1u64 << (8 * w as u32)) - 1 };
            let nbr = VertexId::new(labels[which % labels.len()], raw_off & mask(nbr_w));
            let page = (page_w > 0).then(|| raw_page & mask(page_w));
            let bytes = codec.encode_entry(nbr, page).unwrap();
            prop_assert_eq!(bytes.len(), codec.entry_width());
            prop_assert_eq!(codec.decode_entry(&bytes).unwrap(), (nbr, page));
        }
    }
}
