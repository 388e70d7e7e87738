use crate::catalog::VertexLabelId;
use crate::compression::{BitVec, JacobsonIndex, JacobsonParams, NullMap, PackedUints, READ_PAD};
use crate::ids::{AdjEntryCodec, VertexId};

use super::StorageError;

/// Per-vertex list boundaries of a CSR.
#[derive(Debug, Clone, PartialEq)]
pub enum CsrOffsets {
    /// `n + 1` monotone offsets.
    Plain(PackedUints),
    /// Offsets kept only for vertices with a non-empty list; a rank index over
    /// the presence bits maps a vertex to its compacted boundary pair.
    EmptyListCompressed {
        presence: JacobsonIndex,
        /// `nonempty + 1` monotone offsets
        offsets: PackedUints,
    },
}

impl CsrOffsets {
    /// Builds from per-vertex list lengths. With `params`, empty lists are
    /// compressed away when that is smaller than the plain layout.
    pub fn build(lengths: &[u64], params: Option<JacobsonParams>) -> Self {
        let total: u64 = lengths.iter().sum();
        let mut plain = Vec::with_capacity(lengths.len() + 1);
        let mut acc = 0u64;
        plain.push(0);
        for &l in lengths {
            acc += l;
            plain.push(acc);
        }
        let plain = PackedUints::from_values(&plain);
        let Some(params) = params else {
            return CsrOffsets::Plain(plain);
        };
        let empties = lengths.iter().filter(|&&l| l == 0).count();
        let width = plain.width() as u64;
        // 2 bits per vertex vs the width of every dropped offset
        let saved_bits = empties as u64 * width * 8;
        let cost_bits = lengths.len() as u64 * (1 + params.m() as u64 / params.c() as u64);
        if empties == 0 || saved_bits <= cost_bits {
            return CsrOffsets::Plain(plain);
        }
        let presence = BitVec::from_bools(lengths.iter().map(|&l| l > 0));
        let mut compact = Vec::with_capacity(lengths.len() - empties + 1);
        let mut acc = 0u64;
        compact.push(0);
        for &l in lengths.iter().filter(|&&l| l > 0) {
            acc += l;
            compact.push(acc);
        }
        debug_assert_eq!(acc, total);
        CsrOffsets::EmptyListCompressed {
            presence: JacobsonIndex::build(presence, params),
            offsets: PackedUints::from_values_with_width(&compact, plain.width()).expect("same bound"),
        }
    }

    pub fn num_vertices(&self) -> usize {
        match self {
            CsrOffsets::Plain(o) => o.len().saturating_sub(1),
            CsrOffsets::EmptyListCompressed { presence, .. } => presence.len(),
        }
    }

    pub fn total(&self) -> u64 {
        match self {
            CsrOffsets::Plain(o) | CsrOffsets::EmptyListCompressed { offsets: o, .. } => {
                if o.is_empty() {
                    0
                } else {
                    o.get(o.len() - 1)
                }
            }
        }
    }

    /// `[start, end)` entry range of vertex `v`.
    #[inline]
    pub fn range(&self, v: usize) -> (u64, u64) {
        match self {
            CsrOffsets::Plain(o) => (o.get(v), o.get(v + 1)),
            CsrOffsets::EmptyListCompressed { presence, offsets } => match presence.slot(v) {
                Some(r) => (offsets.get(r), offsets.get(r + 1)),
                None => (0, 0),
            },
        }
    }

    pub fn offsets_bytes(&self) -> usize {
        match self {
            CsrOffsets::Plain(o) => o.heap_bytes(),
            CsrOffsets::EmptyListCompressed { offsets, .. } => offsets.heap_bytes(),
        }
    }

    pub fn aux_bytes(&self) -> usize {
        match self {
            CsrOffsets::Plain(_) => 0,
            CsrOffsets::EmptyListCompressed { presence, .. } => presence.heap_bytes(),
        }
    }

    pub fn is_compressed(&self) -> bool {
        matches!(self, CsrOffsets::EmptyListCompressed { .. })
    }

    fn validate(&self) -> Result<(), StorageError> {
        let check = |o: &PackedUints| -> Result<(), StorageError> {
            if o.is_empty() || o.get(0) != 0 {
                return Err(StorageError::Corrupt("csr offsets must start at 0".into()));
            }
            let mut prev = 0;
            for x in o.iter() {
                if x < prev {
                    return Err(StorageError::Corrupt("csr offsets not monotone".into()));
                }
                prev = x;
            }
            Ok(())
        };
        match self {
            CsrOffsets::Plain(o) => check(o),
            CsrOffsets::EmptyListCompressed { presence, offsets } => {
                check(offsets)?;
                if offsets.len() != presence.count_ones() + 1 {
                    return Err(StorageError::Corrupt("compressed csr offsets length".into()));
                }
                if offsets.iter().zip(offsets.iter().skip(1)).any(|(a, b)| a == b) {
                    return Err(StorageError::Corrupt("compressed csr has an empty list".into()));
                }
                Ok(())
            }
        }
    }
}

/// Two-level CSR for one (edge label, direction, anchor vertex label).
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyCsr {
    codec: AdjEntryCodec,
    offsets: CsrOffsets,
    /// fixed-width entries followed by [`READ_PAD`] zero bytes
    arena: Vec<u8>,
}

impl AdjacencyCsr {
    pub(crate) fn new(codec: AdjEntryCodec, offsets: CsrOffsets, mut arena: Vec<u8>) -> Self {
        debug_assert_eq!(arena.len(), offsets.total() as usize * codec.entry_width());
        arena.extend_from_slice(&[0u8; READ_PAD]);
        Self { codec, offsets, arena }
    }

    pub(crate) fn from_parts(
        codec: AdjEntryCodec,
        offsets: CsrOffsets,
        arena: Vec<u8>,
        nbr_counts: &[u64],
    ) -> Result<Self, StorageError> {
        offsets.validate()?;
        if arena.len() as u64 != offsets.total() * codec.entry_width() as u64 {
            return Err(StorageError::Corrupt("csr arena length".into()));
        }
        let csr = Self::new(codec, offsets, arena);
        for i in 0..csr.num_entries() {
            let tag = csr.codec.tag_at(&csr.arena, i) as usize;
            let Some(label) = csr.codec.nbr_labels().get(tag) else {
                return Err(StorageError::Corrupt("neighbour label tag".into()));
            };
            let count = nbr_counts.get(label.index()).copied().unwrap_or(0);
            if csr.codec.nbr_offset_at(&csr.arena, i) >= count {
                return Err(StorageError::Corrupt("neighbour offset out of range".into()));
            }
        }
        Ok(csr)
    }

    pub fn codec(&self) -> &AdjEntryCodec {
        &self.codec
    }

    pub fn offsets(&self) -> &CsrOffsets {
        &self.offsets
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.num_vertices()
    }

    pub fn num_entries(&self) -> usize {
        self.offsets.total() as usize
    }

    /// Encoded entries without padding.
    pub fn entries(&self) -> &[u8] {
        &self.arena[..self.arena.len() - READ_PAD]
    }

    /// Address range of the entry arena, for zero-copy audits.
    pub fn arena_range(&self) -> std::ops::Range<usize> {
        let p = self.arena.as_ptr() as usize;
        p..p + self.arena.len() - READ_PAD
    }

    #[inline]
    pub fn list(&self, v: usize) -> AdjList<'_> {
        let (start, end) = self.offsets.range(v);
        AdjList {
            codec: &self.codec,
            arena: &self.arena,
            start: start as usize,
            len: (end - start) as usize,
        }
    }

    pub fn arena_bytes(&self) -> usize {
        self.arena.len()
    }
}

/// Zero-copy view of one adjacency list.
#[derive(Debug, Clone, Copy)]
pub struct AdjList<'a> {
    codec: &'a AdjEntryCodec,
    arena: &'a [u8],
    start: usize,
    len: usize,
}

impl<'a> AdjList<'a> {
    pub fn empty(codec: &'a AdjEntryCodec) -> Self {
        Self {
            codec,
            arena: &[],
            start: 0,
            len: 0,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Index of the first entry within the whole CSR; equals the position of
    /// this list's first property in forward-ordered property pages.
    #[inline]
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn codec(&self) -> &'a AdjEntryCodec {
        self.codec
    }

    #[inline]
    pub fn nbr_offset(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        self.codec.nbr_offset_at(self.arena, self.start + i)
    }

    #[inline]
    pub fn nbr_label(&self, i: usize) -> VertexLabelId {
        self.codec.label_at(self.arena, self.start + i)
    }

    #[inline]
    pub fn nbr(&self, i: usize) -> VertexId {
        VertexId::new(self.nbr_label(i), self.nbr_offset(i))
    }

    #[inline]
    pub fn page_offset(&self, i: usize) -> Option<u64> {
        self.codec
            .stores_page_offset()
            .then(|| self.codec.page_offset_at(self.arena, self.start + i))
    }

    /// The encoded bytes of this list, borrowed from the CSR arena.
    pub fn bytes(&self) -> &'a [u8] {
        let w = self.codec.entry_width();
        if self.len == 0 {
            return &[];
        }
        &self.arena[self.start * w..(self.start + self.len) * w]
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.len).map(move |i| self.nbr(i))
    }
}

/// Neighbour column for a single-cardinality (edge label, direction).
#[derive(Debug, Clone, PartialEq)]
pub struct NbrColumn {
    nbr_labels: Vec<VertexLabelId>,
    nulls: NullMap,
    /// compacted (or full, under a validity map) neighbour offsets
    offsets: PackedUints,
    /// one tag per stored neighbour when several labels are possible
    tags: Option<Vec<u8>>,
}

impl NbrColumn {
    pub(crate) fn build(
        nbr_labels: Vec<VertexLabelId>,
        nbrs: &[Option<VertexId>],
        width: u8,
        mode: crate::compression::NullCompression,
    ) -> Result<Self, StorageError> {
        let nulls = NullMap::build(BitVec::from_bools(nbrs.iter().map(Option::is_some)), mode);
        let dense = nulls.stores_dense_values();
        let mut offsets = PackedUints::new(width);
        let mut tags = (nbr_labels.len() > 1).then(Vec::new);
        for n in nbrs {
            match n {
                Some(v) => {
                    offsets.push(v.offset)?;
                    if let Some(t) = tags.as_mut() {
                        let tag = nbr_labels
                            .iter()
                            .position(|&l| l == v.label)
                            .ok_or_else(|| StorageError::Corrupt("neighbour label outside label set".into()))?;
                        t.push(tag as u8);
                    }
                }
                None if !dense => {
                    offsets.push(0)?;
                    if let Some(t) = tags.as_mut() {
                        t.push(0);
                    }
                }
                None => {}
            }
        }
        Ok(Self {
            nbr_labels,
            nulls,
            offsets,
            tags,
        })
    }

    pub(crate) fn from_parts(
        nbr_labels: Vec<VertexLabelId>,
        nulls: NullMap,
        offsets: PackedUints,
        tags: Option<Vec<u8>>,
        nbr_counts: &[u64],
    ) -> Result<Self, StorageError> {
        if nbr_labels.is_empty() || offsets.len() != nulls.value_slots() {
            return Err(StorageError::Corrupt("neighbour column shape".into()));
        }
        if (nbr_labels.len() > 1) != tags.is_some() {
            return Err(StorageError::Corrupt("neighbour column tags".into()));
        }
        if let Some(t) = &tags {
            if t.len() != offsets.len() || t.iter().any(|&x| x as usize >= nbr_labels.len()) {
                return Err(StorageError::Corrupt("neighbour column tags".into()));
            }
        }
        let col = Self {
            nbr_labels,
            nulls,
            offsets,
            tags,
        };
        for pos in 0..col.len() {
            if let Some(v) = col.get(pos) {
                if v.offset >= nbr_counts.get(v.label.index()).copied().unwrap_or(0) {
                    return Err(StorageError::Corrupt("neighbour offset out of range".into()));
                }
            }
        }
        Ok(col)
    }

    pub fn len(&self) -> usize {
        self.nulls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, pos: usize) -> Option<VertexId> {
        let slot = self.nulls.slot(pos)?;
        let label = match &self.tags {
            Some(t) => self.nbr_labels[t[slot] as usize],
            None => self.nbr_labels[0],
        };
        Some(VertexId::new(label, self.offsets.get(slot)))
    }

    pub fn nbr_labels(&self) -> &[VertexLabelId] {
        &self.nbr_labels
    }

    pub fn nulls(&self) -> &NullMap {
        &self.nulls
    }

    pub fn offsets(&self) -> &PackedUints {
        &self.offsets
    }

    pub fn tags(&self) -> Option<&[u8]> {
        self.tags.as_deref()
    }

    pub fn payload_bytes(&self) -> usize {
        self.offsets.heap_bytes() + self.tags.as_ref().map_or(0, Vec::len)
    }

    pub fn aux_bytes(&self) -> usize {
        self.nulls.heap_bytes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::NullCompression;

    #[test]
    fn offsets_plain_and_compressed_agree() {
        let lengths: Vec<u64> = (0..500)
            .map(|i| if i % 2 == 0 { 0 } else { (i % 5) as u64 + 1 })
            .collect();
        let plain = CsrOffsets::build(&lengths, None);
        let comp = CsrOffsets::build(&lengths, Some(JacobsonParams::default()));
        assert!(comp.is_compressed());
        assert!(comp.offsets_bytes() + comp.aux_bytes() < plain.offsets_bytes());
        for v in 0..500 {
            let (a, b) = plain.range(v);
            let (c, d) = comp.range(v);
            assert_eq!(b - a, d - c);
            if b > a {
                assert_eq!((a, b), (c, d));
            }
        }
    }

    #[test]
    fn no_empty_lists_stay_plain() {
        let lengths = vec![1u64; 100];
        assert!(!CsrOffsets::build(&lengths, Some(JacobsonParams::default())).is_compressed());
    }

    #[test]
    fn empty_graph_offsets() {
        let o = CsrOffsets::build(&[0, 0, 0], None);
        assert_eq!(o.total(), 0);
        assert_eq!(o.range(2), (0, 0));
    }

    #[test]
    fn nbr_column_modes() {
        let labels = vec![VertexLabelId(0), VertexLabelId(1)];
        let nbrs = vec![
            Some(VertexId::new(VertexLabelId(1), 5)),
            None,
            Some(VertexId::new(VertexLabelId(0), 2)),
        ];
        for mode in [
            NullCompression::default(),
            NullCompression::Vanilla,
            NullCompression::Off,
        ] {
            let col = NbrColumn::build(labels.clone(), &nbrs, 1, mode).unwrap();
            for (i, n) in nbrs.iter().enumerate() {
                assert_eq!(col.get(i), *n);
            }
        }
    }
}
