use crate::compression::byte_width_for_bound;
use crate::value::ScalarRef;

use super::column::PropertyColumn;
use super::StorageError;

/// Single-indexed property pages of one edge label for one anchor vertex label.
///
/// Vertices `[p*k, (p+1)*k)` share page `p`. Lists are laid out back-to-back in
/// member order, so page `p` spans positions `page_starts[p] ..
/// page_starts[p+1]` of every property array, and the arrays follow the entry
/// order of the indexed-direction CSR.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyPages {
    k: u64,
    /// `num_pages + 1` entries
    page_starts: Vec<u64>,
    properties: Vec<PropertyColumn>,
}

impl PropertyPages {
    /// `list_lengths[v]` is the length of vertex `v`'s list in the indexed
    /// direction; each column holds values in that CSR's entry order.
    pub fn build(k: u64, list_lengths: &[u64], properties: Vec<PropertyColumn>) -> Result<Self, StorageError> {
        if k == 0 {
            return Err(StorageError::InvalidConfig("k must be positive".into()));
        }
        let num_pages = list_lengths.len().div_ceil(k as usize);
        let mut page_starts = Vec::with_capacity(num_pages + 1);
        let mut acc = 0u64;
        for members in list_lengths.chunks(k as usize) {
            page_starts.push(acc);
            acc += members.iter().sum::<u64>();
        }
        page_starts.push(acc);
        Self::from_parts(k, page_starts, properties)
    }

    pub(crate) fn from_parts(
        k: u64,
        page_starts: Vec<u64>,
        properties: Vec<PropertyColumn>,
    ) -> Result<Self, StorageError> {
        if k == 0 || page_starts.first() != Some(&0) || page_starts.windows(2).any(|w| w[0] > w[1]) {
            return Err(StorageError::Corrupt("page directory".into()));
        }
        let total = *page_starts.last().unwrap_or(&0);
        if properties.iter().any(|p| p.len() as u64 != total) {
            return Err(StorageError::Corrupt("page value count".into()));
        }
        Ok(Self {
            k,
            page_starts,
            properties,
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn num_pages(&self) -> usize {
        self.page_starts.len() - 1
    }

    pub fn page_starts(&self) -> &[u64] {
        &self.page_starts
    }

    pub fn num_values(&self) -> u64 {
        *self.page_starts.last().unwrap_or(&0)
    }

    /// Largest page capacity; page-level offsets are below it.
    pub fn max_capacity(&self) -> u64 {
        self.page_starts.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    pub fn page_offset_bytes(&self) -> u8 {
        byte_width_for_bound(self.max_capacity())
    }

    #[inline]
    pub fn page_base(&self, anchor_offset: u64) -> u64 {
        self.page_starts[(anchor_offset / self.k) as usize]
    }

    /// Page-level offset of the edge at global entry index `entry` of the
    /// indexed CSR whose list belongs to `anchor_offset`.
    #[inline]
    pub fn page_offset_of(&self, anchor_offset: u64, entry: u64) -> u64 {
        entry - self.page_base(anchor_offset)
    }

    /// Resolves (anchor, page offset) to a value position.
    #[inline]
    pub fn slot(&self, anchor_offset: u64, page_offset: u64) -> Result<usize, StorageError> {
        let page = (anchor_offset / self.k) as usize;
        let (Some(&base), Some(&end)) = (self.page_starts.get(page), self.page_starts.get(page + 1)) else {
            return Err(StorageError::SlotUnassigned {
                anchor: anchor_offset,
                page_offset,
            });
        };
        if base + page_offset >= end {
            return Err(StorageError::SlotUnassigned {
                anchor: anchor_offset,
                page_offset,
            });
        }
        Ok((base + page_offset) as usize)
    }

    pub fn property(&self, idx: usize) -> &PropertyColumn {
        &self.properties[idx]
    }

    pub fn properties(&self) -> &[PropertyColumn] {
        &self.properties
    }

    #[inline]
    pub fn get_by_offset(
        &self,
        prop: usize,
        anchor_offset: u64,
        page_offset: u64,
    ) -> Result<ScalarRef<'_>, StorageError> {
        let slot = self.slot(anchor_offset, page_offset)?;
        Ok(self.properties[prop].get(slot))
    }

    pub fn directory_bytes(&self) -> usize {
        self.page_starts.len() * 8
    }
}

/// Strawman edge columns: one array per property indexed by a random dense
/// edge id, with no relation to adjacency order.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeColumnAlt {
    properties: Vec<PropertyColumn>,
    num_edges: u64,
}

impl EdgeColumnAlt {
    pub fn new(num_edges: u64, properties: Vec<PropertyColumn>) -> Result<Self, StorageError> {
        if properties.iter().any(|p| p.len() as u64 != num_edges) {
            return Err(StorageError::Corrupt("edge column length".into()));
        }
        Ok(Self { properties, num_edges })
    }

    pub fn num_edges(&self) -> u64 {
        self.num_edges
    }

    pub fn id_bytes(&self) -> u8 {
        byte_width_for_bound(self.num_edges)
    }

    pub fn property(&self, idx: usize) -> &PropertyColumn {
        &self.properties[idx]
    }

    pub fn properties(&self) -> &[PropertyColumn] {
        &self.properties
    }

    #[inline]
    pub fn get(&self, prop: usize, edge_id: u64) -> Result<ScalarRef<'_>, StorageError> {
        if edge_id >= self.num_edges {
            return Err(StorageError::OutOfBounds {
                index: edge_id,
                len: self.num_edges,
            });
        }
        Ok(self.properties[prop].get(edge_id as usize))
    }
}
