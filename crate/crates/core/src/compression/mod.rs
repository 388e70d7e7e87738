//! Fixed-length columnar codecs.
//!
//! Every codec here decodes an arbitrary element in constant time: dictionary
//! codes and zero-suppressed integers are fixed width, and NULL compression
//! keeps a rank index next to the presence bits.

mod bitvec;
mod dictionary;
mod jacobson;
mod packed;

pub use bitvec::BitVec;
pub use dictionary::Dictionary;
pub use jacobson::{rank_map, JacobsonIndex, JacobsonNullColumn, JacobsonParams, RankMap, VanillaNullIndex};
pub use packed::{byte_width_for_bound, byte_width_for_max, PackedUints, ZeroSuppressedInt};

pub(crate) use packed::{read_uint, write_uint, READ_PAD};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompressionError {
    #[error("value {0:?} is not in the dictionary domain")]
    ValueNotInDomain(String),
    #[error("dictionary code {0} out of range")]
    CodeOutOfRange(u32),
    #[error("dictionary domain of {0} values needs more than 4 bytes per code")]
    DomainTooLarge(usize),
    #[error("value {value} does not fit in {width} bytes")]
    Overflow { value: u64, width: u8 },
    #[error("invalid byte width {0}")]
    InvalidWidth(u8),
    #[error("chunk size must be 8 or 16, got {0}")]
    InvalidChunkSize(u32),
    #[error("prefix-sum width must be 8, 16, 24 or 32 bits, got {0}")]
    InvalidCounterBits(u32),
    #[error("column of {len} elements exceeds the block size {max}")]
    BlockTooLarge { len: usize, max: u64 },
    #[error("position {index} out of bounds for length {len}")]
    OutOfBounds { index: usize, len: usize },
    #[error("corrupt encoded data")]
    Corrupt,
}

/// How nullable columns and per-vertex list presence are stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NullCompression {
    /// Dense non-NULL values with a Jacobson rank index.
    Jacobson(JacobsonParams),
    /// Dense non-NULL values with presence bits only; rank is a linear scan.
    Vanilla,
    /// One value slot per position plus a validity bit vector.
    Off,
}

impl Default for NullCompression {
    fn default() -> Self {
        NullCompression::Jacobson(JacobsonParams::default())
    }
}

/// Maps a logical position to its slot in a value array.
#[derive(Debug, Clone, PartialEq)]
pub enum NullMap {
    /// No NULLs: slot = position.
    Dense {
        len: usize,
    },
    Jacobson(JacobsonIndex),
    Vanilla(VanillaNullIndex),
    /// Values stored at every position; the bit says whether the slot is valid.
    Validity(BitVec),
}

impl NullMap {
    /// Builds the map for a presence vector under `mode`. A vector without any
    /// NULL always becomes [`NullMap::Dense`].
    pub fn build(presence: BitVec, mode: NullCompression) -> Self {
        if presence.count_ones() == presence.len() {
            return NullMap::Dense { len: presence.len() };
        }
        match mode {
            NullCompression::Jacobson(params) => NullMap::Jacobson(JacobsonIndex::build(presence, params)),
            NullCompression::Vanilla => NullMap::Vanilla(VanillaNullIndex::new(presence)),
            NullCompression::Off => NullMap::Validity(presence),
        }
    }

    /// Whether value arrays under this map hold only the non-NULL values.
    pub fn stores_dense_values(&self) -> bool {
        !matches!(self, NullMap::Validity(_))
    }

    pub fn len(&self) -> usize {
        match self {
            NullMap::Dense { len } => *len,
            NullMap::Jacobson(j) => j.len(),
            NullMap::Vanilla(v) => v.len(),
            NullMap::Validity(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of slots a value array under this map must hold.
    pub fn value_slots(&self) -> usize {
        match self {
            NullMap::Dense { len } => *len,
            NullMap::Jacobson(j) => j.count_ones(),
            NullMap::Vanilla(v) => v.bits().count_ones(),
            NullMap::Validity(b) => b.len(),
        }
    }

    #[inline]
    pub fn slot(&self, p: usize) -> Option<usize> {
        match self {
            NullMap::Dense { .. } => Some(p),
            NullMap::Jacobson(j) => j.slot(p),
            NullMap::Vanilla(v) => v.slot(p),
            NullMap::Validity(b) => b.get(p).then_some(p),
        }
    }

    #[inline]
    pub fn is_null(&self, p: usize) -> bool {
        match self {
            NullMap::Dense { .. } => false,
            NullMap::Jacobson(j) => !j.is_set(p),
            NullMap::Vanilla(v) => !v.bits().get(p),
            NullMap::Validity(b) => !b.get(p),
        }
    }

    pub fn presence(&self) -> BitVec {
        match self {
            NullMap::Dense { len } => BitVec::from_bools(std::iter::repeat_n(true, *len)),
            NullMap::Jacobson(j) => j.bits().clone(),
            NullMap::Vanilla(v) => v.bits().clone(),
            NullMap::Validity(b) => b.clone(),
        }
    }

    pub fn aux_bits(&self) -> u64 {
        match self {
            NullMap::Dense { .. } => 0,
            NullMap::Jacobson(j) => j.aux_bits(),
            NullMap::Vanilla(v) => v.aux_bits(),
            NullMap::Validity(b) => b.len() as u64,
        }
    }

    pub fn heap_bytes(&self) -> usize {
        match self {
            NullMap::Dense { .. } => 0,
            NullMap::Jacobson(j) => j.heap_bytes(),
            NullMap::Vanilla(v) => v.heap_bytes(),
            NullMap::Validity(b) => b.heap_bytes(),
        }
    }
}
