//! NULL compression with a simplified Jacobson rank index.
//!
//! A column of length `n` is stored as a bit vector (1 = non-NULL), the dense
//! array of its non-NULL values, and one `m`-bit prefix sum per chunk of `c`
//! bits. The prefix sum counts the non-NULLs between the start of the enclosing
//! block of `2^m` elements and the start of the chunk. A process-wide table `M`
//! of `2^c * c` one-byte cells holds, for every `c`-bit pattern `b` and bit
//! position `i`, the number of ones in `b` below `i`. Rank within a block is
//! then `ps[p / c] + M[b, p % c]`: one counter read and one table read.
//!
//! Bit `i` of a chunk pattern is element `i` of the chunk (little-endian).

use std::sync::OnceLock;

use super::bitvec::BitVec;
use super::packed::{read_uint, READ_PAD};
use super::CompressionError;

/// Chunk size `c` and prefix-sum width `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JacobsonParams {
    chunk_bits: u32,
    counter_bits: u32,
}

impl Default for JacobsonParams {
    fn default() -> Self {
        Self {
            chunk_bits: 16,
            counter_bits: 16,
        }
    }
}

impl JacobsonParams {
    /// `c` must be 8 or 16; `m` must be one of 8, 16, 24, 32.
    pub fn new(c: u32, m: u32) -> Result<Self, CompressionError> {
        if !matches!(c, 8 | 16) {
            return Err(CompressionError::InvalidChunkSize(c));
        }
        if !matches!(m, 8 | 16 | 24 | 32) {
            return Err(CompressionError::InvalidCounterBits(m));
        }
        Ok(Self {
            chunk_bits: c,
            counter_bits: m,
        })
    }

    pub fn c(&self) -> u32 {
        self.chunk_bits
    }

    pub fn m(&self) -> u32 {
        self.counter_bits
    }

    /// Elements per independently indexed block, `2^m`.
    pub fn block_len(&self) -> u64 {
        1u64 << self.counter_bits
    }
}

/// The static bit-string-position-count map `M` for one chunk size.
#[derive(Debug)]
pub struct RankMap {
    chunk_bits: u32,
    cells: Box<[u8]>,
}

impl RankMap {
    fn build(c: u32) -> Self {
        let patterns = 1usize << c;
        let mut cells = vec![0u8; patterns * c as usize].into_boxed_slice();
        for b in 0..patterns {
            let row = &mut cells[b * c as usize..(b + 1) * c as usize];
            let mut ones = 0u8;
            for (i, cell) in row.iter_mut().enumerate() {
                *cell = ones;
                ones += ((b >> i) & 1) as u8;
            }
        }
        Self { chunk_bits: c, cells }
    }

    #[inline]
    pub fn get(&self, pattern: usize, i: usize) -> u8 {
        self.cells[pattern * self.chunk_bits as usize + i]
    }

    /// Size in bytes: `2^c * c` cells of one byte each.
    pub fn size_bytes(&self) -> usize {
        self.cells.len()
    }

    pub fn chunk_bits(&self) -> u32 {
        self.chunk_bits
    }
}

/// Shared read-only `M` for chunk size `c` (8 or 16), built on first use.
pub fn rank_map(c: u32) -> &'static RankMap {
    static MAP8: OnceLock<RankMap> = OnceLock::new();
    static MAP16: OnceLock<RankMap> = OnceLock::new();
    match c {
        8 => MAP8.get_or_init(|| RankMap::build(8)),
        16 => MAP16.get_or_init(|| RankMap::build(16)),
        _ => panic!("unsupported chunk size {c}"),
    }
}

/// Presence bits plus chunked prefix sums; answers `is_set` and `rank` in O(1).
#[derive(Debug, Clone)]
pub struct JacobsonIndex {
    params: JacobsonParams,
    bits: BitVec,
    counter_bytes: u8,
    /// one `m`-bit counter per chunk, packed little-endian, followed by padding
    prefix: Vec<u8>,
    /// non-NULLs before each block; locates the block's slice of the value array
    block_base: Vec<u64>,
    ones: usize,
    map: &'static RankMap,
}

impl PartialEq for JacobsonIndex {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.bits == other.bits
    }
}

impl JacobsonIndex {
    pub fn build(bits: BitVec, params: JacobsonParams) -> Self {
        let c = params.c() as usize;
        let block_len = params.block_len();
        let counter_bytes = (params.m() / 8) as u8;
        let n_chunks = bits.len().div_ceil(c);
        let mut prefix = Vec::with_capacity(n_chunks * counter_bytes as usize + READ_PAD);
        let mut block_base = Vec::new();
        let mut total = 0u64;
        let mut in_block = 0u64;
        for chunk in 0..n_chunks {
            let start = (chunk * c) as u64;
            if start.is_multiple_of(block_len) {
                block_base.push(total);
                in_block = 0;
            }
            prefix.extend_from_slice(&in_block.to_le_bytes()[..counter_bytes as usize]);
            let pattern = chunk_pattern(bits.words(), chunk, params.c());
            let ones = pattern.count_ones() as u64;
            in_block += ones;
            total += ones;
        }
        prefix.extend_from_slice(&[0u8; READ_PAD]);
        Self {
            params,
            bits,
            counter_bytes,
            prefix,
            block_base,
            ones: total as usize,
            map: rank_map(params.c()),
        }
    }

    /// Like [`JacobsonIndex::build`] but refuses columns that span more than one
    /// block.
    pub fn build_single_block(bits: BitVec, params: JacobsonParams) -> Result<Self, CompressionError> {
        if bits.len() as u64 > params.block_len() {
            return Err(CompressionError::BlockTooLarge {
                len: bits.len(),
                max: params.block_len(),
            });
        }
        Ok(Self::build(bits, params))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn params(&self) -> JacobsonParams {
        self.params
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn num_blocks(&self) -> usize {
        self.block_base.len()
    }

    #[inline]
    pub fn is_set(&self, p: usize) -> bool {
        self.bits.get(p)
    }

    /// Number of set bits strictly before `p`.
    #[inline]
    pub fn rank(&self, p: usize) -> usize {
        debug_assert!(p < self.len());
        let c = self.params.chunk_bits as usize;
        let chunk = p / c;
        let block = (p as u64 >> self.params.counter_bits) as usize;
        let ps = read_uint(&self.prefix, chunk * self.counter_bytes as usize, self.counter_bytes);
        let pattern = chunk_pattern(self.bits.words(), chunk, self.params.chunk_bits);
        self.block_base[block] as usize + ps as usize + self.map.get(pattern as usize, p % c) as usize
    }

    pub fn checked_rank(&self, p: usize) -> Result<usize, CompressionError> {
        if p >= self.len() {
            return Err(CompressionError::OutOfBounds {
                index: p,
                len: self.len(),
            });
        }
        Ok(self.rank(p))
    }

    /// Position in the dense value array for element `p`, or `None` when NULL.
    #[inline]
    pub fn slot(&self, p: usize) -> Option<usize> {
        if self.is_set(p) {
            Some(self.rank(p))
        } else {
            None
        }
    }

    /// Per-element auxiliary bits: the bit vector plus the prefix sums,
    /// `n + ceil(n / c) * m`. The shared rank map is global and not counted.
    pub fn aux_bits(&self) -> u64 {
        let n = self.len() as u64;
        n + n.div_ceil(self.params.chunk_bits as u64) * self.params.counter_bits as u64
    }

    pub fn heap_bytes(&self) -> usize {
        self.bits.heap_bytes() + self.prefix.len() + self.block_base.len() * 8
    }
}

#[inline]
fn chunk_pattern(words: &[u64], chunk: usize, c: u32) -> u64 {
    let start = chunk * c as usize;
    let word = words[start / 64];
    (word >> (start % 64)) & ((1u64 << c) - 1)
}

/// The vanilla bit-vector scheme: presence bits only, rank by linear popcount.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanillaNullIndex {
    bits: BitVec,
}

impl VanillaNullIndex {
    pub fn new(bits: BitVec) -> Self {
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    #[inline]
    pub fn slot(&self, p: usize) -> Option<usize> {
        if self.bits.get(p) {
            Some(self.bits.rank_linear(p))
        } else {
            None
        }
    }

    pub fn aux_bits(&self) -> u64 {
        self.bits.len() as u64
    }

    pub fn heap_bytes(&self) -> usize {
        self.bits.heap_bytes()
    }
}

/// A NULL-compressed column: only non-NULL values are stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobsonNullColumn<T> {
    index: JacobsonIndex,
    values: Vec<T>,
}

impl<T: Clone> JacobsonNullColumn<T> {
    pub fn build(values: &[Option<T>], params: JacobsonParams) -> Self {
        let bits = BitVec::from_bools(values.iter().map(Option::is_some));
        let dense = values.iter().flatten().cloned().collect();
        Self {
            index: JacobsonIndex::build(bits, params),
            values: dense,
        }
    }

    pub fn build_single_block(values: &[Option<T>], params: JacobsonParams) -> Result<Self, CompressionError> {
        if values.len() as u64 > params.block_len() {
            return Err(CompressionError::BlockTooLarge {
                len: values.len(),
                max: params.block_len(),
            });
        }
        Ok(Self::build(values, params))
    }
}

impl<T> JacobsonNullColumn<T> {
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn rank(&self, p: usize) -> Result<usize, CompressionError> {
        self.index.checked_rank(p)
    }

    /// `None` for NULL positions; the value array is not touched in that case.
    pub fn get(&self, p: usize) -> Result<Option<&T>, CompressionError> {
        if p >= self.len() {
            return Err(CompressionError::OutOfBounds {
                index: p,
                len: self.len(),
            });
        }
        Ok(self.index.slot(p).map(|s| &self.values[s]))
    }

    pub fn index(&self) -> &JacobsonIndex {
        &self.index
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}
