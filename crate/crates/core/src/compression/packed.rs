//! Fixed-width little-endian unsigned integers (leading-0 suppression).

use super::CompressionError;

/// Tail padding kept after the logical payload so that every read can load a
/// full little-endian `u64` without bounds juggling.
pub(crate) const READ_PAD: usize = 8;

/// Number of bytes needed to store every value in `0..bound`.
///
/// Always at least one byte; `bound` values of 0 and 1 are treated as 2.
pub fn byte_width_for_bound(bound: u64) -> u8 {
    let bound = bound.max(2);
    let bits = 64 - (bound - 1).leading_zeros();
    bits.div_ceil(8) as u8
}

/// Bytes needed to store the single value `max` itself.
pub fn byte_width_for_max(max: u64) -> u8 {
    byte_width_for_bound(max.saturating_add(1))
}

#[inline]
pub(crate) fn width_mask(width: u8) -> u64 {
    if width >= 8 {
        u64::MAX
    } else {
        (1u64 << (8 * width as u32)) - 1
    }
}

/// Reads a `width`-byte little-endian value at byte offset `at`.
///
/// `bytes` must have at least `at + 8` bytes (see [`READ_PAD`]).
#[inline]
pub(crate) fn read_uint(bytes: &[u8], at: usize, width: u8) -> u64 {
    let raw = u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    raw & width_mask(width)
}

#[inline]
pub(crate) fn write_uint(out: &mut [u8], value: u64, width: u8) {
    out[..width as usize].copy_from_slice(&value.to_le_bytes()[..width as usize]);
}

/// A zero-suppressed integer layout: every value uses the same byte width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroSuppressedInt {
    width: u8,
}

impl ZeroSuppressedInt {
    /// Layout for a domain `0..bound`.
    pub fn for_bound(bound: u64) -> Self {
        Self {
            width: byte_width_for_bound(bound),
        }
    }

    pub fn with_width(width: u8) -> Result<Self, CompressionError> {
        if !(1..=8).contains(&width) {
            return Err(CompressionError::InvalidWidth(width));
        }
        Ok(Self { width })
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn encode(&self, value: u64) -> Result<Vec<u8>, CompressionError> {
        if value & !width_mask(self.width) != 0 {
            return Err(CompressionError::Overflow {
                value,
                width: self.width,
            });
        }
        Ok(value.to_le_bytes()[..self.width as usize].to_vec())
    }

    pub fn decode(&self, bytes: &[u8]) -> u64 {
        let mut buf = [0u8; 8];
        let n = (self.width as usize).min(bytes.len());
        buf[..n].copy_from_slice(&bytes[..n]);
        u64::from_le_bytes(buf)
    }
}

/// A dense array of unsigned integers stored at a fixed byte width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedUints {
    width: u8,
    len: usize,
    bytes: Vec<u8>,
}

impl PackedUints {
    pub fn new(width: u8) -> Self {
        Self::with_capacity(width, 0)
    }

    pub fn with_capacity(width: u8, capacity: usize) -> Self {
        assert!((1..=8).contains(&width), "width must be 1..=8");
        let mut bytes = Vec::with_capacity(capacity * width as usize + READ_PAD);
        bytes.resize(READ_PAD, 0);
        Self { width, len: 0, bytes }
    }

    /// Packs `values` at the narrowest width that holds their maximum.
    pub fn from_values(values: &[u64]) -> Self {
        let max = values.iter().copied().max().unwrap_or(0);
        let mut packed = Self::with_capacity(byte_width_for_max(max), values.len());
        for &v in values {
            packed.push_unchecked(v);
        }
        packed
    }

    pub fn from_values_with_width(values: &[u64], width: u8) -> Result<Self, CompressionError> {
        let mut packed = Self::with_capacity(width, values.len());
        for &v in values {
            packed.push(v)?;
        }
        Ok(packed)
    }

    pub(crate) fn from_raw(width: u8, len: usize, mut payload: Vec<u8>) -> Result<Self, CompressionError> {
        if !(1..=8).contains(&width) {
            return Err(CompressionError::InvalidWidth(width));
        }
        if payload.len() != len.checked_mul(width as usize).ok_or(CompressionError::Corrupt)? {
            return Err(CompressionError::Corrupt);
        }
        payload.extend_from_slice(&[0u8; READ_PAD]);
        Ok(Self {
            width,
            len,
            bytes: payload,
        })
    }

    pub fn push(&mut self, value: u64) -> Result<(), CompressionError> {
        if value & !width_mask(self.width) != 0 {
            return Err(CompressionError::Overflow {
                value,
                width: self.width,
            });
        }
        self.push_unchecked(value);
        Ok(())
    }

    fn push_unchecked(&mut self, value: u64) {
        let at = self.len * self.width as usize;
        self.bytes.resize(at + self.width as usize + READ_PAD, 0);
        write_uint(&mut self.bytes[at..], value, self.width);
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, index: usize) -> u64 {
        debug_assert!(index < self.len);
        read_uint(&self.bytes, index * self.width as usize, self.width)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    /// Logical payload without the read padding.
    pub fn payload(&self) -> &[u8] {
        &self.bytes[..self.len * self.width as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn heap_bytes(&self) -> usize {
        self.bytes.len()
    }
}
