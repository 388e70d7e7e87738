/// A plain bit vector, bit `i` stored at bit `i % 64` of word `i / 64`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut bv = Self::new();
        for b in bits {
            bv.push(b);
        }
        bv
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Option<Self> {
        if words.len() != len.div_ceil(64) {
            return None;
        }
        let mut bv = Self { words, len };
        // bits past `len` must be zero so popcounts stay exact
        if !len.is_multiple_of(64) {
            let last = bv.words.len() - 1;
            bv.words[last] &= (1u64 << (len % 64)) - 1;
        }
        Some(bv)
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len);
        if bit {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of set bits in `0..p`, computed by a linear scan.
    pub fn rank_linear(&self, p: usize) -> usize {
        let full = p / 64;
        let mut r: usize = self.words[..full].iter().map(|w| w.count_ones() as usize).sum();
        if !p.is_multiple_of(64) {
            r += (self.words[full] & ((1u64 << (p % 64)) - 1)).count_ones() as usize;
        }
        r
    }

    pub fn heap_bytes(&self) -> usize {
        self.words.len() * 8
    }
}
