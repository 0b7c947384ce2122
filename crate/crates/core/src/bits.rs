//! Packed bit rows with popcount-based set statistics.
//!
//! A [`BitRow`] stores one boolean per example in 64-bit blocks. All joint
//! statistics reduce to bitwise combinations plus popcounts, so counts are
//! exact integers; callers divide by the example count as the only floating
//! step.

use std::fmt;

const BLOCK_BITS: usize = 64;

/// Fixed-length packed bit vector. Unused high bits of the last block are
/// always zero, which keeps complement-based counts correct.
#[derive(Clone, PartialEq, Eq)]
pub struct BitRow {
    blocks: Vec<u64>,
    len: usize,
}

impl BitRow {
    /// All-zero row of the given length.
    pub fn zeros(len: usize) -> Self {
        BitRow {
            blocks: vec![0; len.div_ceil(BLOCK_BITS)],
            len,
        }
    }

    /// Builds a row from an iterator of booleans.
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut row = BitRow {
            blocks: Vec::new(),
            len: 0,
        };
        for bit in bits {
            row.push(bit);
        }
        row
    }

    /// Appends one bit at the end of the row.
    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(BLOCK_BITS) {
            self.blocks.push(0);
        }
        if bit {
            let last = self.blocks.len() - 1;
            self.blocks[last] |= 1u64 << (self.len % BLOCK_BITS);
        }
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "bit index {index} out of range ({})", self.len);
        let mask = 1u64 << (index % BLOCK_BITS);
        if value {
            self.blocks[index / BLOCK_BITS] |= mask;
        } else {
            self.blocks[index / BLOCK_BITS] &= !mask;
        }
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of range ({})", self.len);
        (self.blocks[index / BLOCK_BITS] >> (index % BLOCK_BITS)) & 1 == 1
    }

    /// Number of set bits.
    pub fn count_ones(&self) -> u64 {
        self.blocks.iter().map(|b| u64::from(b.count_ones())).sum()
    }

    /// Mask selecting the valid bits of the final block.
    fn tail_mask(&self) -> u64 {
        let rem = self.len % BLOCK_BITS;
        if rem == 0 {
            !0
        } else {
            (1u64 << rem) - 1
        }
    }

    fn assert_same_len(&self, other: &Self) {
        assert_eq!(
            self.len, other.len,
            "bit rows have different lengths ({} vs {})",
            self.len, other.len
        );
    }

    /// Positions set in both rows.
    pub fn count_and(&self, other: &Self) -> u64 {
        self.assert_same_len(other);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| u64::from((a & b).count_ones()))
            .sum()
    }

    /// Positions set in `self` but not in `other`.
    pub fn count_and_not(&self, other: &Self) -> u64 {
        self.assert_same_len(other);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| u64::from((a & !b).count_ones()))
            .sum()
    }

    /// Positions where the two rows disagree.
    pub fn count_xor(&self, other: &Self) -> u64 {
        self.assert_same_len(other);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| u64::from((a ^ b).count_ones()))
            .sum()
    }

    /// Joint sign counts for three rows of equal length.
    ///
    /// Order: `[+++, ++-, +-+, +--, -++, -+-, --+, ---]`, where `+` in
    /// position t means "row t set". The eight counts sum to the row length.
    pub fn triple_counts(a: &Self, b: &Self, c: &Self) -> [u64; 8] {
        a.assert_same_len(b);
        a.assert_same_len(c);
        let mut out = [0u64; 8];
        let last = a.blocks.len();
        for i in 0..last {
            let mask = if i + 1 == last { a.tail_mask() } else { !0 };
            let (x, y, z) = (a.blocks[i], b.blocks[i], c.blocks[i]);
            let (nx, ny, nz) = (!x & mask, !y & mask, !z & mask);
            out[0] += u64::from((x & y & z).count_ones());
            out[1] += u64::from((x & y & nz).count_ones());
            out[2] += u64::from((x & ny & z).count_ones());
            out[3] += u64::from((x & ny & nz).count_ones());
            out[4] += u64::from((nx & y & z).count_ones());
            out[5] += u64::from((nx & y & nz).count_ones());
            out[6] += u64::from((nx & ny & z).count_ones());
            out[7] += u64::from((nx & ny & nz).count_ones());
        }
        out
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitRow(len={}, ones={})", self.len, self.count_ones())
    }
}
