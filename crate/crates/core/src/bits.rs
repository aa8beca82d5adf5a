//! Packed bit sequences, MSB-first within each byte.
//!
//! Bit `i` lives in byte `i / 8` at mask `0x80 >> (i % 8)`. Pad bits in the
//! final byte are kept zero, so byte equality implies bit equality and
//! popcounts need no masking.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedBits {
    bytes: Vec<u8>,
    len: usize,
}

impl PackedBits {
    pub fn new() -> Self {
        PackedBits { bytes: Vec::new(), len: 0 }
    }

    pub fn with_capacity(bits: usize) -> Self {
        PackedBits { bytes: Vec::with_capacity(bits.div_ceil(8)), len: 0 }
    }

    /// All-zero sequence of the given length.
    pub fn zeros(len: usize) -> Self {
        PackedBits { bytes: vec![0u8; len.div_ceil(8)], len }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = PackedBits::with_capacity(bits.len());
        for &b in bits {
            out.push(b);
        }
        out
    }

    /// Wraps raw packed bytes. `len` may leave pad bits in the last byte;
    /// they are forced to zero to restore the padding invariant.
    pub fn from_bytes(mut bytes: Vec<u8>, len: usize) -> Result<Self> {
        if len > bytes.len() * 8 {
            return Err(Error::domain(format!(
                "bit length {len} exceeds capacity of {} bytes",
                bytes.len()
            )));
        }
        bytes.truncate(len.div_ceil(8));
        let pad = bytes.len() * 8 - len;
        if pad > 0 {
            if let Some(last) = bytes.last_mut() {
                *last &= 0xffu8 << pad;
            }
        }
        Ok(PackedBits { bytes, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Panics if `i >= len`.
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    /// Panics if `i >= len`.
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 0x80 >> (i % 8);
        if bit {
            self.bytes[i / 8] |= mask;
        } else {
            self.bytes[i / 8] &= !mask;
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[self.len / 8] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Appends all bits of `other`.
    pub fn extend_from(&mut self, other: &PackedBits) {
        if self.len % 8 == 0 {
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
        } else {
            for b in other.iter() {
                self.push(b);
            }
        }
    }

    /// Number of set bits. Pad bits are zero by invariant.
    pub fn ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Packs into u64 words, MSB-first: bit 0 of the sequence is bit 63 of
    /// word 0. Trailing word is zero-padded.
    pub fn to_words(&self) -> Vec<u64> {
        let n_words = self.len.div_ceil(64);
        let mut words = vec![0u64; n_words];
        for (i, &byte) in self.bytes.iter().enumerate() {
            words[i / 8] |= (byte as u64) << (56 - 8 * (i % 8));
        }
        words
    }

    /// Extracts bits `[start, start + len)` as a new sequence.
    /// Panics if the range is out of bounds.
    pub fn slice(&self, start: usize, len: usize) -> PackedBits {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = PackedBits::with_capacity(len);
        for i in 0..len {
            out.push(self.get(start + i));
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl Default for PackedBits {
    fn default() -> Self {
        Self::new()
    }
}
