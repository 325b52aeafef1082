//! Fixed-length bit strings with XOR arithmetic.
//!
//! Bit `i` of a block is stored in word `i / 64` at position `i % 64`. Bits
//! past `len` in the last word are always zero, so derived equality and
//! hashing compare logical content only.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use rand::Rng;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitBlock {
    len: usize,
    words: Vec<u64>,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

impl BitBlock {
    pub fn zeros(len: usize) -> Self {
        BitBlock {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut block = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                block.set(i, true);
            }
        }
        block
    }

    /// Parses a string of `'0'`/`'1'` characters, first character is bit 0.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bools(&bits))
    }

    /// The low `len` bits of `value`, bit 0 of the block taken from bit 0 of the value.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 bits");
        let mut block = Self::zeros(len);
        if len > 0 {
            let mask = if len == WORD { u64::MAX } else { (1u64 << len) - 1 };
            block.words[0] = value & mask;
        }
        block
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut block = Self::zeros(len);
        for w in block.words.iter_mut() {
            *w = rng.gen();
        }
        block.clear_tail();
        block
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let v = self.get(i);
        self.set(i, !v);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// In-place XOR; lengths must match.
    pub fn try_xor_assign(&mut self, other: &BitBlock) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
        Ok(())
    }

    pub fn try_xor(&self, other: &BitBlock) -> Result<BitBlock> {
        let mut out = self.clone();
        out.try_xor_assign(other)?;
        Ok(out)
    }

    /// Appends the bits of `other` after the bits of `self`.
    pub fn extend(&mut self, other: &BitBlock) {
        if self.len.is_multiple_of(WORD) {
            self.words.extend_from_slice(&other.words);
            self.len += other.len;
            return;
        }
        let start = self.len;
        self.len += other.len;
        self.words.resize(words_for(self.len), 0);
        for i in 0..other.len {
            if other.get(i) {
                self.set(start + i, true);
            }
        }
    }

    pub fn concat<'a, I>(parts: I) -> BitBlock
    where
        I: IntoIterator<Item = &'a BitBlock>,
    {
        let mut out = BitBlock::zeros(0);
        for p in parts {
            out.extend(p);
        }
        out
    }

    /// Bits `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> Result<BitBlock> {
        if start + len > self.len {
            return Err(Error::Sizing(format!(
                "slice {}..{} exceeds length {}",
                start,
                start + len,
                self.len
            )));
        }
        let mut out = BitBlock::zeros(len);
        if start.is_multiple_of(WORD) {
            let first = start / WORD;
            let n = words_for(len);
            out.words.copy_from_slice(&self.words[first..first + n]);
            out.clear_tail();
        } else {
            for i in 0..len {
                if self.get(start + i) {
                    out.set(i, true);
                }
            }
        }
        Ok(out)
    }

    /// Splits into `parts` consecutive blocks of equal length.
    pub fn split_equal(&self, parts: usize) -> Result<Vec<BitBlock>> {
        if parts == 0 || !self.len.is_multiple_of(parts) {
            return Err(Error::Sizing(format!(
                "{} bits cannot be split into {} equal parts",
                self.len, parts
            )));
        }
        let size = self.len / parts;
        (0..parts).map(|p| self.slice(p * size, size)).collect()
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Hex encoding, most significant nibble first: bit 0 is the high bit of
    /// the first digit. The final digit is zero-padded when `len % 4 != 0`.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        let mut s = String::with_capacity(digits);
        for d in 0..digits {
            let mut nibble = 0u32;
            for b in 0..4 {
                let i = d * 4 + b;
                nibble <<= 1;
                if i < self.len && self.get(i) {
                    nibble |= 1;
                }
            }
            s.push(std::char::from_digit(nibble, 16).expect("nibble < 16"));
        }
        s
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<BitBlock> {
        if hex.len() != len.div_ceil(4) {
            return Err(Error::Parse(format!(
                "hex string of {} digits cannot hold exactly {} bits",
                hex.len(),
                len
            )));
        }
        let mut block = BitBlock::zeros(len);
        for (d, c) in hex.chars().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))?;
            for b in 0..4 {
                let i = d * 4 + b;
                let bit = (nibble >> (3 - b)) & 1 == 1;
                if i < len {
                    if bit {
                        block.set(i, true);
                    }
                } else if bit {
                    return Err(Error::Parse("nonzero padding bits in hex string".into()));
                }
            }
        }
        Ok(block)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitBlock({})", self.to_bit_string())
    }
}

impl fmt::Display for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// Panics on length mismatch; use [`BitBlock::try_xor_assign`] for checked XOR.
impl BitXorAssign<&BitBlock> for BitBlock {
    fn bitxor_assign(&mut self, rhs: &BitBlock) {
        self.try_xor_assign(rhs).expect("XOR of unequal-length blocks");
    }
}

impl BitXor<&BitBlock> for &BitBlock {
    type Output = BitBlock;

    fn bitxor(self, rhs: &BitBlock) -> BitBlock {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bit_string_round_trip() {
        let b = BitBlock::from_bit_str("1011001").unwrap();
        assert_eq!(b.len(), 7);
        assert!(b.get(0) && !b.get(1) && b.get(6));
        assert_eq!(b.to_bit_string(), "1011001");
        assert!(BitBlock::from_bit_str("10x").is_err());
    }

    #[test]
    fn xor_rejects_unequal_lengths() {
        let a = BitBlock::zeros(3);
        let b = BitBlock::zeros(4);
        assert_eq!(
            a.try_xor(&b),
            Err(Error::LengthMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn hex_layout() {
        let b = BitBlock::from_bit_str("101010").unwrap();
        assert_eq!(b.to_hex(), "a8");
        assert_eq!(BitBlock::from_hex("a8", 6).unwrap(), b);
        assert!(BitBlock::from_hex("a9", 6).is_err());
        assert!(BitBlock::from_hex("a", 6).is_err());
    }

    #[test]
    fn slice_and_extend_cross_word_boundaries() {
        let mut rng = rand::thread_rng();
        let a = BitBlock::random(70, &mut rng);
        let b = BitBlock::random(61, &mut rng);
        let ab = BitBlock::concat([&a, &b]);
        assert_eq!(ab.len(), 131);
        assert_eq!(ab.slice(0, 70).unwrap(), a);
        assert_eq!(ab.slice(70, 61).unwrap(), b);
        assert!(ab.slice(100, 32).is_err());
    }

    proptest! {
        #[test]
        fn xor_is_a_group(bits in prop::collection::vec(any::<(bool, bool, bool)>(), 0..200)) {
            let a = BitBlock::from_bools(&bits.iter().map(|t| t.0).collect::<Vec<_>>());
            let b = BitBlock::from_bools(&bits.iter().map(|t| t.1).collect::<Vec<_>>());
            let c = BitBlock::from_bools(&bits.iter().map(|t| t.2).collect::<Vec<_>>());
            prop_assert_eq!(&(&a ^ &b) ^ &c, &a ^ &(&b ^ &c));
            prop_assert_eq!(&a ^ &b, &b ^ &a);
            prop_assert!((&a ^ &a).is_zero());
        }

        #[test]
        fn hex_round_trip(bits in prop::collection::vec(any::<bool>(), 0..150)) {
            let b = BitBlock::from_bools(&bits);
            prop_assert_eq!(BitBlock::from_hex(&b.to_hex(), b.len()).unwrap(), b);
        }
    }
}
