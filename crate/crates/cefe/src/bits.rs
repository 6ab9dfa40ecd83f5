//! Packed bit vectors over GF(2).
//!
//! Every classical bit string in the library (basis masks, one-time pads,
//! coset representatives, deletion certificates) is a [`BitVec`]. Addition
//! over GF(2) is XOR.

use std::fmt;

use rand::Rng;

/// A fixed-length bit vector packed into 64-bit words, little-endian within
/// each word (bit `i` lives in word `i / 64` at position `i % 64`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in &mut v.words {
            *w = !0;
        }
        v.mask_tail();
        v
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for w in &mut v.words {
            *w = rng.gen();
        }
        v.mask_tail();
        v
    }

    /// Uniform vector of exactly `weight` ones (Fisher-Yates over positions).
    pub fn random_with_weight<R: Rng + ?Sized>(len: usize, weight: usize, rng: &mut R) -> Self {
        assert!(weight <= len, "weight {weight} exceeds length {len}");
        let mut positions: Vec<usize> = (0..len).collect();
        for i in 0..weight {
            let j = rng.gen_range(i..len);
            positions.swap(i, j);
        }
        let mut v = Self::zeros(len);
        for &p in &positions[..weight] {
            v.set(p, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Parse a `0`/`1` string such as `"0110"`.
    pub fn from_str01(s: &str) -> Option<Self> {
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return None,
            }
        }
        Some(v)
    }

    /// Interpret `bytes` as bits, least significant bit of byte 0 first.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Self {
        assert!(len <= bytes.len() * 8);
        let mut v = Self::zeros(len);
        for i in 0..len {
            if bytes[i / 8] >> (i % 8) & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for i in 0..self.len {
            if self.get(i) {
                out[i / 8] |= 1 << (i % 8);
            }
        }
        out
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Positions of set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Concatenation `self || other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in 0..self.len {
            out.set(i, self.get(i));
        }
        for i in 0..other.len {
            out.set(self.len + i, other.get(i));
        }
        out
    }

    pub fn slice(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.len);
        let mut out = Self::zeros(len);
        for i in 0..len {
            out.set(i, self.get(start + i));
        }
        out
    }

    /// Dot product over GF(2).
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    /// Value of the first 64 bits as an integer (bit 0 least significant).
    pub fn as_u64(&self) -> u64 {
        assert!(self.len <= 64);
        if self.words.is_empty() {
            0
        } else {
            self.words[0]
        }
    }

    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value & mask_low(len);
        }
        v
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= mask_low(rem);
            }
        }
    }
}

fn mask_low(bits: usize) -> u64 {
    if bits >= 64 {
        !0
    } else {
        (1u64 << bits) - 1
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn roundtrip_bytes() {
        let v = BitVec::from_str01("1011001110001").unwrap();
        let back = BitVec::from_bytes(&v.to_bytes(), v.len());
        assert_eq!(v, back);
    }

    #[test]
    fn xor_is_involution() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = BitVec::random(97, &mut rng);
            let b = BitVec::random(97, &mut rng);
            assert_eq!(a.xor(&b).xor(&b), a);
        }
    }

    #[test]
    fn fixed_weight_sampling() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..100 {
            let v = BitVec::random_with_weight(40, 13, &mut rng);
            assert_eq!(v.weight(), 13);
        }
    }

    #[test]
    fn concat_slice_roundtrip() {
        let a = BitVec::from_str01("110").unwrap();
        let b = BitVec::from_str01("0101").unwrap();
        let c = a.concat(&b);
        assert_eq!(c.slice(0, 3), a);
        assert_eq!(c.slice(3, 4), b);
    }
}
