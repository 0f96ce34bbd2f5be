//! Packed bit strings.
//!
//! Everything in this crate — programs, tapes, machine values, encodings —
//! is a finite string over {0,1}. `Bits` packs them MSB-first into bytes and
//! fixes the two orders the rest of the crate relies on:
//!
//! * the canonical order (shorter first, then lexicographic), which is the
//!   `Ord` implementation and the order used whenever a deterministic
//!   enumeration, merge, or tie-break is required;
//! * the branch order `left_of`, which compares two strings by the first
//!   position where one continues with 0 and the other with 1.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// A finite string of bits. Bit 0 is the leftmost bit.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Bits {
    bytes: Vec<u8>,
    len: usize,
}

impl Bits {
    pub const fn new() -> Self {
        Bits { bytes: Vec::new(), len: 0 }
    }

    pub fn with_capacity(bits: usize) -> Self {
        Bits { bytes: Vec::with_capacity(bits.div_ceil(8)), len: 0 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        if i >= self.len {
            return None;
        }
        Some(self.bytes[i / 8] & (0x80 >> (i % 8)) != 0)
    }

    /// Panicking index for internal hot paths.
    #[inline]
    pub fn at(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        if bit {
            let i = self.len;
            self.bytes[i / 8] |= 0x80 >> (i % 8);
        }
        self.len += 1;
    }

    pub fn pop(&mut self) -> Option<bool> {
        if self.len == 0 {
            return None;
        }
        let bit = self.at(self.len - 1);
        if bit {
            let i = self.len - 1;
            self.bytes[i / 8] &= !(0x80 >> (i % 8));
        }
        self.len -= 1;
        if self.bytes.len() > self.len.div_ceil(8) {
            self.bytes.pop();
        }
        Some(bit)
    }

    pub fn extend(&mut self, other: &Bits) {
        for i in 0..other.len {
            self.push(other.at(i));
        }
    }

    pub fn concat(&self, other: &Bits) -> Bits {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    /// `self` repeated `n` times.
    pub fn repeat(&self, n: usize) -> Bits {
        let mut out = Bits::with_capacity(self.len * n);
        for _ in 0..n {
            out.extend(self);
        }
        out
    }

    /// First `n` bits; the whole string if `n >= len`.
    pub fn take(&self, n: usize) -> Bits {
        let n = n.min(self.len);
        let mut out = Bits::with_capacity(n);
        for i in 0..n {
            out.push(self.at(i));
        }
        out
    }

    /// Everything after the first `n` bits; empty if `n >= len`.
    pub fn drop_front(&self, n: usize) -> Bits {
        let n = n.min(self.len);
        let mut out = Bits::with_capacity(self.len - n);
        for i in n..self.len {
            out.push(self.at(i));
        }
        out
    }

    /// Bitwise complement.
    pub fn flipped(&self) -> Bits {
        let mut out = Bits::with_capacity(self.len);
        for i in 0..self.len {
            out.push(!self.at(i));
        }
        out
    }

    /// The string without its final bit. Panics on the empty string.
    pub fn parent(&self) -> Bits {
        assert!(self.len > 0, "empty string has no parent");
        self.take(self.len - 1)
    }

    pub fn is_prefix_of(&self, other: &Bits) -> bool {
        if self.len > other.len {
            return false;
        }
        (0..self.len).all(|i| self.at(i) == other.at(i))
    }

    pub fn is_proper_prefix_of(&self, other: &Bits) -> bool {
        self.len < other.len && self.is_prefix_of(other)
    }

    /// Branch order: true iff some prefix x has `x0` prefixing `self` and
    /// `x1` prefixing `other`. Strings on the same root-to-leaf path are
    /// incomparable under this relation.
    pub fn left_of(&self, other: &Bits) -> bool {
        let n = self.len.min(other.len);
        for i in 0..n {
            let (a, b) = (self.at(i), other.at(i));
            if a != b {
                return !a && b;
            }
        }
        false
    }

    /// Value of the string read as a plain binary numeral ("011" -> 3,
    /// "" -> 0). Leading zeros do not change the value.
    pub fn numeral_value(&self) -> BigUint {
        let mut v = BigUint::zero();
        for i in 0..self.len {
            v <<= 1u8;
            if self.at(i) {
                v += 1u8;
            }
        }
        v
    }

    /// The length-`n` numeral of `v`, most significant bit first.
    /// Panics if `v` does not fit.
    pub fn numeral(v: &BigUint, n: usize) -> Bits {
        assert!(v.bits() as usize <= n, "numeral overflow");
        let mut out = Bits::with_capacity(n);
        for i in (0..n).rev() {
            out.push(v.bit(i as u64));
        }
        out
    }

    /// Position of this string in the canonical (length, then lex) order of
    /// all strings: "" -> 0, "0" -> 1, "1" -> 2, "00" -> 3, ...
    pub fn rank(&self) -> BigUint {
        // 2^len + value - 1
        let mut v = BigUint::one() << self.len;
        v += self.numeral_value();
        v - 1u8
    }

    /// Inverse of [`Bits::rank`].
    pub fn from_rank(rank: &BigUint) -> Bits {
        let r = rank + 1u8;
        let n = r.bits() as usize - 1;
        let v = r - (BigUint::one() << n);
        Bits::numeral(&v, n)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.at(i))
    }

    /// All strings of the given length, in numeral (lex) order.
    pub fn all_of_len(n: usize) -> Vec<Bits> {
        assert!(n < usize::BITS as usize - 1, "length too large to enumerate");
        (0..1usize << n)
            .map(|v| Bits::numeral(&BigUint::from(v), n))
            .collect()
    }

    pub fn packed_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn from_packed(bytes: &[u8], len: usize) -> Option<Bits> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        // Trailing padding bits must be zero so equal strings stay
        // byte-identical.
        if len % 8 != 0 {
            let mask = 0xffu8 >> (len % 8);
            if bytes[bytes.len() - 1] & mask != 0 {
                return None;
            }
        }
        Some(Bits { bytes: bytes.to_vec(), len })
    }
}

/// Canonical order: by length, then lexicographic.
impl Ord for Bits {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.bytes.cmp(&other.bytes))
    }
}

impl PartialOrd for Bits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b\"{self}\"")
    }
}

/// Parse from a string of `0`/`1` characters (empty allowed).
impl core::str::FromStr for Bits {
    type Err = ParseBitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Bits::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                _ => return Err(ParseBitsError(c)),
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseBitsError(pub char);

impl fmt::Display for ParseBitsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid bit character {:?}", self.0)
    }
}

/// Convenience constructor used pervasively in tests.
pub fn bits(s: &str) -> Bits {
    s.parse().expect("literal must be a 0/1 string")
}

impl FromIterator<bool> for Bits {
    fn from_iter<T: IntoIterator<Item = bool>>(iter: T) -> Self {
        let mut out = Bits::new();
        for b in iter {
            out.push(b);
        }
        out
    }
}

pub fn to_string(b: &Bits) -> String {
    use alloc::string::ToString;
    b.to_string()
}
