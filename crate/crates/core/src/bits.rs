//! Fixed-width bit strings.
//!
//! Bit `j` of a [`BitString`] is the `j`-th character of its text form and,
//! when the string comes out of a register measurement, the value of the
//! `j`-th listed qubit. Ordering is by length, then by integer value.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_BITS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BitsError {
    #[error("bit string longer than {MAX_BITS} bits")]
    TooLong,
    #[error("invalid character {0:?} in bit string")]
    BadChar(char),
    #[error("invalid hex input")]
    BadHex,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitString {
    len: u8,
    value: u64,
}

fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl BitString {
    /// Bits of `value` above `len` are discarded.
    pub fn new(value: u64, len: usize) -> Self {
        assert!(len <= MAX_BITS, "bit string length {len} exceeds {MAX_BITS}");
        BitString { len: len as u8, value: value & mask(len) }
    }

    pub fn empty() -> Self {
        BitString { len: 0, value: 0 }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(0, len)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn bit(&self, j: usize) -> bool {
        debug_assert!(j < self.len());
        (self.value >> j) & 1 == 1
    }

    /// `self` occupies the low positions, `other` follows.
    pub fn concat(&self, other: &BitString) -> BitString {
        assert!(self.len() + other.len() <= MAX_BITS);
        BitString::new(self.value | other.value.checked_shl(self.len as u32).unwrap_or(0), self.len() + other.len())
    }

    pub fn slice(&self, offset: usize, len: usize) -> BitString {
        assert!(offset + len <= self.len());
        BitString::new(self.value.checked_shr(offset as u32).unwrap_or(0), len)
    }

    /// All strings of the given length in increasing order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 32, "refusing to enumerate 2^{len} strings");
        (0..(1u64 << len)).map(move |v| BitString::new(v, len))
    }

    /// Lowercase hex of the integer value, zero-padded to `ceil(len/4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.len().div_ceil(4).max(1);
        format!("{:0width$x}", self.value, width = digits)
    }

    pub fn from_hex(s: &str, len: usize) -> Result<Self, BitsError> {
        if len > MAX_BITS {
            return Err(BitsError::TooLong);
        }
        let v = u64::from_str_radix(s, 16).map_err(|_| BitsError::BadHex)?;
        if v & !mask(len) != 0 {
            return Err(BitsError::BadHex);
        }
        Ok(BitString::new(v, len))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len() {
            f.write_str(if self.bit(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = BitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() > MAX_BITS {
            return Err(BitsError::TooLong);
        }
        let mut v = 0u64;
        for (j, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v |= 1 << j,
                other => return Err(BitsError::BadChar(other)),
            }
        }
        Ok(BitString::new(v, s.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let b: BitString = "0110".parse().unwrap();
        assert_eq!(b.value(), 0b0110);
        assert_eq!(b.to_string(), "0110");
        let c: BitString = "1000".parse().unwrap();
        assert_eq!(c.value(), 1);
    }

    #[test]
    fn concat_and_slice() {
        let a: BitString = "10".parse().unwrap();
        let b: BitString = "011".parse().unwrap();
        let ab = a.concat(&b);
        assert_eq!(ab.to_string(), "10011");
        assert_eq!(ab.slice(0, 2), a);
        assert_eq!(ab.slice(2, 3), b);
        assert_eq!(BitString::empty().concat(&b), b);
    }

    #[test]
    fn hex_round_trip() {
        let b = BitString::new(0x1f3, 12);
        assert_eq!(b.to_hex(), "1f3");
        assert_eq!(BitString::from_hex("1f3", 12).unwrap(), b);
        assert!(BitString::from_hex("1f3", 8).is_err());
    }

    #[test]
    fn ordering_is_length_then_value() {
        let a = BitString::new(3, 2);
        let b = BitString::new(0, 3);
        assert!(a < b);
        assert!(BitString::new(1, 3) < BitString::new(2, 3));
    }
}
