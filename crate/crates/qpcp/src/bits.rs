//! Measurement strings and prefix-tree paths.
//!
//! A [`BitString`] is an ordered sequence of up to 64 bits. Position 0 is
//! qubit 0 and is the most significant bit of the packed value, so a full
//! n-bit string read left to right is exactly the binary expansion of its
//! basis-state index. Prefixes of measurement strings (paths into the
//! conditional-probability tree) use the same type with a shorter length.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Hard ceiling on string length; the packed representation is a u64.
pub const MAX_BITS: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: u8,
    /// Low `len` bits hold the string; bit 0 of the string is the MSB of this
    /// window.
    bits: u64,
}

impl BitString {
    pub fn empty() -> Self {
        BitString { len: 0, bits: 0 }
    }

    /// The all-zeros string of length `len`.
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_BITS);
        BitString { len: len as u8, bits: 0 }
    }

    /// Builds a string of length `len` from a basis-state index, qubit 0 first.
    pub fn from_index(index: u64, len: usize) -> Self {
        assert!(len <= MAX_BITS);
        if len < 64 {
            assert!(index < 1u64 << len, "index {index} out of range for {len} bits");
        }
        BitString { len: len as u8, bits: index }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The basis-state index this string spells out (qubit 0 = MSB).
    pub fn index(&self) -> u64 {
        self.bits
    }

    /// Bit at `pos`, counting from qubit 0.
    pub fn bit(&self, pos: usize) -> bool {
        assert!(pos < self.len());
        (self.bits >> (self.len() - 1 - pos)) & 1 == 1
    }

    /// Appends one bit after the current last position.
    pub fn push(&self, bit: bool) -> Self {
        assert!(self.len() < MAX_BITS);
        BitString {
            len: self.len + 1,
            bits: (self.bits << 1) | bit as u64,
        }
    }

    /// The first `len` bits.
    pub fn prefix(&self, len: usize) -> Self {
        assert!(len <= self.len());
        BitString {
            len: len as u8,
            bits: self.bits >> (self.len() - len),
        }
    }

    /// Same string with the bit at `pos` flipped.
    pub fn flip(&self, pos: usize) -> Self {
        assert!(pos < self.len());
        BitString {
            len: self.len,
            bits: self.bits ^ (1 << (self.len() - 1 - pos)),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(|i| self.bit(i))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid bit string {0:?}: only '0'/'1', at most {MAX_BITS} bits")]
pub struct ParseBitStringError(String);

impl FromStr for BitString {
    type Err = ParseBitStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() > MAX_BITS {
            return Err(ParseBitStringError(s.to_owned()));
        }
        let mut out = BitString::empty();
        for c in s.chars() {
            match c {
                '0' => out = out.push(false),
                '1' => out = out.push(true),
                _ => return Err(ParseBitStringError(s.to_owned())),
            }
        }
        Ok(out)
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
