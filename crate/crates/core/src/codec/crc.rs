//! Bit-serial CRC over GF(2).
//!
//! A generator of degree `len` is given by the mask of its non-leading
//! coefficients: `g(x) = x^len + Σ_t poly_t·x^t`. The register starts at
//! zero, bits enter most significant first, and there is no reflection or
//! final XOR, so the result is the remainder of `payload(x)·x^len` mod `g`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrcSpec {
    pub poly: u64,
    pub len: u32,
}

impl CrcSpec {
    /// The 12-bit generator `0xC06`.
    pub const CRC12: CrcSpec = CrcSpec {
        poly: 0xC06,
        len: 12,
    };

    pub fn new(poly: u64, len: u32) -> Result<Self> {
        if len == 0 || len > 63 {
            return Err(Error::Domain(format!("CRC length {len} not in 1..=63")));
        }
        if poly >> len != 0 {
            return Err(Error::Domain(format!(
                "polynomial mask {poly:#x} exceeds {len} bits"
            )));
        }
        Ok(CrcSpec { poly, len })
    }

    pub fn compute(&self, payload: &[u8]) -> Vec<u8> {
        crc_compute(payload, self.poly, self.len)
    }

    pub fn check(&self, word: &[u8]) -> bool {
        crc_check(word, self.poly, self.len)
    }
}

/// CRC bits of `payload`, most significant first.
pub fn crc_compute(payload: &[u8], poly: u64, len: u32) -> Vec<u8> {
    let top = 1u64 << (len - 1);
    let full = (top << 1).wrapping_sub(1);
    let mut reg = 0u64;
    for &b in payload {
        let feedback = (u64::from(b & 1) != 0) != (reg & top != 0);
        reg = (reg << 1) & full;
        if feedback {
            reg ^= poly;
        }
    }
    (0..len).rev().map(|t| ((reg >> t) & 1) as u8).collect()
}

/// Whether the last `len` bits of `word` are the CRC of the rest.
pub fn crc_check(word: &[u8], poly: u64, len: u32) -> bool {
    let len_us = len as usize;
    if word.len() < len_us {
        return false;
    }
    let (payload, tail) = word.split_at(word.len() - len_us);
    crc_compute(payload, poly, len) == tail
}
