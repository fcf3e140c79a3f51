//! Seeded randomness with logical bit accounting.
//!
//! Everything random in this crate flows through [`BitRng`]: a ChaCha20
//! stream keyed by a 128-bit seed, handing out bits one logical draw at a
//! time and counting them. The count is part of the verifier's reported
//! cost, so draws are sized exactly — a Bernoulli sample at `k` fraction
//! bits consumes `k` bits, no more.
//!
//! Parallel experiment trials each get their own [`BitRng::substream`],
//! which is independent of thread scheduling: stream `i` produces the same
//! bits whether trials run serially or on a work-stealing pool.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Debug, thiserror::Error)]
#[error("seed must be 1..=32 hex digits (optionally 0x-prefixed), got {got:?}")]
pub struct ParseSeedError {
    got: String,
}

/// Parses a 128-bit seed written in hex, e.g. `"2a"` or `"0xdeadbeef"`.
pub fn seed_from_hex(s: &str) -> Result<u128, ParseSeedError> {
    let digits = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
    if digits.is_empty() || digits.len() > 32 {
        return Err(ParseSeedError { got: s.to_string() });
    }
    u128::from_str_radix(digits, 16).map_err(|_| ParseSeedError { got: s.to_string() })
}

pub struct BitRng {
    rng: ChaCha20Rng,
    key: [u8; 32],
    /// Unconsumed low bits of the last generator word.
    buf: u64,
    buf_len: u32,
    bits_drawn: u64,
}

impl BitRng {
    /// Stream 0 of the generator keyed by `seed`.
    pub fn from_seed(seed: u128) -> Self {
        let mut key = [0u8; 32];
        key[..16].copy_from_slice(&seed.to_le_bytes());
        BitRng { rng: ChaCha20Rng::from_seed(key), key, buf: 0, buf_len: 0, bits_drawn: 0 }
    }

    /// A fresh generator on stream `index` of the same key, starting from
    /// position zero with its own bit count.
    pub fn substream(&self, index: u64) -> Self {
        let mut rng = ChaCha20Rng::from_seed(self.key);
        rng.set_stream(index);
        BitRng { rng, key: self.key, buf: 0, buf_len: 0, bits_drawn: 0 }
    }

    /// Logical bits handed out so far.
    pub fn bits_drawn(&self) -> u64 {
        self.bits_drawn
    }

    /// The next `k` bits (0 < k ≤ 128) as an integer. The stream is
    /// little-endian: the earliest bit lands in the lowest position, so a
    /// run of single-bit draws reads the same bits as one wide draw.
    pub fn draw_bits(&mut self, k: u32) -> u128 {
        assert!(k >= 1 && k <= 128, "draw size {k} outside 1..=128");
        self.bits_drawn += u64::from(k);
        let mut out: u128 = 0;
        let mut filled = 0u32;
        while filled < k {
            if self.buf_len == 0 {
                self.buf = self.rng.next_u64();
                self.buf_len = 64;
            }
            let take = (k - filled).min(self.buf_len);
            let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
            out |= u128::from(self.buf & mask) << filled;
            self.buf = if take == 64 { 0 } else { self.buf >> take };
            self.buf_len -= take;
            filled += take;
        }
        out
    }

    pub fn draw_bit(&mut self) -> bool {
        self.draw_bits(1) == 1
    }

    /// Bernoulli trial at probability `threshold / 2^k`, consuming exactly
    /// `k` bits: true iff the drawn k-bit integer is below the threshold.
    pub fn bernoulli_scaled(&mut self, threshold: u128, k: u32) -> bool {
        self.draw_bits(k) < threshold
    }

    /// Uniform draw from [0, bound) by rejection on ⌈log₂ bound⌉-bit words.
    pub fn draw_index(&mut self, bound: u64) -> u64 {
        assert!(bound >= 1);
        if bound == 1 {
            return 0;
        }
        let k = 64 - (bound - 1).leading_zeros();
        loop {
            let v = self.draw_bits(k) as u64;
            if v < bound {
                return v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_accounting_is_exact() {
        let mut r = BitRng::from_seed(1);
        r.draw_bits(7);
        r.draw_bits(64);
        r.draw_bits(128);
        r.draw_bit();
        assert_eq!(r.bits_drawn(), 7 + 64 + 128 + 1);
    }

    #[test]
    fn draws_are_deterministic_and_substreams_differ() {
        let mut a = BitRng::from_seed(42);
        let mut b = BitRng::from_seed(42);
        let seq_a: Vec<u128> = (1..=32).map(|k| a.draw_bits(k)).collect();
        let seq_b: Vec<u128> = (1..=32).map(|k| b.draw_bits(k)).collect();
        assert_eq!(seq_a, seq_b);

        let mut s1 = a.substream(1);
        let mut s2 = a.substream(2);
        let mut s1_again = b.substream(1);
        let x1 = s1.draw_bits(64);
        assert_eq!(x1, s1_again.draw_bits(64));
        assert_ne!(x1, s2.draw_bits(64));
    }

    #[test]
    fn draw_bits_chunks_match_a_flat_bitstream() {
        // Slicing the stream as 3+5+13 must yield the same bits as 21 at
        // once: the buffer never drops or reorders bits.
        let mut whole = BitRng::from_seed(7);
        let mut parts = BitRng::from_seed(7);
        let w = whole.draw_bits(21);
        let first = parts.draw_bits(3);
        let second = parts.draw_bits(5);
        let third = parts.draw_bits(13);
        assert_eq!(w, first | (second << 3) | (third << 8));

        // 70 bits crosses a 64-bit refill boundary.
        let mut whole = BitRng::from_seed(8);
        let mut parts = BitRng::from_seed(8);
        let w = whole.draw_bits(70);
        let a = parts.draw_bits(64);
        let b = parts.draw_bits(6);
        assert_eq!(w, a | (b << 64));
    }

    #[test]
    fn bernoulli_threshold_edges() {
        let mut r = BitRng::from_seed(3);
        for _ in 0..200 {
            assert!(!r.bernoulli_scaled(0, 17), "probability 0 never fires");
        }
        for _ in 0..200 {
            assert!(r.bernoulli_scaled(1 << 17, 17), "probability 1 always fires");
        }
    }

    #[test]
    fn bernoulli_frequency_tracks_threshold() {
        let mut r = BitRng::from_seed(4);
        let k = 20;
        let threshold = 3u128 << (k - 2); // p = 3/4
        let hits = (0..20_000).filter(|_| r.bernoulli_scaled(threshold, k)).count();
        let p_hat = hits as f64 / 20_000.0;
        assert!((p_hat - 0.75).abs() < 0.01, "p_hat = {p_hat}");
    }

    #[test]
    fn draw_index_is_in_range_and_roughly_uniform() {
        let mut r = BitRng::from_seed(5);
        let mut counts = [0u32; 5];
        for _ in 0..25_000 {
            counts[r.draw_index(5) as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 - 5000.0).abs() < 300.0, "counts {counts:?}");
        }
        assert_eq!(r.draw_index(1), 0);
    }

    #[test]
    fn seed_hex_parsing() {
        assert_eq!(seed_from_hex("2a").unwrap(), 0x2a);
        assert_eq!(seed_from_hex("0xDEADBEEF").unwrap(), 0xdead_beef);
        assert_eq!(
            seed_from_hex("ffffffffffffffffffffffffffffffff").unwrap(),
            u128::MAX
        );
        assert!(seed_from_hex("").is_err());
        assert!(seed_from_hex("0x").is_err());
        assert!(seed_from_hex("123456789012345678901234567890123").is_err());
        assert!(seed_from_hex("zz").is_err());
    }
}
