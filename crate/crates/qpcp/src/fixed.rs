//! Fixed-point proof entries.
//!
//! Probability entries are unsigned with `b` fraction bits and an inclusive
//! top value: raw ∈ [0, 2^b] so both endpoints are exact, stored in b+1 bits
//! rounded up to whole bytes. Raw values above 2^b (possible in the padding
//! head-room of adversarial entries) read back clamped to 2^b; the stored bits
//! themselves survive serialization untouched.
//!
//! Phase entries are a pair of signed components with `b` fraction bits over
//! the range [−2, 2), b+3 bits each rounded up to whole bytes, two's
//! complement. Decoding normalizes the pair to the unit circle; a pair of
//! magnitude below 2^{−b/2} means "no phase stored" and decodes to 1+0i, so
//! every bit pattern decodes to a usable phase.

use num_complex::Complex64;

/// Widest supported fraction count: prob entries need b+1 ≤ 128 stored bits
/// and phase components b+3 ≤ 128, with byte rounding; 120 keeps both inside
/// u128/i128 with whole-byte widths.
pub const MAX_FRACTION_BITS: u32 = 120;

/// Bytes of one probability entry at `b` fraction bits.
pub fn prob_entry_bytes(b: u32) -> usize {
    (b as usize + 1).div_ceil(8)
}

/// Bytes of one phase component at `b` fraction bits (an entry is two).
pub fn phase_component_bytes(b: u32) -> usize {
    (b as usize + 3).div_ceil(8)
}

fn prob_mask(b: u32) -> u128 {
    let bits = prob_entry_bytes(b) * 8;
    if bits >= 128 {
        u128::MAX
    } else {
        (1u128 << bits) - 1
    }
}

fn sign_extend(v: i128, bits: u32) -> i128 {
    debug_assert!(bits >= 8 && bits <= 128);
    v.wrapping_shl(128 - bits) >> (128 - bits)
}

/// 2^e as f64, exact for |e| within the double exponent range.
pub(crate) fn exp2i(e: i32) -> f64 {
    f64::exp2(e as f64)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct FixedProb {
    raw: u128,
}

impl FixedProb {
    /// Wraps raw storage bits, keeping only the entry's byte width.
    pub fn from_raw(raw: u128, b: u32) -> Self {
        FixedProb { raw: raw & prob_mask(b) }
    }

    /// Rounds a probability in [0, 1] to the nearest representable value.
    /// Multiplying a double by 2^b is exact, so the only rounding is the final
    /// one to an integer.
    pub fn encode(p: f64, b: u32) -> Self {
        debug_assert!((0.0..=1.0).contains(&p), "probability {p} out of range");
        let raw = (p * exp2i(b as i32)).round() as u128;
        FixedProb { raw: raw.min(1u128 << b) }
    }

    pub fn raw(&self) -> u128 {
        self.raw
    }

    /// Raw value with the read-side clamp applied.
    pub fn clamped_raw(&self, b: u32) -> u128 {
        self.raw.min(1u128 << b)
    }

    /// The probability this entry denotes.
    pub fn value(&self, b: u32) -> f64 {
        self.clamped_raw(b) as f64 * exp2i(-(b as i32))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct FixedPhase {
    re: i128,
    im: i128,
}

impl FixedPhase {
    /// Wraps raw component bits, sign-extending from the entry's byte width.
    pub fn from_raw(re: i128, im: i128, b: u32) -> Self {
        let bits = (phase_component_bytes(b) * 8) as u32;
        FixedPhase {
            re: sign_extend(re, bits),
            im: sign_extend(im, bits),
        }
    }

    /// Rounds a complex value with components in [−2, 2) to the nearest
    /// representable pair, saturating at the range ends.
    pub fn encode(z: Complex64, b: u32) -> Self {
        let top = 1i128 << (b + 1);
        let enc = |c: f64| -> i128 {
            let raw = (c * exp2i(b as i32)).round() as i128;
            raw.clamp(-top, top - 1)
        };
        FixedPhase { re: enc(z.re), im: enc(z.im) }
    }

    pub fn raw(&self) -> (i128, i128) {
        (self.re, self.im)
    }

    /// Component values before normalization.
    pub fn components(&self, b: u32) -> (f64, f64) {
        let scale = exp2i(-(b as i32));
        (self.re as f64 * scale, self.im as f64 * scale)
    }

    /// The unit phase this entry denotes.
    pub fn decode(&self, b: u32) -> Complex64 {
        let (re, im) = self.components(b);
        let norm = (re * re + im * im).sqrt();
        if norm < f64::exp2(-(b as f64) / 2.0) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(re / norm, im / norm)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prob_endpoints_are_exact() {
        let b = 96;
        assert_eq!(FixedProb::encode(0.0, b).value(b), 0.0);
        assert_eq!(FixedProb::encode(1.0, b).value(b), 1.0);
        assert_eq!(FixedProb::encode(0.5, b).raw(), 1u128 << 95);
    }

    #[test]
    fn prob_reads_clamp_above_one() {
        // 13-byte storage at b = 96 leaves head-room above 2^96.
        let b = 96;
        let over = FixedProb::from_raw((1u128 << 96) + 12345, b);
        assert_eq!(over.value(b), 1.0);
        assert_eq!(over.raw(), (1u128 << 96) + 12345, "stored bits survive");
    }

    #[test]
    fn prob_round_trips_doubles_exactly() {
        // Any f64 probability ≥ 2^-43 has its full mantissa inside b = 96
        // fraction bits, so encode/decode is lossless.
        let b = 96;
        for &p in &[0.3, 0.123456789, 1.0 - 1e-12, 2f64.powi(-40)] {
            assert_eq!(FixedProb::encode(p, b).value(b), p);
        }
    }

    #[test]
    fn phase_sign_extension() {
        let b = 96;
        let minus_one = FixedPhase::encode(Complex64::new(-1.0, 0.0), b);
        let (re, im) = minus_one.raw();
        let back = FixedPhase::from_raw(re, im, b);
        assert_eq!(back, minus_one);
        assert!(re < 0 && im == 0);
    }

    #[test]
    fn phase_decode_normalizes() {
        let b = 32;
        let z = FixedPhase::encode(Complex64::new(0.6, -0.8), b).decode(b);
        assert!((z.norm() - 1.0).abs() < 1e-9);
        assert!((z.re - 0.6).abs() < 1e-8 && (z.im + 0.8).abs() < 1e-8);
    }

    #[test]
    fn tiny_phase_decodes_to_one() {
        let b = 96;
        assert_eq!(
            FixedPhase::from_raw(0, 0, b).decode(b),
            Complex64::new(1.0, 0.0)
        );
        // Just below the 2^{-b/2} cutoff.
        let small = FixedPhase::from_raw(1 << 40, -(1 << 40), b);
        assert_eq!(small.decode(b), Complex64::new(1.0, 0.0));
        // Comfortably above it decodes to its own direction.
        let big = FixedPhase::from_raw(1 << 60, 0, b);
        assert_eq!(big.decode(b), Complex64::new(1.0, 0.0));
        let neg = FixedPhase::from_raw(-(1 << 60), 0, b);
        assert_eq!(neg.decode(b), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn entry_widths_at_default_bits() {
        assert_eq!(prob_entry_bytes(96), 13);
        assert_eq!(phase_component_bytes(96), 13);
        assert_eq!(prob_entry_bytes(16), 3);
        assert_eq!(phase_component_bytes(16), 3);
        assert_eq!(prob_entry_bytes(MAX_FRACTION_BITS), 16);
        assert_eq!(phase_component_bytes(MAX_FRACTION_BITS), 16);
    }
}
