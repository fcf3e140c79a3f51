//! The proof object: per-gate segments encoding each statevector as a prefix
//! tree of conditional probabilities plus a phase per measurement string.
//!
//! Segment i holds, for every prefix w with 0 ≤ |w| ≤ n−1, the fixed-point
//! probability that the next measured bit is 1 given w (the 0-branch is never
//! stored; readers take the complement), and for every full string x a phase
//! entry. Any bit pattern whatsoever decodes to a normalized state: the
//! conditional products telescope to 1 regardless of entry values, which is
//! what makes spot-checking sound — there is no such thing as a syntactically
//! invalid proof, only a dishonest one.
//!
//! Entry addressing is flat: segments in order, within a segment the prob
//! entries by (prefix length, then lexicographic), then the phase entries by
//! string. All reads go through [`ProofAccess`], which meters and (optionally)
//! traces them; the verifier never touches a proof any other way.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::fixed::{
    phase_component_bytes, prob_entry_bytes, FixedPhase, FixedProb, MAX_FRACTION_BITS,
};
use crate::sim::StateVector;

const MAGIC: &[u8; 4] = b"QPCP";
const VERSION: u32 = 1;
const HEADER_BYTES: usize = 18;

/// Normalization slack accepted by the honest prover, and guaranteed by
/// decoding.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum ProofError {
    #[error("bad magic (not a proof file)")]
    BadMagic,
    #[error("unsupported proof format version {got}")]
    BadVersion { got: u32 },
    #[error("file length {got} does not match header dimensions (expected {expected})")]
    Truncated { expected: u128, got: usize },
    #[error("bad proof dimensions: {reason}")]
    BadDims { reason: String },
    #[error("address {addr:?} invalid for proof with n={n}, m={m}")]
    InvalidAddress { addr: ProofAddress, n: usize, m: usize },
    #[error("entry kind mismatch at {addr:?}")]
    KindMismatch { addr: ProofAddress },
    #[error("prover answer list exhausted after {answered} entries")]
    AnswersExhausted { answered: usize },
    #[error("input state {index} is not normalized (‖·‖² = {norm_sqr})")]
    Unnormalized { index: usize, norm_sqr: f64 },
    #[error("states have mixed qubit counts")]
    MixedQubitCounts,
    #[error("fraction bits {b} outside supported range 1..={MAX_FRACTION_BITS}")]
    BadFractionBits { b: u32 },
}

/// Shape of a proof: qubit count, gate count, fraction bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProofDims {
    pub n: usize,
    pub m: usize,
    pub b: u32,
}

impl ProofDims {
    pub fn validate(&self) -> Result<(), ProofError> {
        if self.n < 1 || self.n > 63 {
            return Err(ProofError::BadDims { reason: format!("n = {} outside 1..=63", self.n) });
        }
        if self.b < 1 || self.b > MAX_FRACTION_BITS {
            return Err(ProofError::BadFractionBits { b: self.b });
        }
        Ok(())
    }

    pub fn prob_entries_per_segment(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    pub fn phase_entries_per_segment(&self) -> u64 {
        1u64 << self.n
    }

    /// Entries per segment: 2^{n+1} − 1.
    pub fn entries_per_segment(&self) -> u64 {
        (1u64 << (self.n + 1)) - 1
    }

    /// Total entry count N = (m+1)(2^{n+1} − 1), the flat address space.
    pub fn total_entries(&self) -> u64 {
        (self.m as u64 + 1) * self.entries_per_segment()
    }

    /// Exact on-disk size.
    pub fn file_bytes(&self) -> u128 {
        let per_segment = self.prob_entries_per_segment() as u128
            * prob_entry_bytes(self.b) as u128
            + self.phase_entries_per_segment() as u128 * 2 * phase_component_bytes(self.b) as u128;
        HEADER_BYTES as u128 + (self.m as u128 + 1) * per_segment
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AddressKind {
    /// The stored p_{·,1|w} for a prefix w, 0 ≤ |w| ≤ n−1.
    Prob(BitString),
    /// The phase entry for a full n-bit string.
    Phase(BitString),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ProofAddress {
    pub segment: usize,
    pub kind: AddressKind,
}

impl ProofAddress {
    pub fn prob(segment: usize, prefix: BitString) -> Self {
        ProofAddress { segment, kind: AddressKind::Prob(prefix) }
    }

    pub fn phase(segment: usize, x: BitString) -> Self {
        ProofAddress { segment, kind: AddressKind::Phase(x) }
    }

    pub fn is_valid(&self, dims: &ProofDims) -> bool {
        if self.segment > dims.m {
            return false;
        }
        match self.kind {
            AddressKind::Prob(w) => w.len() < dims.n,
            AddressKind::Phase(x) => x.len() == dims.n,
        }
    }

    /// Position in the flat address space [0, N): segments in order; inside a
    /// segment, prob entries by (length, lexicographic) — the prefix w sits at
    /// (2^|w| − 1) + w — then phase entries by string.
    pub fn flat_index(&self, dims: &ProofDims) -> u64 {
        debug_assert!(self.is_valid(dims));
        let base = self.segment as u64 * dims.entries_per_segment();
        let offset = match self.kind {
            AddressKind::Prob(w) => (1u64 << w.len()) - 1 + w.index(),
            AddressKind::Phase(x) => dims.prob_entries_per_segment() + x.index(),
        };
        base + offset
    }

    pub fn from_flat(dims: &ProofDims, flat: u64) -> Result<Self, ProofError> {
        if flat >= dims.total_entries() {
            return Err(ProofError::BadDims {
                reason: format!("flat index {flat} out of range {}", dims.total_entries()),
            });
        }
        let per = dims.entries_per_segment();
        let segment = (flat / per) as usize;
        let offset = flat % per;
        let kind = if offset < dims.prob_entries_per_segment() {
            // Offsets for prefixes of length k span [2^k − 1, 2^{k+1} − 2].
            let len = (offset + 1).ilog2() as usize;
            let value = offset - ((1u64 << len) - 1);
            AddressKind::Prob(BitString::from_index(value, len))
        } else {
            let value = offset - dims.prob_entries_per_segment();
            AddressKind::Phase(BitString::from_index(value, dims.n))
        };
        Ok(ProofAddress { segment, kind })
    }
}

/// One proof entry as raw bits; equality is raw-bit equality.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EntryValue {
    Prob(FixedProb),
    Phase(FixedPhase),
}

impl EntryValue {
    pub fn matches_kind(&self, kind: &AddressKind) -> bool {
        matches!(
            (self, kind),
            (EntryValue::Prob(_), AddressKind::Prob(_)) | (EntryValue::Phase(_), AddressKind::Phase(_))
        )
    }

    /// The entry's file-format bytes (little-endian; phases re then im).
    pub fn file_bytes(&self, b: u32) -> Vec<u8> {
        match self {
            EntryValue::Prob(p) => p.raw().to_le_bytes()[..prob_entry_bytes(b)].to_vec(),
            EntryValue::Phase(ph) => {
                let w = phase_component_bytes(b);
                let (re, im) = ph.raw();
                let mut out = Vec::with_capacity(2 * w);
                out.extend_from_slice(&(re as u128).to_le_bytes()[..w]);
                out.extend_from_slice(&(im as u128).to_le_bytes()[..w]);
                out
            }
        }
    }

    pub fn hex(&self, b: u32) -> String {
        hex::encode(self.file_bytes(b))
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Segment {
    /// Indexed by (2^|w| − 1) + w, i.e. flat layout order.
    probs: Vec<FixedProb>,
    /// Indexed by x.
    phases: Vec<FixedPhase>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PcpProof {
    dims: ProofDims,
    segments: Vec<Segment>,
}

fn prob_slot(w: &BitString) -> usize {
    (1usize << w.len()) - 1 + w.index() as usize
}

impl PcpProof {
    pub fn dims(&self) -> ProofDims {
        self.dims
    }

    pub fn prob(&self, segment: usize, w: &BitString) -> FixedProb {
        self.segments[segment].probs[prob_slot(w)]
    }

    pub fn phase(&self, segment: usize, x: &BitString) -> FixedPhase {
        debug_assert_eq!(x.len(), self.dims.n);
        self.segments[segment].phases[x.index() as usize]
    }

    pub fn entry(&self, addr: &ProofAddress) -> Result<EntryValue, ProofError> {
        if !addr.is_valid(&self.dims) {
            return Err(ProofError::InvalidAddress {
                addr: *addr,
                n: self.dims.n,
                m: self.dims.m,
            });
        }
        Ok(match addr.kind {
            AddressKind::Prob(w) => EntryValue::Prob(self.prob(addr.segment, &w)),
            AddressKind::Phase(x) => EntryValue::Phase(self.phase(addr.segment, &x)),
        })
    }

    pub fn set_entry(&mut self, addr: &ProofAddress, value: EntryValue) -> Result<(), ProofError> {
        if !addr.is_valid(&self.dims) {
            return Err(ProofError::InvalidAddress {
                addr: *addr,
                n: self.dims.n,
                m: self.dims.m,
            });
        }
        if !value.matches_kind(&addr.kind) {
            return Err(ProofError::KindMismatch { addr: *addr });
        }
        match (addr.kind, value) {
            (AddressKind::Prob(w), EntryValue::Prob(p)) => {
                self.segments[addr.segment].probs[prob_slot(&w)] = p;
            }
            (AddressKind::Phase(x), EntryValue::Phase(ph)) => {
                self.segments[addr.segment].phases[x.index() as usize] = ph;
            }
            _ => unreachable!("kind checked above"),
        }
        Ok(())
    }

    /// Replaces segment `i` with the honest encoding of `state`.
    pub fn replace_segment(&mut self, i: usize, state: &StateVector) -> Result<(), ProofError> {
        if state.n() != self.dims.n {
            return Err(ProofError::MixedQubitCounts);
        }
        check_normalized(i, state)?;
        self.segments[i] = encode_segment(state, self.dims.b);
        Ok(())
    }

    /// Every entry zero: probs raw 0, phases raw (0, 0). Decodes to |0ⁿ⟩
    /// with unit phases in every segment.
    pub fn zeroed(dims: ProofDims) -> Result<Self, ProofError> {
        dims.validate()?;
        let segment = Segment {
            probs: vec![FixedProb::from_raw(0, dims.b); dims.prob_entries_per_segment() as usize],
            phases: vec![
                FixedPhase::from_raw(0, 0, dims.b);
                dims.phase_entries_per_segment() as usize
            ],
        };
        Ok(PcpProof { dims, segments: vec![segment; dims.m + 1] })
    }

    /// Uniformly random storage bits in every entry.
    pub fn random(dims: ProofDims, rng: &mut impl Rng) -> Result<Self, ProofError> {
        dims.validate()?;
        let segments = (0..=dims.m)
            .map(|_| {
                let probs = (0..dims.prob_entries_per_segment())
                    .map(|_| FixedProb::from_raw(rng.random::<u128>(), dims.b))
                    .collect();
                let phases = (0..dims.phase_entries_per_segment())
                    .map(|_| {
                        FixedPhase::from_raw(rng.random::<u128>() as i128, rng.random::<u128>() as i128, dims.b)
                    })
                    .collect();
                Segment { probs, phases }
            })
            .collect();
        Ok(PcpProof { dims, segments })
    }

    // -- decoding ----------------------------------------------------------

    /// The state segment `i` denotes. Total on every bit pattern, and always
    /// normalized up to float rounding: the stored 1-branch probability and
    /// its computed complement sum to one by construction, so the leaf
    /// products telescope.
    pub fn decode_state(&self, i: usize) -> StateVector {
        let n = self.dims.n;
        let b = self.dims.b;
        let seg = &self.segments[i];
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
        // Depth-first, carrying the running product in path order so each
        // leaf reproduces compute-amplitude's float sequence exactly.
        let mut stack: Vec<(BitString, f64)> = vec![(BitString::empty(), 1.0f64)];
        while let Some((w, acc)) = stack.pop() {
            if w.len() == n {
                amps[w.index() as usize] =
                    leaf_amplitude(seg.phases[w.index() as usize], acc, b);
            } else {
                let p1 = seg.probs[prob_slot(&w)].value(b);
                stack.push((w.push(true), acc * p1));
                stack.push((w.push(false), acc * (1.0 - p1)));
            }
        }
        StateVector::from_amplitudes(n, amps).expect("dimension correct by construction")
    }
}

/// Final step shared by decoding and the verifier's amplitude computation:
/// identical expression, so the two agree bit for bit.
#[inline]
pub(crate) fn leaf_amplitude(phase: FixedPhase, prob_product: f64, b: u32) -> Complex64 {
    phase.decode(b) * prob_product.sqrt()
}

/// Amplitude from a phase entry and the conditional entries along x's path:
/// element k of `path` is (stored 1-branch entry at x's length-k prefix, bit
/// x_k actually taken).
pub fn amplitude_from_path(phase: FixedPhase, path: &[(FixedProb, bool)], b: u32) -> Complex64 {
    let mut acc = 1.0f64;
    for (entry, bit) in path {
        let p1 = entry.value(b);
        acc = acc * if *bit { p1 } else { 1.0 - p1 };
    }
    leaf_amplitude(phase, acc, b)
}

fn check_normalized(index: usize, state: &StateVector) -> Result<(), ProofError> {
    let norm_sqr = state.norm_sqr();
    if (norm_sqr - 1.0).abs() > NORM_TOL {
        return Err(ProofError::Unnormalized { index, norm_sqr });
    }
    Ok(())
}

fn encode_segment(state: &StateVector, b: u32) -> Segment {
    let n = state.n();
    // Subtree masses bottom-up: level k holds Σ_y |α_{wy}|² for |w| = k.
    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    levels.push(state.amplitudes().iter().map(|a| a.norm_sqr()).collect());
    for _ in 0..n {
        let prev = levels.last().unwrap();
        let next: Vec<f64> = (0..prev.len() / 2).map(|w| prev[2 * w] + prev[2 * w + 1]).collect();
        levels.push(next);
    }
    levels.reverse(); // levels[k] now indexed by prefixes of length k

    let mut probs = Vec::with_capacity((1usize << n) - 1);
    for k in 0..n {
        for w in 0..(1usize << k) {
            let denom = levels[k][w];
            let p1 = if denom == 0.0 { 0.0 } else { levels[k + 1][2 * w + 1] / denom };
            probs.push(FixedProb::encode(p1, b));
        }
    }

    let phases = state
        .amplitudes()
        .iter()
        .map(|a| {
            if a.norm_sqr() == 0.0 {
                FixedPhase::encode(Complex64::new(1.0, 0.0), b)
            } else {
                FixedPhase::encode(a / a.norm(), b)
            }
        })
        .collect();

    Segment { probs, phases }
}

/// Encodes the full trace of a computation: one segment per state, in order.
pub fn build_honest_proof(states: &[StateVector], b: u32) -> Result<PcpProof, ProofError> {
    if b < 16 || b > MAX_FRACTION_BITS {
        return Err(ProofError::BadFractionBits { b });
    }
    let n = states.first().ok_or(ProofError::MixedQubitCounts)?.n();
    for (i, st) in states.iter().enumerate() {
        if st.n() != n {
            return Err(ProofError::MixedQubitCounts);
        }
        check_normalized(i, st)?;
    }
    let dims = ProofDims { n, m: states.len() - 1, b };
    dims.validate()?;
    let segments: Vec<Segment> = states.par_iter().map(|st| encode_segment(st, b)).collect();
    Ok(PcpProof { dims, segments })
}

// ---------------------------------------------------------------------------
// File format

impl PcpProof {
    pub fn serialize(&self) -> Vec<u8> {
        let d = &self.dims;
        let wp = prob_entry_bytes(d.b);
        let wph = phase_component_bytes(d.b);
        let mut out = Vec::with_capacity(d.file_bytes() as usize);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(d.n as u16).to_le_bytes());
        out.extend_from_slice(&(d.m as u32).to_le_bytes());
        out.extend_from_slice(&(d.b as u16).to_le_bytes());
        out.extend_from_slice(&0u16.to_le_bytes());
        for seg in &self.segments {
            for p in &seg.probs {
                out.extend_from_slice(&p.raw().to_le_bytes()[..wp]);
            }
            for ph in &seg.phases {
                let (re, im) = ph.raw();
                out.extend_from_slice(&(re as u128).to_le_bytes()[..wph]);
                out.extend_from_slice(&(im as u128).to_le_bytes()[..wph]);
            }
        }
        debug_assert_eq!(out.len() as u128, d.file_bytes());
        out
    }

    pub fn deserialize(data: &[u8]) -> Result<Self, ProofError> {
        if data.len() < HEADER_BYTES {
            return Err(if data.starts_with(MAGIC) || MAGIC.starts_with(&data[..data.len().min(4)]) {
                ProofError::Truncated { expected: HEADER_BYTES as u128, got: data.len() }
            } else {
                ProofError::BadMagic
            });
        }
        if &data[0..4] != MAGIC {
            return Err(ProofError::BadMagic);
        }
        let version = u32::from_le_bytes(data[4..8].try_into().unwrap());
        if version != VERSION {
            return Err(ProofError::BadVersion { got: version });
        }
        let n = u16::from_le_bytes(data[8..10].try_into().unwrap()) as usize;
        let m = u32::from_le_bytes(data[10..14].try_into().unwrap()) as usize;
        let b = u16::from_le_bytes(data[14..16].try_into().unwrap()) as u32;
        let reserved = u16::from_le_bytes(data[16..18].try_into().unwrap());
        if reserved != 0 {
            return Err(ProofError::BadDims { reason: format!("reserved field = {reserved}") });
        }
        let dims = ProofDims { n, m, b };
        dims.validate()?;
        let expected = dims.file_bytes();
        if expected != data.len() as u128 {
            return Err(ProofError::Truncated { expected, got: data.len() });
        }

        let wp = prob_entry_bytes(b);
        let wph = phase_component_bytes(b);
        let mut pos = HEADER_BYTES;
        let read_uint = |width: usize, pos: &mut usize| -> u128 {
            let mut buf = [0u8; 16];
            buf[..width].copy_from_slice(&data[*pos..*pos + width]);
            *pos += width;
            u128::from_le_bytes(buf)
        };
        let mut segments = Vec::with_capacity(m + 1);
        for _ in 0..=m {
            let probs = (0..dims.prob_entries_per_segment())
                .map(|_| FixedProb::from_raw(read_uint(wp, &mut pos), b))
                .collect();
            let phases = (0..dims.phase_entries_per_segment())
                .map(|_| {
                    let re = read_uint(wph, &mut pos) as i128;
                    let im = read_uint(wph, &mut pos) as i128;
                    FixedPhase::from_raw(re, im, b)
                })
                .collect();
            segments.push(Segment { probs, phases });
        }
        Ok(PcpProof { dims, segments })
    }
}

// ---------------------------------------------------------------------------
// Metered access

/// Where proof entries come from: an in-memory proof, or (in the two-prover
/// protocol) a scripted answer feed standing in for the first prover.
pub trait ProofSource {
    fn dims(&self) -> ProofDims;
    fn fetch(&mut self, addr: &ProofAddress) -> Result<EntryValue, ProofError>;
}

impl ProofSource for &PcpProof {
    fn dims(&self) -> ProofDims {
        PcpProof::dims(self)
    }

    fn fetch(&mut self, addr: &ProofAddress) -> Result<EntryValue, ProofError> {
        self.entry(addr)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub addr: ProofAddress,
    pub value: EntryValue,
}

/// The verifier's only window onto a proof: every read is metered, and traced
/// unless tracing was turned off for bulk experiment trials.
pub struct ProofAccess<S: ProofSource> {
    source: S,
    tracing: bool,
    trace: Vec<TraceRecord>,
    reads: u64,
}

impl<S: ProofSource> ProofAccess<S> {
    pub fn new(source: S) -> Self {
        ProofAccess { source, tracing: true, trace: Vec::new(), reads: 0 }
    }

    /// Counts reads but keeps no trace; bulk soundness trials would otherwise
    /// churn tens of megabytes of trace per verify run.
    pub fn untraced(source: S) -> Self {
        ProofAccess { source, tracing: false, trace: Vec::new(), reads: 0 }
    }

    pub fn dims(&self) -> ProofDims {
        self.source.dims()
    }

    pub fn read(&mut self, addr: &ProofAddress) -> Result<EntryValue, ProofError> {
        let dims = self.source.dims();
        if !addr.is_valid(&dims) {
            return Err(ProofError::InvalidAddress { addr: *addr, n: dims.n, m: dims.m });
        }
        let value = self.source.fetch(addr)?;
        self.reads += 1;
        if self.tracing {
            self.trace.push(TraceRecord { addr: *addr, value });
        }
        Ok(value)
    }

    pub fn read_prob(&mut self, segment: usize, w: BitString) -> Result<FixedProb, ProofError> {
        let addr = ProofAddress::prob(segment, w);
        match self.read(&addr)? {
            EntryValue::Prob(p) => Ok(p),
            EntryValue::Phase(_) => Err(ProofError::KindMismatch { addr }),
        }
    }

    pub fn read_phase(&mut self, segment: usize, x: BitString) -> Result<FixedPhase, ProofError> {
        let addr = ProofAddress::phase(segment, x);
        match self.read(&addr)? {
            EntryValue::Phase(p) => Ok(p),
            EntryValue::Prob(_) => Err(ProofError::KindMismatch { addr }),
        }
    }

    pub fn reads(&self) -> u64 {
        self.reads
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    pub fn into_trace(self) -> Vec<TraceRecord> {
        self.trace
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{random_circuit, simulate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn honest_proof_of_basis_state() {
        let proof = build_honest_proof(&[StateVector::zero_state(2)], 96).unwrap();
        assert_eq!(proof.prob(0, &BitString::empty()).raw(), 0);
        assert_eq!(proof.prob(0, &bs("0")).raw(), 0);
        // Zero-mass subtree: zero-denominator convention stores 0.
        assert_eq!(proof.prob(0, &bs("1")).raw(), 0);
        assert_eq!(
            proof.phase(0, &bs("00")),
            FixedPhase::encode(Complex64::new(1.0, 0.0), 96)
        );
    }

    #[test]
    fn honest_plus_state_prob_is_exact_at_b16() {
        let amps = vec![
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ];
        let plus = StateVector::from_amplitudes(1, amps).unwrap();
        let proof = build_honest_proof(&[plus.clone()], 16).unwrap();
        assert_eq!(proof.prob(0, &BitString::empty()).raw(), 32768);
        // Decoded amplitudes recover √½ within 2^{-b}.
        let dec = proof.decode_state(0);
        for x in 0..2 {
            assert!((dec.amp_index(x) - plus.amp_index(x)).norm() < 2f64.powi(-16));
        }
    }

    #[test]
    fn decode_all_zero_probs_is_basis_zero() {
        let dims = ProofDims { n: 3, m: 0, b: 96 };
        let seg = Segment {
            probs: vec![FixedProb::from_raw(0, 96); 7],
            phases: vec![FixedPhase::encode(Complex64::new(1.0, 0.0), 96); 8],
        };
        let proof = PcpProof { dims, segments: vec![seg] };
        let st = proof.decode_state(0);
        assert_eq!(st.amp_index(0), Complex64::new(1.0, 0.0));
        for x in 1..8 {
            assert_eq!(st.amp_index(x), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn random_bit_patterns_decode_normalized() {
        let mut r = rng(4);
        for trial in 0..100 {
            let dims = ProofDims { n: 3, m: trial % 3, b: [16, 32, 96, 120][trial % 4] };
            let proof = PcpProof::random(dims, &mut r).unwrap();
            for i in 0..=dims.m {
                let norm = proof.decode_state(i).norm_sqr();
                assert!((norm - 1.0).abs() < 1e-9, "norm² = {norm} at {dims:?}");
            }
        }
    }

    #[test]
    fn decoded_amplitudes_match_path_products_exactly() {
        let mut r = rng(5);
        let dims = ProofDims { n: 4, m: 1, b: 96 };
        let proof = PcpProof::random(dims, &mut r).unwrap();
        for i in 0..=1 {
            let st = proof.decode_state(i);
            for xi in 0..16u64 {
                let x = BitString::from_index(xi, 4);
                let path: Vec<(FixedProb, bool)> = (0..4)
                    .map(|k| (proof.prob(i, &x.prefix(k)), x.bit(k)))
                    .collect();
                let amp = amplitude_from_path(proof.phase(i, &x), &path, 96);
                assert_eq!(amp, st.amp(&x), "exact float equality required");
            }
        }
    }

    #[test]
    fn flat_index_is_a_bijection() {
        let dims = ProofDims { n: 3, m: 2, b: 96 };
        let mut seen = vec![false; dims.total_entries() as usize];
        for seg in 0..=2 {
            for len in 0..3 {
                for w in 0..(1u64 << len) {
                    let addr = ProofAddress::prob(seg, BitString::from_index(w, len));
                    let f = addr.flat_index(&dims);
                    assert!(!seen[f as usize]);
                    seen[f as usize] = true;
                    assert_eq!(ProofAddress::from_flat(&dims, f).unwrap(), addr);
                }
            }
            for x in 0..8u64 {
                let addr = ProofAddress::phase(seg, BitString::from_index(x, 3));
                let f = addr.flat_index(&dims);
                assert!(!seen[f as usize]);
                seen[f as usize] = true;
                assert_eq!(ProofAddress::from_flat(&dims, f).unwrap(), addr);
            }
        }
        assert!(seen.iter().all(|&s| s));
        assert!(ProofAddress::from_flat(&dims, dims.total_entries()).is_err());
    }

    #[test]
    fn prob_entries_precede_phases_and_lengths_ascend() {
        let dims = ProofDims { n: 2, m: 0, b: 96 };
        let order: Vec<ProofAddress> = (0..dims.total_entries())
            .map(|f| ProofAddress::from_flat(&dims, f).unwrap())
            .collect();
        let spelled: Vec<String> = order
            .iter()
            .map(|a| match a.kind {
                AddressKind::Prob(w) => format!("p:{w}"),
                AddressKind::Phase(x) => format!("g:{x}"),
            })
            .collect();
        assert_eq!(spelled, vec!["p:", "p:0", "p:1", "g:00", "g:01", "g:10", "g:11"]);
    }

    #[test]
    fn access_traces_and_meters() {
        let proof = build_honest_proof(&[StateVector::zero_state(2)], 32).unwrap();
        let mut access = ProofAccess::new(&proof);
        let addr = ProofAddress::prob(0, BitString::empty());
        let v1 = access.read(&addr).unwrap();
        let v2 = access.read(&addr).unwrap();
        assert_eq!(v1, v2);
        assert_eq!(v1, EntryValue::Prob(FixedProb::from_raw(0, 32)));
        assert_eq!(access.reads(), 2);
        assert_eq!(access.trace().len(), 2);
        assert_eq!(access.trace()[0].addr, addr);

        let bad = ProofAddress::prob(5, BitString::empty());
        assert!(matches!(access.read(&bad), Err(ProofError::InvalidAddress { .. })));
        assert_eq!(access.reads(), 2, "failed reads are not counted");
    }

    #[test]
    fn serialization_round_trips_bit_exactly() {
        let mut r = rng(6);
        for trial in 0..100u32 {
            let dims = ProofDims {
                n: 1 + (trial % 4) as usize,
                m: (trial % 3) as usize,
                b: [16, 17, 96, 120][(trial % 4) as usize],
            };
            let proof = PcpProof::random(dims, &mut r).unwrap();
            let bytes = proof.serialize();
            assert_eq!(bytes.len() as u128, dims.file_bytes());
            let back = PcpProof::deserialize(&bytes).unwrap();
            assert_eq!(back, proof);
        }
    }

    #[test]
    fn file_size_formula_for_empty_circuit() {
        // m=0, n=1: header + 1 prob entry + 2 phase entries.
        let proof = build_honest_proof(&[StateVector::zero_state(1)], 96).unwrap();
        let bytes = proof.serialize();
        assert_eq!(bytes.len(), 18 + 13 + 2 * 2 * 13);
    }

    #[test]
    fn deserialize_rejects_corruption() {
        let proof = build_honest_proof(&[StateVector::zero_state(1)], 32).unwrap();
        let mut bytes = proof.serialize();

        let mut bad_magic = bytes.clone();
        bad_magic[0] = b'X';
        assert!(matches!(PcpProof::deserialize(&bad_magic), Err(ProofError::BadMagic)));

        let mut bad_version = bytes.clone();
        bad_version[4] = 9;
        assert!(matches!(
            PcpProof::deserialize(&bad_version),
            Err(ProofError::BadVersion { got: 9 })
        ));

        bytes.pop();
        assert!(matches!(PcpProof::deserialize(&bytes), Err(ProofError::Truncated { .. })));
    }

    #[test]
    fn honest_proof_decodes_close_to_the_trace() {
        let circuit = random_circuit(3, 10, &mut rng(7));
        let states = simulate(&circuit).unwrap();
        for b in [16, 48, 96] {
            let proof = build_honest_proof(&states, b).unwrap();
            for (i, st) in states.iter().enumerate() {
                let dec = proof.decode_state(i);
                let fid = crate::sim::inner_product(&dec, st).norm();
                // Loose sanity here; the sharp fidelity bound is covered by
                // the compensated-arithmetic test below.
                assert!(fid > 1.0 - (3.0 + 2.0) * f64::exp2(2.0 - b as f64).max(1e-12));
            }
        }
    }

    #[test]
    fn rejects_unnormalized_input() {
        let amps = vec![Complex64::new(0.9, 0.0), Complex64::new(0.1, 0.0)];
        let st = StateVector::from_amplitudes(1, amps).unwrap();
        assert!(matches!(
            build_honest_proof(&[st], 96),
            Err(ProofError::Unnormalized { .. })
        ));
    }

    // -- compensated (double-double) fidelity ------------------------------
    //
    // At b = 96 the honest-encoding fidelity deficit is ~2^{-9x}, far below
    // what a plain f64 inner product can resolve (its own summation noise is
    // ~2^{-50}). TwoSum/TwoProd compensation keeps ~106 bits through the
    // accumulation, so the deficit — not the noise — is what gets measured.

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        let p = a * b;
        (p, a.mul_add(b, -p))
    }

    #[derive(Clone, Copy, Default)]
    struct Dd {
        hi: f64,
        lo: f64,
    }

    impl Dd {
        fn add_product(&mut self, a: f64, b: f64) {
            let (p, pe) = two_prod(a, b);
            let (s, se) = two_sum(self.hi, p);
            self.hi = s;
            self.lo += se + pe;
        }
    }

    /// 1 − |⟨u|v⟩|, resolved to ~2^{-100}.
    fn fidelity_deficit_dd(u: &StateVector, v: &StateVector) -> f64 {
        let (mut re, mut im) = (Dd::default(), Dd::default());
        for (a, b) in u.amplitudes().iter().zip(v.amplitudes()) {
            re.add_product(a.re, b.re);
            re.add_product(a.im, b.im);
            im.add_product(a.re, b.im);
            im.add_product(-a.im, b.re);
        }
        // re ≈ 1 − d with d tiny: extract d before precision collapses.
        let d = (1.0 - re.hi) - re.lo;
        let e = im.hi + im.lo;
        // 1 − |ip| ≈ (1 − |ip|²)/2 = (2d − d² − e²)/2.
        (2.0 * d - d * d - e * e) / 2.0
    }

    #[test]
    fn honest_fidelity_meets_the_encoding_bound() {
        for (seed, n, m) in [(8u64, 2usize, 6usize), (9, 3, 8), (10, 4, 6)] {
            let circuit = random_circuit(n, m, &mut rng(seed));
            let states = simulate(&circuit).unwrap();
            for b in [16u32, 32, 96] {
                let proof = build_honest_proof(&states, b).unwrap();
                let bound = (n as f64 + 2.0) * f64::exp2(2.0 - b as f64);
                for (i, st) in states.iter().enumerate() {
                    let deficit = fidelity_deficit_dd(&proof.decode_state(i), st);
                    assert!(
                        deficit <= bound,
                        "n={n} b={b} segment {i}: deficit {deficit:.3e} > bound {bound:.3e}"
                    );
                }
            }
        }
    }

    #[test]
    fn dd_fidelity_agrees_with_plain_f64_when_resolvable() {
        let circuit = random_circuit(3, 6, &mut rng(11));
        let states = simulate(&circuit).unwrap();
        let proof = build_honest_proof(&states, 16).unwrap();
        for (i, st) in states.iter().enumerate() {
            let dec = proof.decode_state(i);
            let plain = 1.0 - crate::sim::inner_product(&dec, st).norm();
            let dd = fidelity_deficit_dd(&dec, st);
            assert!((plain - dd).abs() < 1e-11, "plain {plain:.3e} vs dd {dd:.3e}");
        }
    }
}
