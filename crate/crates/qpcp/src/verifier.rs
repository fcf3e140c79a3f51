//! The spot-checking verifier.
//!
//! Given metered access to a proof and the circuit it claims to trace, the
//! verifier runs three phases: an initial-state amplitude check at 0ⁿ, an
//! acceptance-probability check on the final segment, and `t` propagation
//! checks per gate, each comparing the claimed amplitude α̃ against a local
//! reconstruction η from the previous segment through the gate. Every proof
//! read, oracle query, and random bit is counted, and on accepting runs the
//! counts match closed-form functions of the circuit shape exactly — see
//! [`expected_proof_queries`] and friends.
//!
//! The run is deterministic given the seed: the read schedule and random
//! stream depend only on proof contents, never on check outcomes, so a full
//! schedule and an early-exit run agree bit for bit up to the exit point.
//! [`VerifyMode::FullSchedule`] exists for the two-prover compilation, where
//! the first prover must commit to the entire schedule's answers up front.

use num_complex::Complex64;
use serde_json::json;

use crate::bits::BitString;
use crate::proof::{ProofAccess, ProofError, ProofSource, TraceRecord};
use crate::rng::BitRng;
use crate::sim::{Circuit, Gate, StateVector};

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error("proof shape (n={proof_n}, m={proof_m}) does not match circuit (n={circuit_n}, m={circuit_m})")]
    ShapeMismatch { proof_n: usize, proof_m: usize, circuit_n: usize, circuit_m: usize },
    #[error("invalid verifier config: {reason}")]
    BadConfig { reason: String },
}

/// Hard ceilings on the verifier's resource counters; `None` means
/// unlimited. Crossing any ceiling aborts the run with a
/// [`RejectReason::BudgetExceeded`] verdict.
#[derive(Clone, Copy, Debug, Default)]
pub struct QueryBudget {
    pub max_proof_queries: Option<u64>,
    pub max_oracle_queries: Option<u64>,
    pub max_random_bits: Option<u64>,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifierConfig {
    /// Propagation checks per gate.
    pub t: u64,
    /// Amplitude comparison tolerance.
    pub eps_check: f64,
    pub rng_seed: u128,
    pub budgets: QueryBudget,
}

/// Default tolerance: honest error is dominated by square-rooted per-entry
/// rounding, accumulated over the ≤ n+4 entry reads feeding one comparison.
pub fn eps_check_default(n: usize, b: u32) -> f64 {
    (n as f64 + 4.0) * f64::exp2(3.0 - b as f64 / 2.0)
}

/// Default repetition count ⌈40/δ²⌉ at target per-gate drift δ = 1/(10m).
pub fn t_default(m: usize) -> u64 {
    (4000 * m as u64 * m as u64).max(1)
}

impl VerifierConfig {
    pub fn for_circuit(circuit: &Circuit, b: u32, rng_seed: u128) -> Self {
        VerifierConfig {
            t: t_default(circuit.m()),
            eps_check: eps_check_default(circuit.n, b),
            rng_seed,
            budgets: QueryBudget::default(),
        }
    }

    fn validate(&self) -> Result<(), VerifyError> {
        if self.t < 1 {
            return Err(VerifyError::BadConfig { reason: "t must be ≥ 1".into() });
        }
        if !(self.eps_check > 0.0) {
            return Err(VerifyError::BadConfig {
                reason: format!("eps_check must be positive, got {}", self.eps_check),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Acc,
    Rej,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RejectReason {
    /// |α̃_{0,0ⁿ} − 1| exceeded the tolerance.
    InitialStateMismatch,
    /// The stored conditionals along the acceptance prefix multiply to less
    /// than threshold − eps_check.
    FinalProbabilityLow,
    /// A propagation check at (gate, sampled string) saw |η − α̃| at or
    /// above the tolerance.
    PropagationMismatch { gate: usize, x: BitString, discrepancy: f64 },
    /// A resource counter crossed its configured ceiling — an artifact-level
    /// failure, never an accept.
    BudgetExceeded,
}

#[derive(Clone, Debug, Default)]
pub struct VerifierStats {
    pub proof_queries: u64,
    pub oracle_queries: u64,
    pub random_bits: u64,
    /// Propagation comparisons actually performed.
    pub checks_done: u64,
    /// Largest |η − α̃| seen across all propagation checks.
    pub max_discrepancy: f64,
    pub trace: Vec<TraceRecord>,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Present iff the outcome is `Rej`.
    pub reason: Option<RejectReason>,
    pub stats: VerifierStats,
    pub seed: u128,
}

impl Verdict {
    pub fn is_acc(&self) -> bool {
        self.outcome == Outcome::Acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = json!({
            "outcome": match self.outcome { Outcome::Acc => "acc", Outcome::Rej => "rej" },
            "proof_queries": self.stats.proof_queries,
            "oracle_queries": self.stats.oracle_queries,
            "random_bits": self.stats.random_bits,
            "seed": format!("{:032x}", self.seed),
        });
        if let Some(reason) = &self.reason {
            let tag = match reason {
                RejectReason::InitialStateMismatch => "initial_state_mismatch",
                RejectReason::FinalProbabilityLow => "final_probability_low",
                RejectReason::PropagationMismatch { .. } => "propagation_mismatch",
                RejectReason::BudgetExceeded => "budget_exceeded",
            };
            obj["reason"] = json!(tag);
            if let RejectReason::PropagationMismatch { gate, discrepancy, .. } = reason {
                obj["gate_index"] = json!(gate);
                obj["discrepancy"] = json!(discrepancy);
            }
        }
        obj
    }
}

// ---------------------------------------------------------------------------
// The four verifier operations

/// α̃_{i,x}: the amplitude the proof claims for string `x` in segment `i`.
/// Exactly n prob reads (path prefixes, shortest first) plus 1 phase read;
/// bit-identical to the segment's decoded amplitude at `x`.
pub fn compute_amplitude<S: ProofSource>(
    access: &mut ProofAccess<S>,
    i: usize,
    x: &BitString,
) -> Result<Complex64, ProofError> {
    let b = access.dims().b;
    let n = x.len();
    let mut path = Vec::with_capacity(n);
    for k in 0..n {
        path.push((access.read_prob(i, x.prefix(k))?, x.bit(k)));
    }
    let phase = access.read_phase(i, *x)?;
    Ok(crate::proof::amplitude_from_path(phase, &path, b))
}

/// Draws x with probability |α̃_{i,x}|², one exact Bernoulli per qubit:
/// each level reads the stored conditional and consumes b+1 fresh bits,
/// taking the 1-branch iff the drawn integer falls below 2·raw. Exactly n
/// prob reads and n·(b+1) random bits.
pub fn sample_input<S: ProofSource>(
    access: &mut ProofAccess<S>,
    i: usize,
    rng: &mut BitRng,
) -> Result<BitString, ProofError> {
    let dims = access.dims();
    let mut w = BitString::empty();
    for _ in 0..dims.n {
        let p = access.read_prob(i, w)?;
        let bit = rng.bernoulli_scaled(2 * p.clamped_raw(dims.b), dims.b + 1);
        w = w.push(bit);
    }
    Ok(w)
}

/// η_{i,x}: what the amplitude at `x` after gate `i` ought to be, locally
/// reconstructed from segment i−1. Reads the gate's fan of neighbor
/// amplitudes (x first, then the flips, q before s) and combines them with
/// the matrix row selected by x; an oracle gate instead makes its single
/// metered query and applies the sign.
pub fn local_check_amplitude<S: ProofSource>(
    access: &mut ProofAccess<S>,
    circuit: &Circuit,
    i: usize,
    x: &BitString,
    gate: &Gate,
) -> Result<Complex64, ProofError> {
    debug_assert!(i >= 1);
    let prev = i - 1;
    match gate {
        Gate::Single { q, matrix } => {
            let r = x.bit(*q) as usize;
            let a_same = compute_amplitude(access, prev, x)?;
            let a_flip = compute_amplitude(access, prev, &x.flip(*q))?;
            Ok(matrix[r][r] * a_same + matrix[r][1 - r] * a_flip)
        }
        Gate::Two { q, s, matrix } => {
            let (xq, xs) = (x.bit(*q) as usize, x.bit(*s) as usize);
            let r = 2 * xq + xs;
            let mut eta = Complex64::new(0.0, 0.0);
            for (flip_q, flip_s) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                let mut y = *x;
                if flip_q == 1 {
                    y = y.flip(*q);
                }
                if flip_s == 1 {
                    y = y.flip(*s);
                }
                let c = 2 * (xq ^ flip_q) + (xs ^ flip_s);
                eta += matrix[r][c] * compute_amplitude(access, prev, &y)?;
            }
            Ok(eta)
        }
        Gate::Oracle { oracle_id } => {
            let a = compute_amplitude(access, prev, x)?;
            let f = circuit
                .oracle(oracle_id)
                .expect("gate validated against oracle table");
            Ok(if f.query(x) { -a } else { a })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Stop at the first failed check (the standalone verifier).
    EarlyExit,
    /// Run the complete read schedule regardless of outcomes, reporting the
    /// first failure; used to enumerate the schedule the first prover must
    /// answer in the two-prover compilation.
    FullSchedule,
}

/// Runs the verifier in [`VerifyMode::EarlyExit`].
pub fn verify<S: ProofSource>(
    access: ProofAccess<S>,
    circuit: &Circuit,
    config: &VerifierConfig,
) -> Result<Verdict, VerifyError> {
    verify_with_mode(access, circuit, config, VerifyMode::EarlyExit)
}

pub fn verify_with_mode<S: ProofSource>(
    mut access: ProofAccess<S>,
    circuit: &Circuit,
    config: &VerifierConfig,
    mode: VerifyMode,
) -> Result<Verdict, VerifyError> {
    config.validate()?;
    let dims = access.dims();
    if dims.n != circuit.n || dims.m != circuit.m() {
        return Err(VerifyError::ShapeMismatch {
            proof_n: dims.n,
            proof_m: dims.m,
            circuit_n: circuit.n,
            circuit_m: circuit.m(),
        });
    }
    let eps = config.eps_check;
    let mut rng = BitRng::from_seed(config.rng_seed);
    let base_reads = access.reads();
    let mut stats = VerifierStats::default();
    let mut failure: Option<RejectReason> = None;
    let mut stop = false;

    // First failure wins; early exit and budget overruns also halt the
    // schedule.
    let fail = |failure: &mut Option<RejectReason>, stop: &mut bool, r: RejectReason| {
        let is_budget = r == RejectReason::BudgetExceeded;
        if failure.is_none() {
            *failure = Some(r);
        }
        if mode == VerifyMode::EarlyExit || is_budget {
            *stop = true;
        }
    };
    macro_rules! budget_check {
        () => {{
            let b = &config.budgets;
            let over = b.max_proof_queries.is_some_and(|c| access.reads() - base_reads > c)
                || b.max_oracle_queries.is_some_and(|c| stats.oracle_queries > c)
                || b.max_random_bits.is_some_and(|c| rng.bits_drawn() > c);
            if over {
                fail(&mut failure, &mut stop, RejectReason::BudgetExceeded);
            }
        }};
    }

    // Step 1: the claimed start state must put amplitude ≈ 1 on 0ⁿ.
    let a_start = compute_amplitude(&mut access, 0, &BitString::zeros(dims.n))?;
    if (a_start - Complex64::new(1.0, 0.0)).norm() > eps {
        fail(&mut failure, &mut stop, RejectReason::InitialStateMismatch);
    }
    budget_check!();

    // Step 2a: stored conditionals along the acceptance prefix on the final
    // segment must multiply to at least threshold − eps.
    if !stop {
        let acc = &circuit.acceptance;
        let mut product = 1.0f64;
        for k in 0..acc.prefix.len() {
            let p = access.read_prob(dims.m, acc.prefix.prefix(k))?;
            let p1 = p.value(dims.b);
            product *= if acc.prefix.bit(k) { p1 } else { 1.0 - p1 };
        }
        if product < acc.threshold - eps {
            fail(&mut failure, &mut stop, RejectReason::FinalProbabilityLow);
        }
        budget_check!();
    }

    // Step 2b: per gate, t sampled propagation checks. Ties reject.
    for i in 1..=dims.m {
        if stop {
            break;
        }
        let gate = circuit.gate(i);
        for _ in 0..config.t {
            if stop {
                break;
            }
            let x = sample_input(&mut access, i, &mut rng)?;
            let alpha = compute_amplitude(&mut access, i, &x)?;
            let eta = local_check_amplitude(&mut access, circuit, i, &x, gate)?;
            if gate.is_oracle() {
                stats.oracle_queries += 1;
            }
            let discrepancy = (eta - alpha).norm();
            stats.checks_done += 1;
            stats.max_discrepancy = stats.max_discrepancy.max(discrepancy);
            if discrepancy >= eps {
                fail(
                    &mut failure,
                    &mut stop,
                    RejectReason::PropagationMismatch { gate: i, x, discrepancy },
                );
            }
            budget_check!();
        }
    }

    stats.proof_queries = access.reads() - base_reads;
    stats.random_bits = rng.bits_drawn();
    stats.trace = access.into_trace();
    let outcome = if failure.is_none() { Outcome::Acc } else { Outcome::Rej };
    Ok(Verdict { outcome, reason: failure, stats, seed: config.rng_seed })
}

// ---------------------------------------------------------------------------
// Closed-form resource counts (exact on accepting runs)

fn fan(gate: &Gate) -> u64 {
    gate.local_amplitudes() as u64
}

/// Proof reads of a complete run: (n+1) for step 1, ℓ for step 2a, and per
/// gate-i iteration n (sampling) + (1 + fan)·(n+1) (claimed amplitude plus
/// the local reconstruction's neighbors).
pub fn expected_proof_queries(circuit: &Circuit, t: u64) -> u64 {
    let n = circuit.n as u64;
    let step1 = n + 1;
    let step2a = circuit.acceptance.prefix.len() as u64;
    let step2b: u64 = circuit
        .gates
        .iter()
        .map(|g| t * (n + (1 + fan(g)) * (n + 1)))
        .sum();
    step1 + step2a + step2b
}

/// One metered oracle query per propagation check of an oracle gate.
pub fn expected_oracle_queries(circuit: &Circuit, t: u64) -> u64 {
    t * circuit.gates.iter().filter(|g| g.is_oracle()).count() as u64
}

/// All randomness is sampling: n exact Bernoullis of b+1 bits each, t times
/// per gate.
pub fn expected_random_bits(circuit: &Circuit, t: u64, b: u32) -> u64 {
    t * circuit.m() as u64 * circuit.n as u64 * (b as u64 + 1)
}

// ---------------------------------------------------------------------------
// Inner-product estimation

#[derive(Clone, Copy, Debug)]
pub struct EstimatorResult {
    pub gamma_hat: Complex64,
    pub k: usize,
}

/// Unbiased estimator of ⟨ψ|φ⟩ from k samples of ψ's measurement
/// distribution: the mean of φ_X/ψ_X over X ~ |ψ_x|², with the ratio taken
/// as 0 whenever ψ_X = 0. Variance is at most 1/k.
pub fn estimate_inner_product(
    mut sample_psi: impl FnMut(&mut BitRng) -> BitString,
    mut amp_psi: impl FnMut(&BitString) -> Complex64,
    mut amp_phi: impl FnMut(&BitString) -> Complex64,
    k: usize,
    rng: &mut BitRng,
) -> EstimatorResult {
    assert!(k >= 1, "estimator needs at least one sample");
    let zero = Complex64::new(0.0, 0.0);
    let mut sum = zero;
    for _ in 0..k {
        let x = sample_psi(rng);
        let psi = amp_psi(&x);
        if psi != zero {
            sum += amp_phi(&x) / psi;
        }
    }
    EstimatorResult { gamma_hat: sum / k as f64, k }
}

/// Draws from a statevector's measurement distribution by CDF inversion on
/// 53-bit uniforms. Build once, draw many.
pub struct StateSampler {
    n: usize,
    cdf: Vec<f64>,
}

impl StateSampler {
    pub fn new(state: &StateVector) -> Self {
        let mut acc = 0.0;
        let cdf = state
            .amplitudes()
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        StateSampler { n: state.n(), cdf }
    }

    pub fn draw(&self, rng: &mut BitRng) -> BitString {
        let u = rng.draw_bits(53) as f64 * f64::exp2(-53.0) * self.cdf.last().unwrap();
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        BitString::from_index(idx as u64, self.n)
    }
}

/// [`estimate_inner_product`] specialized to two explicit statevectors.
pub fn estimate_between_states(
    psi: &StateVector,
    phi: &StateVector,
    k: usize,
    rng: &mut BitRng,
) -> EstimatorResult {
    let sampler = StateSampler::new(psi);
    estimate_inner_product(
        |r| sampler.draw(r),
        |x| psi.amp(x),
        |x| phi.amp(x),
        k,
        rng,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed::{FixedPhase, FixedProb};
    use crate::proof::{build_honest_proof, AddressKind, EntryValue, PcpProof, ProofAddress, ProofDims};
    use crate::sim::{gates, random_circuit, simulate, AcceptancePredicate, Circuit, OracleTable};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn chacha(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    /// Single-segment proof with every prob entry `raw` and every phase the
    /// encoding of 1.
    fn uniform_raw_proof(n: usize, b: u32, raw: u128) -> PcpProof {
        let mut proof = build_honest_proof(&[StateVector::zero_state(n)], b).unwrap();
        let dims = ProofDims { n, m: 0, b };
        for f in 0..dims.total_entries() {
            let addr = ProofAddress::from_flat(&dims, f).unwrap();
            if matches!(addr.kind, AddressKind::Prob(_)) {
                proof.set_entry(&addr, EntryValue::Prob(FixedProb::from_raw(raw, b))).unwrap();
            }
        }
        proof
    }

    #[test]
    fn amplitude_of_zero_string_in_zero_proof_is_exactly_one() {
        let proof = uniform_raw_proof(4, 96, 0);
        let mut access = ProofAccess::new(&proof);
        let a = compute_amplitude(&mut access, 0, &BitString::zeros(4)).unwrap();
        assert_eq!(a, Complex64::new(1.0, 0.0));
        assert_eq!(access.reads(), 5, "n prob reads + 1 phase read");
    }

    #[test]
    fn amplitude_matches_hadamard_value() {
        let plus = StateVector::from_amplitudes(
            1,
            vec![
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        for b in [16u32, 96] {
            let proof = build_honest_proof(&[plus.clone()], b).unwrap();
            let mut access = ProofAccess::new(&proof);
            let a = compute_amplitude(&mut access, 0, &bs("1")).unwrap();
            assert!((a.re - 0.70710678).abs() < f64::exp2(-(b as f64)) + 1e-8);
            assert_eq!(a.im, 0.0);
        }
    }

    #[test]
    fn amplitude_equals_decoded_state_exactly() {
        let mut r = chacha(20);
        let dims = ProofDims { n: 4, m: 2, b: 96 };
        let proof = PcpProof::random(dims, &mut r).unwrap();
        for i in 0..=2 {
            let decoded = proof.decode_state(i);
            let mut access = ProofAccess::untraced(&proof);
            for xi in 0..16u64 {
                let x = BitString::from_index(xi, 4);
                let a = compute_amplitude(&mut access, i, &x).unwrap();
                assert_eq!(a, decoded.amp(&x));
            }
        }
    }

    #[test]
    fn sampling_extremes_are_deterministic() {
        let b = 16;
        let ones = uniform_raw_proof(3, b, 1 << b);
        let zeros = uniform_raw_proof(3, b, 0);
        let mut rng = BitRng::from_seed(9);
        for _ in 0..50 {
            let mut access = ProofAccess::untraced(&ones);
            assert_eq!(sample_input(&mut access, 0, &mut rng).unwrap(), bs("111"));
            let mut access = ProofAccess::untraced(&zeros);
            assert_eq!(sample_input(&mut access, 0, &mut rng).unwrap(), bs("000"));
        }
    }

    #[test]
    fn sampling_consumes_exactly_n_reads_and_bits() {
        let proof = uniform_raw_proof(5, 96, 123456789);
        let mut access = ProofAccess::new(&proof);
        let mut rng = BitRng::from_seed(10);
        sample_input(&mut access, 0, &mut rng).unwrap();
        assert_eq!(access.reads(), 5);
        assert_eq!(rng.bits_drawn(), 5 * 97);
    }

    #[test]
    fn sampling_follows_the_encoded_distribution() {
        // (H⊗H)|00⟩: all four strings equally likely.
        let table = OracleTable::new();
        let st = StateVector::zero_state(2)
            .apply(&gates::hadamard(0), &table)
            .unwrap()
            .apply(&gates::hadamard(1), &table)
            .unwrap();
        let proof = build_honest_proof(&[st], 96).unwrap();
        let mut access = ProofAccess::untraced(&proof);
        let mut rng = BitRng::from_seed(11);
        let trials = 100_000usize;
        let mut counts = [0u64; 4];
        for _ in 0..trials {
            counts[sample_input(&mut access, 0, &mut rng).unwrap().index() as usize] += 1;
        }
        let mut chi2 = 0.0;
        for c in counts {
            let f = c as f64 / trials as f64;
            assert!((f - 0.25).abs() < 0.01, "counts {counts:?}");
            let e = trials as f64 / 4.0;
            chi2 += (c as f64 - e).powi(2) / e;
        }
        // 3 degrees of freedom; p > 0.001 ⇔ chi² below the 0.999 quantile.
        let dist = statrs::distribution::ChiSquared::new(3.0).unwrap();
        let cutoff = statrs::distribution::ContinuousCDF::inverse_cdf(&dist, 0.999);
        assert!(chi2 < cutoff, "chi² = {chi2}, cutoff {cutoff}");
    }

    #[test]
    fn identity_gate_check_reproduces_the_amplitude() {
        let mut r = chacha(21);
        let proof = PcpProof::random(ProofDims { n: 3, m: 1, b: 96 }, &mut r).unwrap();
        let id = Gate::Single {
            q: 1,
            matrix: [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
        };
        let circuit = Circuit {
            n: 3,
            gates: vec![id.clone()],
            oracles: OracleTable::new(),
            acceptance: AcceptancePredicate { prefix: BitString::empty(), threshold: 0.0 },
        };
        let mut access = ProofAccess::untraced(&proof);
        for xi in 0..8u64 {
            let x = BitString::from_index(xi, 3);
            let eta = local_check_amplitude(&mut access, &circuit, 1, &x, &id).unwrap();
            let mut access2 = ProofAccess::untraced(&proof);
            let alpha_prev = compute_amplitude(&mut access2, 0, &x).unwrap();
            assert_eq!(eta, alpha_prev);
        }
    }

    #[test]
    fn oracle_gate_check_is_a_sign_flip() {
        let mut r = chacha(22);
        let proof = PcpProof::random(ProofDims { n: 3, m: 1, b: 96 }, &mut r).unwrap();
        let mut oracles = OracleTable::new();
        oracles.insert("f".into(), crate::sim::BooleanOracle::constant(3, true));
        let gate = Gate::Oracle { oracle_id: "f".into() };
        let circuit = Circuit {
            n: 3,
            gates: vec![gate.clone()],
            oracles,
            acceptance: AcceptancePredicate { prefix: BitString::empty(), threshold: 0.0 },
        };
        let mut access = ProofAccess::untraced(&proof);
        for xi in 0..8u64 {
            let x = BitString::from_index(xi, 3);
            let eta = local_check_amplitude(&mut access, &circuit, 1, &x, &gate).unwrap();
            let mut access2 = ProofAccess::untraced(&proof);
            let alpha_prev = compute_amplitude(&mut access2, 0, &x).unwrap();
            assert_eq!(eta, -alpha_prev);
        }
    }

    #[test]
    fn honest_local_checks_match_simulated_amplitudes() {
        let circuit = random_circuit(3, 8, &mut chacha(23));
        let states = simulate(&circuit).unwrap();
        let b = 96;
        let proof = build_honest_proof(&states, b).unwrap();
        let bound = 8.0 * f64::exp2(-(b as f64) / 2.0);
        let mut access = ProofAccess::untraced(&proof);
        for i in 1..=circuit.m() {
            for xi in 0..8u64 {
                let x = BitString::from_index(xi, 3);
                let eta =
                    local_check_amplitude(&mut access, &circuit, i, &x, circuit.gate(i)).unwrap();
                // ⟨x|G_i|ψ_{i−1}⟩ is the simulated state after gate i.
                let target = states[i].amp(&x);
                assert!(
                    (eta - target).norm() < bound,
                    "gate {i}, x={x}: |Δ| = {:e}",
                    (eta - target).norm()
                );
            }
        }
    }

    fn honest_setup(seed: u64, n: usize, m: usize, b: u32) -> (Circuit, PcpProof) {
        let circuit = random_circuit(n, m, &mut chacha(seed));
        let states = simulate(&circuit).unwrap();
        let proof = build_honest_proof(&states, b).unwrap();
        (circuit, proof)
    }

    #[test]
    fn honest_runs_accept_with_exact_resource_counts() {
        for seed in 30..36 {
            let (circuit, proof) = honest_setup(seed, 3, 6, 96);
            let config = VerifierConfig {
                t: 20,
                eps_check: eps_check_default(3, 96),
                rng_seed: seed as u128,
                budgets: QueryBudget::default(),
            };
            let verdict = verify(ProofAccess::new(&proof), &circuit, &config).unwrap();
            assert!(verdict.is_acc(), "seed {seed}: {:?}", verdict.reason);
            assert_eq!(verdict.stats.proof_queries, expected_proof_queries(&circuit, 20));
            assert_eq!(verdict.stats.oracle_queries, expected_oracle_queries(&circuit, 20));
            assert_eq!(verdict.stats.random_bits, expected_random_bits(&circuit, 20, 96));
            assert_eq!(verdict.stats.trace.len() as u64, verdict.stats.proof_queries);
            assert_eq!(verdict.stats.checks_done, 20 * circuit.m() as u64);
        }
    }

    #[test]
    fn flipped_initial_phase_rejects_deterministically() {
        let (circuit, mut proof) = honest_setup(40, 3, 5, 96);
        let addr = ProofAddress::phase(0, BitString::zeros(3));
        proof
            .set_entry(&addr, EntryValue::Phase(FixedPhase::encode(Complex64::new(-1.0, 0.0), 96)))
            .unwrap();
        for seed in 0..5u128 {
            let config = VerifierConfig {
                t: 4,
                eps_check: eps_check_default(3, 96),
                rng_seed: seed,
                budgets: QueryBudget::default(),
            };
            let verdict = verify(ProofAccess::new(&proof), &circuit, &config).unwrap();
            assert_eq!(verdict.outcome, Outcome::Rej);
            assert_eq!(verdict.reason, Some(RejectReason::InitialStateMismatch));
        }
    }

    #[test]
    fn unmet_acceptance_threshold_rejects() {
        // H|0⟩ with an acceptance demand of 0.9 on prefix "0": the honest
        // conditional is 1/2, so step 2a must fire.
        let circuit = Circuit {
            n: 1,
            gates: vec![gates::hadamard(0)],
            oracles: OracleTable::new(),
            acceptance: AcceptancePredicate { prefix: bs("0"), threshold: 0.9 },
        };
        let states = simulate(&circuit).unwrap();
        let proof = build_honest_proof(&states, 96).unwrap();
        let config = VerifierConfig {
            t: 3,
            eps_check: eps_check_default(1, 96),
            rng_seed: 7,
            budgets: QueryBudget::default(),
        };
        let verdict = verify(ProofAccess::new(&proof), &circuit, &config).unwrap();
        assert_eq!(verdict.reason, Some(RejectReason::FinalProbabilityLow));
    }

    #[test]
    fn planted_wrong_segment_rejects_and_modes_agree() {
        let (circuit, mut proof) = honest_setup(41, 3, 4, 96);
        // Segment 2 replaced by a basis state unrelated to the trace: the
        // checks on both adjacent gates see O(1) discrepancies.
        proof.replace_segment(2, &StateVector::basis_state(&bs("101"))).unwrap();
        let config = VerifierConfig {
            t: 30,
            eps_check: eps_check_default(3, 96),
            rng_seed: 3,
            budgets: QueryBudget::default(),
        };
        let early = verify(ProofAccess::new(&proof), &circuit, &config).unwrap();
        assert_eq!(early.outcome, Outcome::Rej);
        assert!(matches!(early.reason, Some(RejectReason::PropagationMismatch { .. })));

        let full =
            verify_with_mode(ProofAccess::new(&proof), &circuit, &config, VerifyMode::FullSchedule)
                .unwrap();
        assert_eq!(full.reason, early.reason, "first failure is mode-independent");
        assert_eq!(full.stats.proof_queries, expected_proof_queries(&circuit, 30));
        assert!(full.stats.proof_queries >= early.stats.proof_queries);
        // The early trace is a prefix of the full schedule.
        assert_eq!(
            full.stats.trace[..early.stats.trace.len()],
            early.stats.trace[..]
        );
    }

    #[test]
    fn budget_overrun_rejects_without_accepting() {
        let (circuit, proof) = honest_setup(42, 3, 4, 96);
        let config = VerifierConfig {
            t: 10,
            eps_check: eps_check_default(3, 96),
            rng_seed: 1,
            budgets: QueryBudget { max_proof_queries: Some(50), ..Default::default() },
        };
        let verdict = verify(ProofAccess::new(&proof), &circuit, &config).unwrap();
        assert_eq!(verdict.outcome, Outcome::Rej);
        assert_eq!(verdict.reason, Some(RejectReason::BudgetExceeded));
    }

    #[test]
    fn verdicts_are_reproducible_and_json_shaped() {
        let (circuit, proof) = honest_setup(43, 3, 5, 96);
        let config = VerifierConfig {
            t: 8,
            eps_check: eps_check_default(3, 96),
            rng_seed: 0xfeed,
            budgets: QueryBudget::default(),
        };
        let v1 = verify(ProofAccess::new(&proof), &circuit, &config).unwrap();
        let v2 = verify(ProofAccess::new(&proof), &circuit, &config).unwrap();
        assert_eq!(v1.to_json(), v2.to_json());
        assert_eq!(v1.stats.trace, v2.stats.trace);

        let json = v1.to_json();
        assert_eq!(json["outcome"], "acc");
        assert_eq!(json["seed"], "0000000000000000000000000000feed");
        assert!(json.get("reason").is_none());
        assert!(json["proof_queries"].is_u64());
    }

    #[test]
    fn shape_mismatch_is_an_error_not_a_verdict() {
        let (circuit, _) = honest_setup(44, 3, 4, 96);
        let (_, other_proof) = honest_setup(44, 2, 4, 96);
        let config = VerifierConfig::for_circuit(&circuit, 96, 0);
        assert!(matches!(
            verify(ProofAccess::new(&other_proof), &circuit, &config),
            Err(VerifyError::ShapeMismatch { .. })
        ));
    }

    // -- estimator ---------------------------------------------------------

    #[test]
    fn estimator_on_identical_states_is_exactly_one() {
        let circuit = random_circuit(3, 6, &mut chacha(50));
        let psi = simulate(&circuit).unwrap().pop().unwrap();
        let mut rng = BitRng::from_seed(3);
        for k in [1usize, 7, 100] {
            let est = estimate_between_states(&psi, &psi, k, &mut rng);
            assert_eq!(est.gamma_hat, Complex64::new(1.0, 0.0));
            assert_eq!(est.k, k);
        }
    }

    #[test]
    fn estimator_tracks_a_known_overlap() {
        // ψ = H|0⟩, φ = |0⟩: ⟨ψ|φ⟩ = 1/√2.
        let psi = StateVector::from_amplitudes(
            1,
            vec![
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        let phi = StateVector::basis_state(&bs("0"));
        let k = 10_000;
        let mut rng = BitRng::from_seed(4);
        let est = estimate_between_states(&psi, &phi, k, &mut rng);
        let err = (est.gamma_hat - Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm();
        assert!(err <= 3.0 / (k as f64).sqrt(), "err = {err}");
    }

    #[test]
    fn estimator_zero_amplitude_ratio_convention() {
        // ψ = |0⟩ never samples the string where φ lives: γ̂ estimates
        // ⟨ψ|φ⟩ = 0 by the ratio-0 rule without dividing by zero.
        let psi = StateVector::basis_state(&bs("0"));
        let phi = StateVector::basis_state(&bs("1"));
        let mut rng = BitRng::from_seed(5);
        let est = estimate_between_states(&psi, &phi, 50, &mut rng);
        assert_eq!(est.gamma_hat, Complex64::new(0.0, 0.0));
    }
}
