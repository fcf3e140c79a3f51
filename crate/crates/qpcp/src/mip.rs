//! Two-prover compilation of the spot-checking verifier.
//!
//! One round: the verifier ships its coin seed R to the first prover, who
//! must answer the *entire* read schedule those coins induce — q_π entries,
//! a length fixed by the circuit shape alone. The verifier then replays its
//! algorithm, feeding reads from that answer list in order and forwarding
//! oracle queries to the real oracles. If the replay rejects, the round
//! rejects outright; otherwise one read position j is challenged: its flat
//! location goes to the second prover, who answers from a committed proof
//! without ever seeing R, and the round accepts iff the two answers match
//! bit for bit. The second prover's location→entry map *is* a proof (see
//! [`extract_proof`]), which is what reduces cheating in the protocol to
//! cheating against the verifier itself: a first prover who deviates from
//! that proof is caught with probability at least 1/q_π per round, and
//! sequential repetition with fresh coins drives the gap home.
//!
//! Messages travel as fixed-width entries (kind byte plus padded encoding),
//! so per-round communication is 128 + q_π·w + ⌈log₂ N⌉ + w bits for entry
//! width w — exponential in n only through q_π and the location space N.

use std::cell::RefCell;
use std::rc::Rc;

use serde_json::json;

use crate::fixed::{phase_component_bytes, prob_entry_bytes, FixedPhase, FixedProb};
use crate::proof::{
    EntryValue, PcpProof, ProofAccess, ProofAddress, ProofDims, ProofError, ProofSource,
};
use crate::rng::BitRng;
use crate::sim::Circuit;
use crate::verifier::{
    expected_proof_queries, verify_with_mode, Verdict, VerifierConfig, VerifyError, VerifyMode,
};

#[derive(Clone, Copy, Debug)]
pub struct MipConfig {
    /// Sequential repetitions.
    pub rounds: u64,
    /// Entry encoding width the protocol speaks.
    pub b: u32,
    /// Configuration of the simulated verifier (its seed field is replaced
    /// by the per-round R).
    pub pcp_config: VerifierConfig,
}

/// On-the-wire width of one entry message: a kind byte, then the entry's
/// file encoding zero-padded so probs and phases are indistinguishable by
/// length.
pub fn wire_entry_bytes(b: u32) -> usize {
    1 + prob_entry_bytes(b).max(2 * phase_component_bytes(b))
}

pub fn entry_wire_bytes(e: &EntryValue, b: u32) -> Vec<u8> {
    let mut out = Vec::with_capacity(wire_entry_bytes(b));
    out.push(match e {
        EntryValue::Prob(_) => 0u8,
        EntryValue::Phase(_) => 1u8,
    });
    out.extend_from_slice(&e.file_bytes(b));
    out.resize(wire_entry_bytes(b), 0);
    out
}

pub fn entry_wire_hex(e: &EntryValue, b: u32) -> String {
    hex::encode(entry_wire_bytes(e, b))
}

// ---------------------------------------------------------------------------
// Prover strategies

/// The first prover: one deterministic message per coin seed, covering the
/// verifier's whole read schedule.
pub trait ProverOne {
    fn answer(&self, r_seed: u128) -> Vec<EntryValue>;
}

/// The second prover: a deterministic entry per flat proof location — in
/// other words, a proof. Strategies take `&self` and hold no channel to the
/// other prover; the types make mid-protocol coordination impossible.
pub trait ProverTwo {
    fn answer(&self, location: u64) -> EntryValue;
}

/// Answers the read schedule by running the verifier's full schedule
/// against a fixed proof — honest when the proof is honest, and equally
/// usable to commit to any dishonest proof.
pub struct ProofProverOne {
    circuit: Circuit,
    proof: PcpProof,
    base: VerifierConfig,
}

impl ProofProverOne {
    pub fn new(circuit: &Circuit, proof: PcpProof, base: VerifierConfig) -> Result<Self, VerifyError> {
        let dims = proof.dims();
        if dims.n != circuit.n || dims.m != circuit.m() {
            return Err(VerifyError::ShapeMismatch {
                proof_n: dims.n,
                proof_m: dims.m,
                circuit_n: circuit.n,
                circuit_m: circuit.m(),
            });
        }
        Ok(ProofProverOne { circuit: circuit.clone(), proof, base })
    }
}

impl ProverOne for ProofProverOne {
    fn answer(&self, r_seed: u128) -> Vec<EntryValue> {
        let config = VerifierConfig { rng_seed: r_seed, ..self.base };
        let verdict = verify_with_mode(
            ProofAccess::new(&self.proof),
            &self.circuit,
            &config,
            VerifyMode::FullSchedule,
        )
        .expect("shapes validated at construction");
        verdict.stats.trace.into_iter().map(|rec| rec.value).collect()
    }
}

/// Wraps another first prover and corrupts exactly one answer (1-indexed):
/// with the supplied value when one is given, otherwise by flipping the low
/// bit of the honest raw encoding — a deviation far below the verifier's
/// tolerance, so only the consistency challenge can catch it.
pub struct FirstLieProverOne<P: ProverOne> {
    pub inner: P,
    pub position: u64,
    /// Replacement for the corrupted slot; `None` means low-bit flip.
    pub value: Option<EntryValue>,
    pub b: u32,
}

fn flip_low_bit(e: EntryValue, b: u32) -> EntryValue {
    match e {
        EntryValue::Prob(p) => EntryValue::Prob(FixedProb::from_raw(p.raw() ^ 1, b)),
        EntryValue::Phase(ph) => {
            let (re, im) = ph.raw();
            EntryValue::Phase(FixedPhase::from_raw(re ^ 1, im, b))
        }
    }
}

impl<P: ProverOne> ProverOne for FirstLieProverOne<P> {
    fn answer(&self, r_seed: u128) -> Vec<EntryValue> {
        let mut answers = self.inner.answer(r_seed);
        if let Some(slot) = answers.get_mut(self.position as usize - 1) {
            *slot = self.value.unwrap_or_else(|| flip_low_bit(*slot, self.b));
        }
        answers
    }
}

/// Answers every location from a committed proof.
pub struct ProofProverTwo {
    proof: PcpProof,
}

impl ProofProverTwo {
    pub fn new(proof: PcpProof) -> Self {
        ProofProverTwo { proof }
    }
}

impl ProverTwo for ProofProverTwo {
    fn answer(&self, location: u64) -> EntryValue {
        let addr = ProofAddress::from_flat(&self.proof.dims(), location)
            .expect("protocol only challenges in-range locations");
        self.proof.entry(&addr).expect("in-range address")
    }
}

/// All-zero entries: the strategy whose extracted proof decodes to |0ⁿ⟩
/// with unit phases in every segment.
pub struct ZeroProverTwo {
    pub dims: ProofDims,
}

impl ProverTwo for ZeroProverTwo {
    fn answer(&self, location: u64) -> EntryValue {
        match ProofAddress::from_flat(&self.dims, location)
            .expect("protocol only challenges in-range locations")
            .kind
        {
            crate::proof::AddressKind::Prob(_) => {
                EntryValue::Prob(FixedProb::from_raw(0, self.dims.b))
            }
            crate::proof::AddressKind::Phase(_) => {
                EntryValue::Phase(FixedPhase::from_raw(0, 0, self.dims.b))
            }
        }
    }
}

/// Deterministic noise: each location's entry comes from its own PRNG
/// substream, so answers are random-looking yet a fixed strategy.
pub struct RandomProverTwo {
    pub dims: ProofDims,
    pub seed: u128,
}

impl ProverTwo for RandomProverTwo {
    fn answer(&self, location: u64) -> EntryValue {
        let mut rng = BitRng::from_seed(self.seed).substream(location);
        let b = self.dims.b;
        match ProofAddress::from_flat(&self.dims, location)
            .expect("protocol only challenges in-range locations")
            .kind
        {
            crate::proof::AddressKind::Prob(_) => {
                EntryValue::Prob(FixedProb::from_raw(rng.draw_bits(8 * prob_entry_bytes(b) as u32), b))
            }
            crate::proof::AddressKind::Phase(_) => {
                let w = 8 * phase_component_bytes(b) as u32;
                let re = rng.draw_bits(w) as i128;
                let im = rng.draw_bits(w) as i128;
                EntryValue::Phase(FixedPhase::from_raw(re, im, b))
            }
        }
    }
}

/// Materializes the second prover's strategy as an explicit proof by asking
/// it for every location.
pub fn extract_proof(p2: &dyn ProverTwo, dims: ProofDims) -> Result<PcpProof, ProofError> {
    let mut proof = PcpProof::zeroed(dims)?;
    for flat in 0..dims.total_entries() {
        let addr = ProofAddress::from_flat(&dims, flat)?;
        proof.set_entry(&addr, p2.answer(flat))?;
    }
    Ok(proof)
}

// ---------------------------------------------------------------------------
// Scripted simulation

/// Feeds the verifier from a fixed answer list, in read order, recording
/// the flat location of every attempted read.
struct ScriptedSource<'a> {
    dims: ProofDims,
    answers: &'a [EntryValue],
    pos: usize,
    locations: Rc<RefCell<Vec<u64>>>,
}

impl ProofSource for ScriptedSource<'_> {
    fn dims(&self) -> ProofDims {
        self.dims
    }

    fn fetch(&mut self, addr: &ProofAddress) -> Result<EntryValue, ProofError> {
        self.locations.borrow_mut().push(addr.flat_index(&self.dims));
        let value = *self
            .answers
            .get(self.pos)
            .ok_or(ProofError::AnswersExhausted { answered: self.pos })?;
        if !value.matches_kind(&addr.kind) {
            return Err(ProofError::KindMismatch { addr: *addr });
        }
        self.pos += 1;
        Ok(value)
    }
}

/// Outcome of replaying the verifier on a scripted answer list.
pub enum SimOutcome {
    Completed(Verdict),
    /// The list ran out or an answer had the wrong kind at read `queried`
    /// (0-indexed) — an invalid first-prover message.
    ScriptFailure { queried: usize },
}

/// Replays the verifier (early-exit, seed `r_seed`) against `answers`,
/// returning the outcome and the flat locations of all attempted reads.
pub fn simulate_with_answers(
    circuit: &Circuit,
    dims: ProofDims,
    answers: &[EntryValue],
    base: &VerifierConfig,
    r_seed: u128,
) -> Result<(SimOutcome, Vec<u64>), VerifyError> {
    let locations = Rc::new(RefCell::new(Vec::new()));
    let source = ScriptedSource { dims, answers, pos: 0, locations: Rc::clone(&locations) };
    let config = VerifierConfig { rng_seed: r_seed, ..*base };
    let result = verify_with_mode(ProofAccess::untraced(source), circuit, &config, VerifyMode::EarlyExit);
    let locations = Rc::try_unwrap(locations).expect("source dropped by verify").into_inner();
    match result {
        Ok(verdict) => Ok((SimOutcome::Completed(verdict), locations)),
        Err(VerifyError::Proof(
            ProofError::AnswersExhausted { .. } | ProofError::KindMismatch { .. },
        )) => Ok((SimOutcome::ScriptFailure { queried: locations.len() }, locations)),
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Protocol execution

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RejectStage {
    /// The replayed verifier rejected (or the first prover's message was
    /// malformed).
    Simulation,
    /// The challenged answer disagreed with the second prover.
    Consistency,
}

#[derive(Clone, Debug)]
pub struct ChallengeRecord {
    /// Challenged read, 1-indexed into the answer list.
    pub j: u64,
    /// Flat location sent to the second prover.
    pub location: u64,
    pub b_answer: EntryValue,
}

#[derive(Clone, Debug)]
pub struct MipTranscript {
    pub round: u64,
    pub r_seed: u128,
    /// P1's full message.
    pub answers: Vec<EntryValue>,
    /// Flat locations of the reads the replay performed, in order.
    pub locations: Vec<u64>,
    /// Present iff the replay accepted and the consistency phase ran.
    pub challenge: Option<ChallengeRecord>,
    pub accepted: bool,
    pub reject_stage: Option<RejectStage>,
}

impl MipTranscript {
    /// One JSON-lines object; entry values hex-encoded at width b.
    pub fn to_json(&self, b: u32) -> serde_json::Value {
        json!({
            "round": self.round,
            "r": format!("{:032x}", self.r_seed),
            "answers": self.answers.iter().map(|e| entry_wire_hex(e, b)).collect::<Vec<_>>(),
            "locations": self.locations,
            "j": self.challenge.as_ref().map(|c| c.j),
            "i_j": self.challenge.as_ref().map(|c| c.location),
            "b": self.challenge.as_ref().map(|c| entry_wire_hex(&c.b_answer, b)),
            "verdict": if self.accepted { "acc" } else { "rej" },
            "reject_stage": self.reject_stage.map(|s| match s {
                RejectStage::Simulation => "simulation",
                RejectStage::Consistency => "consistency",
            }),
        })
    }
}

#[derive(Debug)]
pub struct ProtocolResult {
    pub accepted: bool,
    pub transcripts: Vec<MipTranscript>,
    /// Message bits actually exchanged, all rounds.
    pub communication_bits: u64,
    /// Oracle queries made by the replayed verifier, all rounds.
    pub oracle_queries: u64,
}

fn location_bits(dims: &ProofDims) -> u64 {
    let n_pi = dims.total_entries();
    if n_pi <= 1 {
        1
    } else {
        u64::from(64 - (n_pi - 1).leading_zeros())
    }
}

/// Bits exchanged by one full round: seed, answer list, challenge location,
/// challenged entry.
pub fn round_communication_bits(circuit: &Circuit, config: &MipConfig) -> u64 {
    let dims = ProofDims { n: circuit.n, m: circuit.m(), b: config.b };
    let q_pi = expected_proof_queries(circuit, config.pcp_config.t);
    let ew = 8 * wire_entry_bytes(config.b) as u64;
    128 + q_pi * ew + location_bits(&dims) + ew
}

fn run_round_indexed(
    circuit: &Circuit,
    p1: &dyn ProverOne,
    p2: &dyn ProverTwo,
    config: &MipConfig,
    rng: &mut BitRng,
    round: u64,
    oracle_queries: &mut u64,
    communication_bits: &mut u64,
) -> Result<MipTranscript, VerifyError> {
    let dims = ProofDims { n: circuit.n, m: circuit.m(), b: config.b };
    let q_pi = expected_proof_queries(circuit, config.pcp_config.t);
    let ew = 8 * wire_entry_bytes(config.b) as u64;

    let r_seed = rng.draw_bits(128);
    let answers = p1.answer(r_seed);
    *communication_bits += 128 + q_pi * ew;

    // Too-short answer lists surface as exhaustion during the replay; extra
    // trailing answers are simply never consumed.
    let (outcome, locations) = simulate_with_answers(circuit, dims, &answers, &config.pcp_config, r_seed)?;
    let sim_accepted = match outcome {
        SimOutcome::Completed(verdict) => {
            *oracle_queries += verdict.stats.oracle_queries;
            verdict.is_acc()
        }
        SimOutcome::ScriptFailure { .. } => false,
    };
    if !sim_accepted {
        return Ok(MipTranscript {
            round,
            r_seed,
            answers,
            locations,
            challenge: None,
            accepted: false,
            reject_stage: Some(RejectStage::Simulation),
        });
    }
    debug_assert_eq!(locations.len() as u64, q_pi, "accepting replay covers the whole schedule");

    let j = rng.draw_index(q_pi) + 1;
    let location = locations[j as usize - 1];
    let b_answer = p2.answer(location);
    *communication_bits += location_bits(&dims) + ew;
    let accepted = answers[j as usize - 1] == b_answer;
    Ok(MipTranscript {
        round,
        r_seed,
        answers,
        locations,
        challenge: Some(ChallengeRecord { j, location, b_answer }),
        accepted,
        reject_stage: if accepted { None } else { Some(RejectStage::Consistency) },
    })
}

/// One round of the two-prover protocol.
pub fn run_round(
    circuit: &Circuit,
    p1: &dyn ProverOne,
    p2: &dyn ProverTwo,
    config: &MipConfig,
    rng: &mut BitRng,
) -> Result<MipTranscript, VerifyError> {
    let (mut oq, mut cb) = (0, 0);
    run_round_indexed(circuit, p1, p2, config, rng, 0, &mut oq, &mut cb)
}

/// Sequential repetition with fresh coins: accept iff every round accepts.
/// Stops at the first rejection.
pub fn run_protocol(
    circuit: &Circuit,
    p1: &dyn ProverOne,
    p2: &dyn ProverTwo,
    config: &MipConfig,
    rng: &mut BitRng,
) -> Result<ProtocolResult, VerifyError> {
    assert!(config.rounds >= 1, "protocol needs at least one round");
    let mut transcripts = Vec::new();
    let mut oracle_queries = 0;
    let mut communication_bits = 0;
    let mut accepted = true;
    for round in 0..config.rounds {
        let t = run_round_indexed(
            circuit,
            p1,
            p2,
            config,
            rng,
            round,
            &mut oracle_queries,
            &mut communication_bits,
        )?;
        let round_accepted = t.accepted;
        transcripts.push(t);
        if !round_accepted {
            accepted = false;
            break;
        }
    }
    Ok(ProtocolResult { accepted, transcripts, communication_bits, oracle_queries })
}
