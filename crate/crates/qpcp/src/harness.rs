//! Adversary strategies and Monte-Carlo experiment drivers.
//!
//! A tamper is a declarative, JSON-serializable edit to a proof: raw entry
//! edits, phase rotations, whole-segment substitutions with a controlled
//! overlap gap, or a first-prover deviation at the protocol level. Applying
//! one yields a new proof plus the *achieved* gap |1 − ⟨ψ̃_i|G_i ψ̃_{i−1}⟩|
//! at the edited segment — the quantity the rejection bounds are stated in.
//!
//! Experiments run seeded independent trials of either the standalone
//! verifier or the two-prover protocol against a tampered proof and report
//! the empirical acceptance rate with a Wilson 95% interval next to the
//! applicable theoretical bound. Every trial's seed is derived from the
//! master seed by counter, recorded in the report, and sufficient to replay
//! that trial alone.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::fixed::{FixedPhase, FixedProb};
use crate::mip::{
    run_protocol, FirstLieProverOne, MipConfig, ProofProverOne, ProofProverTwo, ProverOne,
};
use crate::proof::{EntryValue, PcpProof, ProofAccess, ProofAddress, ProofError};
use crate::rng::BitRng;
use crate::sim::{inner_product, Circuit, SimError, StateVector};
use crate::verifier::{
    compute_amplitude, eps_check_default, expected_proof_queries, local_check_amplitude,
    sample_input, verify, QueryBudget, VerifierConfig, VerifyError,
};

#[derive(Debug, thiserror::Error)]
pub enum TamperError {
    #[error("segment {segment} out of range for m = {m}")]
    InvalidSegment { segment: usize, m: usize },
    #[error("substitution gap {delta} outside [0, 2]")]
    BadDelta { delta: f64 },
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

// 128-bit raws as decimal strings: tagged-enum serialization buffers field
// values through a representation without 128-bit integers, so the numeric
// types cannot cross JSON directly.
mod dec_u128 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<u128, D::Error> {
        String::deserialize(de)?.parse().map_err(serde::de::Error::custom)
    }
}

mod dec_i128 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &i128, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<i128, D::Error> {
        String::deserialize(de)?.parse().map_err(serde::de::Error::custom)
    }
}

/// One raw entry edit inside a segment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EntryEdit {
    Prob {
        prefix: BitString,
        #[serde(with = "dec_u128")]
        raw: u128,
    },
    Phase {
        x: BitString,
        #[serde(with = "dec_i128")]
        raw_re: i128,
        #[serde(with = "dec_i128")]
        raw_im: i128,
    },
}

/// Replacement value for a first-prover deviation; the kind must match the
/// deviation slot or the replayed verifier rejects the message as malformed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WrongValue {
    Prob {
        #[serde(with = "dec_u128")]
        raw: u128,
    },
    Phase {
        #[serde(with = "dec_i128")]
        raw_re: i128,
        #[serde(with = "dec_i128")]
        raw_im: i128,
    },
}

/// A declarative proof tamper. All but `P1Deviation` edit the committed
/// proof; `P1Deviation` leaves it untouched and instead corrupts one answer
/// of the first prover's message in the two-prover protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum TamperSpec {
    /// Raw edits to segment 0, the claimed initial state.
    InitialStateLie { edits: Vec<EntryEdit> },
    /// Multiply the stored phase at (segment, x) by e^{iθ}. Angles 0 and ±π
    /// are applied in the raw domain (identity / exact component negation);
    /// other angles round through f64.
    PhaseCorruption { segment: usize, x: BitString, angle: f64 },
    /// Overwrite the stored conditional at (segment, prefix) with raw bits.
    ProbCorruption {
        segment: usize,
        prefix: BitString,
        #[serde(with = "dec_u128")]
        raw: u128,
    },
    /// Replace segment `segment` with the encoding of a state whose overlap
    /// with the honest successor G·ψ̃_{segment−1} is exactly 1 − delta,
    /// built by spherical interpolation toward a random orthogonal state.
    StateSubstitution { segment: usize, delta: f64 },
    /// Replace the last segment with an honest encoding of the basis state
    /// matching the acceptance prefix (zero-padded): the canonical
    /// cheat-the-output attack that passes the final-probability check and
    /// forces rejection into the last gate's propagation check.
    FinalSegmentForgery,
    /// First-prover deviation at 1-indexed answer `position`; `value` of
    /// `None` means low-bit flip of the honest entry.
    P1Deviation {
        position: u64,
        #[serde(default)]
        value: Option<WrongValue>,
    },
}

impl TamperSpec {
    pub fn label(&self) -> &'static str {
        match self {
            TamperSpec::InitialStateLie { .. } => "initial_state_lie",
            TamperSpec::PhaseCorruption { .. } => "phase_corruption",
            TamperSpec::ProbCorruption { .. } => "prob_corruption",
            TamperSpec::StateSubstitution { .. } => "state_substitution",
            TamperSpec::FinalSegmentForgery => "final_segment_forgery",
            TamperSpec::P1Deviation { .. } => "p1_deviation",
        }
    }
}

/// A tampered proof plus the overlap gap it opened.
#[derive(Debug)]
pub struct TamperOutcome {
    pub proof: PcpProof,
    /// |1 − ⟨ψ̃_i|G_i ψ̃_{i−1}⟩| at the edited segment i (against |0ⁿ⟩ for
    /// segment 0), measured on decoded states after the edit; 0 for
    /// `P1Deviation`.
    pub achieved_delta: f64,
}

/// What segment `i` *should* decode to, given its predecessor in `proof`:
/// G_i applied to the decoded segment i−1, or |0ⁿ⟩ for i = 0.
fn reference_state(proof: &PcpProof, circuit: &Circuit, i: usize) -> Result<StateVector, SimError> {
    if i == 0 {
        Ok(StateVector::zero_state(circuit.n))
    } else {
        proof.decode_state(i - 1).apply(circuit.gate(i), &circuit.oracles)
    }
}

fn segment_gap(proof: &PcpProof, circuit: &Circuit, i: usize) -> Result<f64, SimError> {
    let reference = reference_state(proof, circuit, i)?;
    let ip = inner_product(&proof.decode_state(i), &reference);
    Ok((Complex64::new(1.0, 0.0) - ip).norm())
}

/// A unit state orthogonal to `target`, from uniform random components
/// Gram-Schmidt-projected; redraws in the measure-zero degenerate case.
fn random_orthogonal(target: &StateVector, rng: &mut impl Rng) -> StateVector {
    let n = target.n();
    let dim = 1usize << n;
    loop {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
            .collect();
        let candidate = StateVector::from_amplitudes(n, v.clone()).expect("length 2^n");
        let overlap = inner_product(target, &candidate);
        for (c, t) in v.iter_mut().zip(target.amplitudes()) {
            *c -= overlap * t;
        }
        let norm_sqr: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if norm_sqr > 1e-12 {
            let scale = norm_sqr.sqrt().recip();
            for c in &mut v {
                *c *= scale;
            }
            return StateVector::from_amplitudes(n, v).expect("length 2^n");
        }
    }
}

/// Applies `spec` to a copy of `proof`, returning the tampered proof and
/// the achieved overlap gap. The RNG feeds only `StateSubstitution`'s
/// random direction; every other variant is deterministic.
pub fn apply_tamper(
    proof: &PcpProof,
    circuit: &Circuit,
    spec: &TamperSpec,
    rng: &mut impl Rng,
) -> Result<TamperOutcome, TamperError> {
    let dims = proof.dims();
    let check_segment = |segment: usize| -> Result<(), TamperError> {
        if segment > dims.m {
            return Err(TamperError::InvalidSegment { segment, m: dims.m });
        }
        Ok(())
    };
    let mut out = proof.clone();
    let edited = match spec {
        TamperSpec::InitialStateLie { edits } => {
            for edit in edits {
                match edit {
                    EntryEdit::Prob { prefix, raw } => out.set_entry(
                        &ProofAddress::prob(0, *prefix),
                        EntryValue::Prob(FixedProb::from_raw(*raw, dims.b)),
                    )?,
                    EntryEdit::Phase { x, raw_re, raw_im } => out.set_entry(
                        &ProofAddress::phase(0, *x),
                        EntryValue::Phase(FixedPhase::from_raw(*raw_re, *raw_im, dims.b)),
                    )?,
                }
            }
            0
        }
        TamperSpec::PhaseCorruption { segment, x, angle } => {
            check_segment(*segment)?;
            let addr = ProofAddress::phase(*segment, *x);
            let EntryValue::Phase(current) = out.entry(&addr)? else {
                unreachable!("phase address fetches a phase entry")
            };
            if *angle != 0.0 {
                let rotated = if angle.abs() == std::f64::consts::PI {
                    let (re, im) = current.raw();
                    FixedPhase::from_raw(-re, -im, dims.b)
                } else {
                    let z = current.decode(dims.b) * Complex64::from_polar(1.0, *angle);
                    FixedPhase::encode(z, dims.b)
                };
                out.set_entry(&addr, EntryValue::Phase(rotated))?;
            }
            *segment
        }
        TamperSpec::ProbCorruption { segment, prefix, raw } => {
            check_segment(*segment)?;
            out.set_entry(
                &ProofAddress::prob(*segment, *prefix),
                EntryValue::Prob(FixedProb::from_raw(*raw, dims.b)),
            )?;
            *segment
        }
        TamperSpec::StateSubstitution { segment, delta } => {
            check_segment(*segment)?;
            if !(0.0..=2.0).contains(delta) {
                return Err(TamperError::BadDelta { delta: *delta });
            }
            let target = reference_state(&out, circuit, *segment)?;
            let ortho = random_orthogonal(&target, rng);
            // ⟨target|ψ'⟩ = cos ω = 1 − δ exactly, before encoding.
            let cos = 1.0 - delta;
            let sin = (1.0 - cos * cos).max(0.0).sqrt();
            let amps: Vec<Complex64> = target
                .amplitudes()
                .iter()
                .zip(ortho.amplitudes())
                .map(|(t, o)| cos * t + sin * o)
                .collect();
            let replacement = StateVector::from_amplitudes(dims.n, amps).expect("length 2^n");
            out.replace_segment(*segment, &replacement)?;
            *segment
        }
        TamperSpec::FinalSegmentForgery => {
            let mut padded = circuit.acceptance.prefix;
            while padded.len() < dims.n {
                padded = padded.push(false);
            }
            out.replace_segment(dims.m, &StateVector::basis_state(&padded))?;
            dims.m
        }
        TamperSpec::P1Deviation { .. } => {
            return Ok(TamperOutcome { proof: out, achieved_delta: 0.0 });
        }
    };
    let achieved_delta = segment_gap(&out, circuit, edited)?;
    Ok(TamperOutcome { proof: out, achieved_delta })
}

// ---------------------------------------------------------------------------
// Per-sample detection measurement

#[derive(Clone, Copy, Debug)]
pub struct DetectionStats {
    pub samples: u64,
    pub detections: u64,
}

impl DetectionStats {
    pub fn rate(&self) -> f64 {
        self.detections as f64 / self.samples as f64
    }
}

/// Runs `samples` independent repetitions of one propagation-check
/// iteration at `gate`: draw x from segment `gate`, compare the claimed
/// amplitude against the local reconstruction from segment `gate`−1, and
/// count |η − α̃| ≥ eps. This is the per-sample event whose probability the
/// δ²/10 floor bounds.
pub fn measure_detection(
    proof: &PcpProof,
    circuit: &Circuit,
    gate: usize,
    eps: f64,
    samples: u64,
    rng: &mut BitRng,
) -> Result<DetectionStats, VerifyError> {
    assert!(gate >= 1 && gate <= circuit.m(), "gate index 1..=m");
    let mut access = ProofAccess::untraced(proof);
    let mut detections = 0;
    for _ in 0..samples {
        let x = sample_input(&mut access, gate, rng)?;
        let claimed = compute_amplitude(&mut access, gate, &x)?;
        let eta = local_check_amplitude(&mut access, circuit, gate, &x, circuit.gate(gate))?;
        if (eta - claimed).norm() >= eps {
            detections += 1;
        }
    }
    Ok(DetectionStats { samples, detections })
}

// ---------------------------------------------------------------------------
// Experiments

/// Wilson score interval for `successes`/`trials` at critical value `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials >= 1);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Pcp,
    Mip,
}

impl Protocol {
    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::Pcp => "pcp",
            Protocol::Mip => "mip",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Honest parties: acceptance probability exactly 1.
    Completeness,
    /// Standalone verifier against a gap-δ proof: acceptance ≤ (1−δ²/10)^t.
    PcpSoundness,
    /// One protocol round; for a committed proof with acceptance bound s,
    /// acceptance ≤ 1 − (1−s)/q_π, and a silent single-position deviation
    /// is caught exactly when challenged: acceptance ≤ 1 − 1/q_π.
    MipRoundSoundness,
    /// Sequential repetition of the round bound.
    MipRepeatedSoundness,
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::Completeness => "completeness",
            BoundKind::PcpSoundness => "pcp_soundness",
            BoundKind::MipRoundSoundness => "mip_round_soundness",
            BoundKind::MipRepeatedSoundness => "mip_repeated_soundness",
        }
    }
}

/// (1 − δ²/10)^t: the verifier's acceptance bound against a proof whose
/// worst segment gap is δ.
pub fn pcp_acceptance_bound(delta: f64, t: u64) -> f64 {
    let per_iteration = (delta * delta / 10.0).min(1.0);
    (1.0 - per_iteration).powf(t as f64)
}

mod hex_seed {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u128, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format!("{seed:032x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<u128, D::Error> {
        let s = String::deserialize(de)?;
        crate::rng::seed_from_hex(&s).map_err(serde::de::Error::custom)
    }
}

fn default_rounds() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    #[serde(default)]
    pub tamper: Option<TamperSpec>,
    pub trials: u64,
    /// Propagation-check iterations per gate in each verify run.
    pub t: u64,
    /// Fraction bits; must match the subject proof.
    pub b: u32,
    /// Protocol rounds per trial (MIP only).
    #[serde(default = "default_rounds")]
    pub rounds: u64,
    /// Override for the check tolerance; default derives from (n, b).
    #[serde(default)]
    pub eps_check: Option<f64>,
    #[serde(with = "hex_seed")]
    pub seed: u128,
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("bad experiment config: {reason}")]
    BadConfig { reason: String },
    #[error(transparent)]
    Tamper(#[from] TamperError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub protocol: Protocol,
    /// Tamper variant label, "none" for honest runs.
    pub tamper: String,
    pub trials: u64,
    pub accept_count: u64,
    pub accept_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub bound_kind: BoundKind,
    /// Theoretical acceptance bound the empirical rate is compared against.
    pub bound_value: f64,
    pub achieved_delta: f64,
    /// Per-trial verifier seeds (hex), in trial order; any single trial is
    /// reproducible from its seed alone.
    pub trial_seeds: Vec<String>,
}

impl ExperimentReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn csv_record(&self) -> ExperimentCsvRow<'_> {
        ExperimentCsvRow {
            protocol: self.protocol.as_str(),
            tamper: &self.tamper,
            trials: self.trials,
            accept_count: self.accept_count,
            accept_rate: self.accept_rate,
            wilson_low: self.wilson_low,
            wilson_high: self.wilson_high,
            bound_kind: self.bound_kind.as_str(),
            bound_value: self.bound_value,
            achieved_delta: self.achieved_delta,
        }
    }
}

/// Flat row for CSV emission (trial seeds live only in the JSON report).
#[derive(Serialize)]
pub struct ExperimentCsvRow<'a> {
    pub protocol: &'a str,
    pub tamper: &'a str,
    pub trials: u64,
    pub accept_count: u64,
    pub accept_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub bound_kind: &'a str,
    pub bound_value: f64,
    pub achieved_delta: f64,
}

/// Seed for trial `index`, derived from the master seed by counter. Stream
/// 0 is reserved for tamper construction.
fn trial_seed(master: u128, index: u64) -> u128 {
    BitRng::from_seed(master).substream(1 + index).draw_bits(128)
}

fn chacha_from_u128(seed: u128) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..16].copy_from_slice(&seed.to_le_bytes());
    ChaCha20Rng::from_seed(key)
}

enum P1Strategy {
    Honest(ProofProverOne),
    Deviating(FirstLieProverOne<ProofProverOne>),
}

impl ProverOne for P1Strategy {
    fn answer(&self, r_seed: u128) -> Vec<EntryValue> {
        match self {
            P1Strategy::Honest(p) => p.answer(r_seed),
            P1Strategy::Deviating(p) => p.answer(r_seed),
        }
    }
}

/// Runs `config.trials` independent seeded trials of the selected protocol
/// on `proof` after applying the configured tamper, in parallel, and
/// reports the acceptance statistics against the applicable bound.
pub fn run_experiment(
    circuit: &Circuit,
    proof: &PcpProof,
    config: &ExperimentConfig,
) -> Result<ExperimentReport, ExperimentError> {
    let dims = proof.dims();
    if config.trials < 1 {
        return Err(ExperimentError::BadConfig { reason: "trials must be >= 1".into() });
    }
    if config.b != dims.b {
        return Err(ExperimentError::BadConfig {
            reason: format!("config b = {} but proof stores b = {}", config.b, dims.b),
        });
    }
    if matches!(config.tamper, Some(TamperSpec::P1Deviation { .. }))
        && config.protocol == Protocol::Pcp
    {
        return Err(ExperimentError::BadConfig {
            reason: "p1_deviation is a protocol-level tamper; use the mip protocol".into(),
        });
    }

    let (tampered, achieved_delta) = match &config.tamper {
        None => (proof.clone(), 0.0),
        Some(spec) => {
            let tamper_seed = BitRng::from_seed(config.seed).substream(0).draw_bits(128);
            let outcome = apply_tamper(proof, circuit, spec, &mut chacha_from_u128(tamper_seed))?;
            (outcome.proof, outcome.achieved_delta)
        }
    };

    let pcp_config = VerifierConfig {
        t: config.t,
        eps_check: config.eps_check.unwrap_or_else(|| eps_check_default(dims.n, dims.b)),
        rng_seed: 0,
        budgets: QueryBudget::default(),
    };
    let seeds: Vec<u128> = (0..config.trials).map(|i| trial_seed(config.seed, i)).collect();

    let accepts: Vec<bool> = match config.protocol {
        Protocol::Pcp => seeds
            .par_iter()
            .map(|&s| {
                let trial_config = VerifierConfig { rng_seed: s, ..pcp_config };
                verify(ProofAccess::untraced(&tampered), circuit, &trial_config)
                    .map(|v| v.is_acc())
            })
            .collect::<Result<_, _>>()?,
        Protocol::Mip => {
            let p1 = match &config.tamper {
                Some(TamperSpec::P1Deviation { position, value }) => {
                    let honest = ProofProverOne::new(circuit, tampered.clone(), pcp_config)?;
                    let value = value.map(|w| match w {
                        WrongValue::Prob { raw } => {
                            EntryValue::Prob(FixedProb::from_raw(raw, dims.b))
                        }
                        WrongValue::Phase { raw_re, raw_im } => {
                            EntryValue::Phase(FixedPhase::from_raw(raw_re, raw_im, dims.b))
                        }
                    });
                    P1Strategy::Deviating(FirstLieProverOne {
                        inner: honest,
                        position: *position,
                        value,
                        b: dims.b,
                    })
                }
                _ => P1Strategy::Honest(ProofProverOne::new(circuit, tampered.clone(), pcp_config)?),
            };
            let p2 = ProofProverTwo::new(tampered.clone());
            let mip_config = MipConfig { rounds: config.rounds, b: dims.b, pcp_config };
            seeds
                .par_iter()
                .map(|&s| {
                    run_protocol(circuit, &p1, &p2, &mip_config, &mut BitRng::from_seed(s))
                        .map(|r| r.accepted)
                })
                .collect::<Result<_, _>>()?
        }
    };

    let accept_count = accepts.iter().filter(|&&a| a).count() as u64;
    let accept_rate = accept_count as f64 / config.trials as f64;
    let (wilson_low, wilson_high) = wilson_interval(accept_count, config.trials, 1.96);

    let (bound_kind, bound_value) = match (config.protocol, &config.tamper) {
        (_, None) => (BoundKind::Completeness, 1.0),
        (Protocol::Pcp, Some(_)) => {
            (BoundKind::PcpSoundness, pcp_acceptance_bound(achieved_delta, config.t))
        }
        (Protocol::Mip, Some(spec)) => {
            let q_pi = expected_proof_queries(circuit, config.t) as f64;
            let round_bound = match spec {
                TamperSpec::P1Deviation { .. } => 1.0 - 1.0 / q_pi,
                _ => {
                    let s = pcp_acceptance_bound(achieved_delta, config.t);
                    1.0 - (1.0 - s) / q_pi
                }
            };
            let kind = if config.rounds == 1 {
                BoundKind::MipRoundSoundness
            } else {
                BoundKind::MipRepeatedSoundness
            };
            (kind, round_bound.powf(config.rounds as f64))
        }
    };

    Ok(ExperimentReport {
        protocol: config.protocol,
        tamper: config.tamper.as_ref().map_or("none".into(), |s| s.label().to_string()),
        trials: config.trials,
        accept_count,
        accept_rate,
        wilson_low,
        wilson_high,
        bound_kind,
        bound_value,
        achieved_delta,
        trial_seeds: seeds.iter().map(|s| format!("{s:032x}")).collect(),
    })
}
