//! The end-to-end problem instance: Forrelation.
//!
//! Two n-bit Boolean functions are "forrelated" when the second correlates
//! with the Fourier transform of the first; the functional Φ measures this.
//! A YES instance promises Φ ≥ 0.6, a NO instance |Φ| ≤ 0.01, and a fixed
//! 3n+2-gate circuit — Hadamard layers sandwiching the two oracle calls —
//! lands on 0ⁿ with amplitude exactly Φ. Proving and verifying that circuit
//! therefore decides the promise.
//!
//! The functional is evaluated with a fast Walsh–Hadamard transform in
//! integer arithmetic (the transform of a ±1 vector stays integral, so the
//! only rounding is the final 2^{−3n/2} scale); [`forrelator_double_sum`] is
//! the O(4ⁿ) definition kept as a cross-check.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::sim::{gates, AcceptancePredicate, BooleanOracle, Circuit, Gate, OracleTable, SimError};

/// Promise floor for YES instances.
pub const YES_PHI_MIN: f64 = 0.6;
/// Promise ceiling for NO instances.
pub const NO_PHI_MAX: f64 = 0.01;
/// Acceptance-probability threshold of the built circuit (= 0.6²).
pub const CIRCUIT_THRESHOLD: f64 = 0.36;

#[derive(Debug, thiserror::Error)]
pub enum ForrelationError {
    #[error("oracle arities disagree: f1 on {f1_n} bits, f2 on {f2_n}")]
    SizeMismatch { f1_n: usize, f2_n: usize },
    #[error("YES generation needs n ≥ 2, got n = {n}")]
    YesNeedsHeadroom { n: usize },
    #[error("no {label} instance found in {attempts} attempts")]
    AttemptsExhausted { label: Label, attempts: u64 },
    #[error("instance file: {reason}")]
    BadInstance { reason: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Yes => "YES",
            Label::No => "NO",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ForrelationInstance {
    pub n: usize,
    pub f1: BooleanOracle,
    pub f2: BooleanOracle,
    /// Cached forrelator value for (f1, f2).
    pub phi: f64,
    pub label: Label,
}

/// In-place unnormalized Walsh–Hadamard transform.
fn fwht(v: &mut [i64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            for i in 0..h {
                let (a, b) = (block[i], block[i + h]);
                block[i] = a + b;
                block[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// The signed transform Σ_x (−1)^{f1(x)}(−1)^{x·y} for every y.
fn fourier_signs(f1: &BooleanOracle) -> Vec<i64> {
    let mut v: Vec<i64> = (0..(1u64 << f1.n()))
        .map(|x| if f1.peek_index(x) { -1 } else { 1 })
        .collect();
    fwht(&mut v);
    v
}

/// Φ = 2^{−3n/2} Σ_{x,y} (−1)^{f1(x)+x·y+f2(y)}, via the transform.
pub fn forrelator(f1: &BooleanOracle, f2: &BooleanOracle) -> Result<f64, ForrelationError> {
    if f1.n() != f2.n() {
        return Err(ForrelationError::SizeMismatch { f1_n: f1.n(), f2_n: f2.n() });
    }
    let n = f1.n();
    let ghat = fourier_signs(f1);
    let sum: i64 = ghat
        .iter()
        .enumerate()
        .map(|(y, &g)| if f2.peek_index(y as u64) { -g } else { g })
        .sum();
    Ok(sum as f64 * f64::exp2(-1.5 * n as f64))
}

/// The definition, summed literally in O(4ⁿ) — the test oracle for
/// [`forrelator`].
pub fn forrelator_double_sum(f1: &BooleanOracle, f2: &BooleanOracle) -> Result<f64, ForrelationError> {
    if f1.n() != f2.n() {
        return Err(ForrelationError::SizeMismatch { f1_n: f1.n(), f2_n: f2.n() });
    }
    let n = f1.n();
    let mut sum: i64 = 0;
    for x in 0..(1u64 << n) {
        for y in 0..(1u64 << n) {
            let parity = (x & y).count_ones() % 2 == 1;
            let negative = f1.peek_index(x) ^ parity ^ f2.peek_index(y);
            sum += if negative { -1 } else { 1 };
        }
    }
    Ok(sum as f64 * f64::exp2(-1.5 * n as f64))
}

impl ForrelationInstance {
    /// The verification circuit: H on each qubit, the f1 oracle, H again,
    /// the f2 oracle, H again — 3n+2 gates, accepting on prefix 0ⁿ at
    /// threshold 0.36. Its final amplitude at 0ⁿ equals Φ.
    pub fn build_circuit(&self) -> Circuit {
        let n = self.n;
        let mut gate_list: Vec<Gate> = Vec::with_capacity(3 * n + 2);
        let hadamard_layer = |gs: &mut Vec<Gate>| {
            for q in 0..n {
                gs.push(gates::hadamard(q));
            }
        };
        hadamard_layer(&mut gate_list);
        gate_list.push(Gate::Oracle { oracle_id: "f1".into() });
        hadamard_layer(&mut gate_list);
        gate_list.push(Gate::Oracle { oracle_id: "f2".into() });
        hadamard_layer(&mut gate_list);

        let mut oracles = OracleTable::new();
        oracles.insert("f1".into(), self.f1.clone());
        oracles.insert("f2".into(), self.f2.clone());
        Circuit {
            n,
            gates: gate_list,
            oracles,
            acceptance: AcceptancePredicate {
                prefix: BitString::zeros(n),
                threshold: CIRCUIT_THRESHOLD,
            },
        }
    }
}

/// Draws an instance satisfying the promise for `label`, retrying up to
/// `max_attempts` draws. NO: independent uniform functions, kept when
/// |Φ| ≤ 0.01. YES: uniform f1 with f2 = sign of f1's Fourier transform
/// (f2(y) = 1 exactly when the transform is negative at y), kept when
/// Φ ≥ 0.6 — this construction concentrates Φ near √(2/π) ≈ 0.80, so
/// rejections are rare for n ≥ 4.
pub fn gen_instance(
    n: usize,
    label: Label,
    rng: &mut impl Rng,
    max_attempts: u64,
) -> Result<ForrelationInstance, ForrelationError> {
    if label == Label::Yes && n < 2 {
        return Err(ForrelationError::YesNeedsHeadroom { n });
    }
    for _ in 0..max_attempts {
        let f1 = BooleanOracle::random(n, rng);
        let (f2, phi) = match label {
            Label::No => {
                let f2 = BooleanOracle::random(n, rng);
                let phi = forrelator(&f1, &f2)?;
                (f2, phi)
            }
            Label::Yes => {
                let ghat = fourier_signs(&f1);
                let f2 = BooleanOracle::from_fn(n, |y| ghat[y as usize] < 0);
                let phi = forrelator(&f1, &f2)?;
                (f2, phi)
            }
        };
        let ok = match label {
            Label::Yes => phi >= YES_PHI_MIN,
            Label::No => phi.abs() <= NO_PHI_MAX,
        };
        if ok {
            return Ok(ForrelationInstance { n, f1, f2, phi, label });
        }
    }
    Err(ForrelationError::AttemptsExhausted { label, attempts: max_attempts })
}

// ---------------------------------------------------------------------------
// Instance files

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    f1: String,
    f2: String,
    phi: f64,
    label: Label,
}

impl ForrelationInstance {
    pub fn to_json_string(&self) -> String {
        let file = InstanceFile {
            n: self.n,
            f1: self.f1.to_hex(),
            f2: self.f2.to_hex(),
            phi: self.phi,
            label: self.label,
        };
        serde_json::to_string_pretty(&file).expect("instance serialization cannot fail")
    }

    /// Parses an instance, recomputes Φ from the truth tables, and enforces
    /// the promise for the declared label. The stored phi must match the
    /// recomputation — a stale cache means the file was edited.
    pub fn from_json_str(text: &str) -> Result<Self, ForrelationError> {
        let file: InstanceFile = serde_json::from_str(text)?;
        let f1 = BooleanOracle::from_hex(file.n, "f1", &file.f1)?;
        let f2 = BooleanOracle::from_hex(file.n, "f2", &file.f2)?;
        let phi = forrelator(&f1, &f2)?;
        if (phi - file.phi).abs() > 1e-9 {
            return Err(ForrelationError::BadInstance {
                reason: format!("stored phi {} but truth tables give {}", file.phi, phi),
            });
        }
        let promise_ok = match file.label {
            Label::Yes => phi >= YES_PHI_MIN,
            Label::No => phi.abs() <= NO_PHI_MAX,
        };
        if !promise_ok {
            return Err(ForrelationError::BadInstance {
                reason: format!("label {} but phi = {}", file.label, phi),
            });
        }
        Ok(ForrelationInstance { n: file.n, f1, f2, phi, label: file.label })
    }
}
