//! Statevector simulation of oracle circuits.
//!
//! Circuits act on n qubits with three gate kinds: arbitrary single-qubit
//! unitaries, arbitrary two-qubit unitaries on any ordered pair, and boolean
//! oracle gates acting as the diagonal (−1)^{f(x)} phase flip. Qubit 0 is the
//! most significant bit of a basis index, so measurement strings read qubit 0
//! first and a prefix of a string addresses a contiguous block of amplitudes.
//!
//! Oracle access is metered only through [`BooleanOracle::query`]; the
//! simulator itself uses the unmetered peek path, since simulation cost is
//! not part of any query budget.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;

/// Memory guard: statevectors are dense, 2^n complex doubles.
pub const MAX_QUBITS: usize = 24;

/// Gate matrices must satisfy ‖U†U − I‖_max within this tolerance.
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("qubit {q} out of range for {n} qubits")]
    QubitOutOfRange { q: usize, n: usize },
    #[error("two-qubit gate names the same qubit {q} twice")]
    DuplicateQubit { q: usize },
    #[error("gate {index} is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { index: usize, deviation: f64 },
    #[error("oracle id {id:?} not present in the circuit's oracle table")]
    UnknownOracle { id: String },
    #[error("oracle {id:?} is over {oracle_n} bits but the circuit has {n} qubits")]
    OracleArity { id: String, oracle_n: usize, n: usize },
    #[error("qubit count {n} outside supported range 1..={MAX_QUBITS}")]
    BadQubitCount { n: usize },
    #[error("acceptance threshold {threshold} outside (0, 1]")]
    BadThreshold { threshold: f64 },
    #[error("acceptance prefix of length {len} does not fit {n} qubits")]
    BadPrefix { len: usize, n: usize },
    #[error("amplitude vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("truth table hex for {id:?}: {reason}")]
    BadTable { id: String, reason: String },
    #[error("gate {index}: matrix has {got} entries, expected {expected}")]
    BadMatrix { index: usize, expected: usize, got: usize },
    #[error("circuit JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// A total boolean function on n-bit strings, bit-packed, with a metered
/// query counter safe under concurrent verifier trials.
#[derive(Debug)]
pub struct BooleanOracle {
    n: usize,
    table: Vec<u8>,
    queries: AtomicU64,
}

impl BooleanOracle {
    fn table_bytes(n: usize) -> usize {
        (1usize << n).div_ceil(8)
    }

    pub fn from_fn(n: usize, f: impl Fn(u64) -> bool) -> Self {
        assert!(n >= 1 && n <= MAX_QUBITS);
        let mut table = vec![0u8; Self::table_bytes(n)];
        for x in 0..(1u64 << n) {
            if f(x) {
                table[(x / 8) as usize] |= 1 << (7 - (x % 8));
            }
        }
        BooleanOracle { n, table, queries: AtomicU64::new(0) }
    }

    pub fn constant(n: usize, value: bool) -> Self {
        Self::from_fn(n, |_| value)
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let mut table = vec![0u8; Self::table_bytes(n)];
        rng.fill_bytes(&mut table);
        // Zero the padding bits so hex round trips are canonical.
        let used = 1usize << n;
        if used % 8 != 0 {
            let last = table.len() - 1;
            table[last] &= 0xffu8 << (8 - used % 8);
        }
        BooleanOracle { n, table, queries: AtomicU64::new(0) }
    }

    /// Parses the hex truth table: 2^n bits, x ascending, packed MSB-first
    /// into ceil(2^n/8) bytes.
    pub fn from_hex(n: usize, id: &str, hex_str: &str) -> Result<Self, SimError> {
        if n < 1 || n > MAX_QUBITS {
            return Err(SimError::BadQubitCount { n });
        }
        let table = hex::decode(hex_str).map_err(|e| SimError::BadTable {
            id: id.to_owned(),
            reason: e.to_string(),
        })?;
        if table.len() != Self::table_bytes(n) {
            return Err(SimError::BadTable {
                id: id.to_owned(),
                reason: format!(
                    "{} bytes encode {} bits, expected {} bits",
                    table.len(),
                    table.len() * 8,
                    1usize << n
                ),
            });
        }
        let used = 1usize << n;
        if used % 8 != 0 && table[table.len() - 1] & (0xffu8 >> (used % 8)) != 0 {
            return Err(SimError::BadTable {
                id: id.to_owned(),
                reason: "padding bits past 2^n must be zero".into(),
            });
        }
        Ok(BooleanOracle { n, table, queries: AtomicU64::new(0) })
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Unmetered read, for simulation and honest proving.
    pub fn peek_index(&self, x: u64) -> bool {
        debug_assert!(x < 1u64 << self.n);
        (self.table[(x / 8) as usize] >> (7 - (x % 8))) & 1 == 1
    }

    pub fn peek(&self, x: &BitString) -> bool {
        debug_assert_eq!(x.len(), self.n);
        self.peek_index(x.index())
    }

    /// Metered read: increments the query counter.
    pub fn query(&self, x: &BitString) -> bool {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.peek(x)
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

impl Clone for BooleanOracle {
    fn clone(&self) -> Self {
        BooleanOracle {
            n: self.n,
            table: self.table.clone(),
            queries: AtomicU64::new(self.query_count()),
        }
    }
}

impl PartialEq for BooleanOracle {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.table == other.table
    }
}

pub type OracleTable = BTreeMap<String, BooleanOracle>;

#[derive(Clone, Debug)]
pub enum Gate {
    Single { q: usize, matrix: [[Complex64; 2]; 2] },
    Two { q: usize, s: usize, matrix: [[Complex64; 4]; 4] },
    Oracle { oracle_id: String },
}

impl Gate {
    /// How many previous-segment amplitudes the verifier's local check of
    /// this gate touches.
    pub fn local_amplitudes(&self) -> usize {
        match self {
            Gate::Single { .. } => 2,
            Gate::Two { .. } => 4,
            Gate::Oracle { .. } => 1,
        }
    }

    pub fn is_oracle(&self) -> bool {
        matches!(self, Gate::Oracle { .. })
    }

    fn validate(&self, index: usize, n: usize, oracles: &OracleTable) -> Result<(), SimError> {
        let check_q = |q: usize| {
            if q >= n {
                Err(SimError::QubitOutOfRange { q, n })
            } else {
                Ok(())
            }
        };
        match self {
            Gate::Single { q, matrix } => {
                check_q(*q)?;
                check_unitary(index, &matrix.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            }
            Gate::Two { q, s, matrix } => {
                check_q(*q)?;
                check_q(*s)?;
                if q == s {
                    return Err(SimError::DuplicateQubit { q: *q });
                }
                check_unitary(index, &matrix.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            }
            Gate::Oracle { oracle_id } => {
                let f = oracles
                    .get(oracle_id)
                    .ok_or_else(|| SimError::UnknownOracle { id: oracle_id.clone() })?;
                if f.n() != n {
                    return Err(SimError::OracleArity {
                        id: oracle_id.clone(),
                        oracle_n: f.n(),
                        n,
                    });
                }
                Ok(())
            }
        }
    }
}

fn check_unitary(index: usize, rows: &[Vec<Complex64>]) -> Result<(), SimError> {
    let d = rows.len();
    let mut deviation = 0f64;
    for i in 0..d {
        for j in 0..d {
            // (U†U)_{ij} = Σ_k conj(U_{ki}) U_{kj}
            let mut acc = Complex64::new(0.0, 0.0);
            for row in rows {
                acc += row[i].conj() * row[j];
            }
            let target = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((acc - target).norm());
        }
    }
    if deviation > UNITARITY_TOL {
        return Err(SimError::NotUnitary { index, deviation });
    }
    Ok(())
}

/// Accept iff the measured string extends `prefix` with probability reaching
/// `threshold`.
#[derive(Clone, Debug, PartialEq)]
pub struct AcceptancePredicate {
    pub prefix: BitString,
    pub threshold: f64,
}

#[derive(Clone, Debug)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate>,
    pub oracles: OracleTable,
    pub acceptance: AcceptancePredicate,
}

impl Circuit {
    /// Gate count m; segments run 0..=m.
    pub fn m(&self) -> usize {
        self.gates.len()
    }

    /// The gate producing segment `i`, 1-indexed like the segments.
    pub fn gate(&self, i: usize) -> &Gate {
        assert!(i >= 1 && i <= self.m());
        &self.gates[i - 1]
    }

    pub fn oracle(&self, id: &str) -> Result<&BooleanOracle, SimError> {
        self.oracles
            .get(id)
            .ok_or_else(|| SimError::UnknownOracle { id: id.to_owned() })
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.n < 1 || self.n > MAX_QUBITS {
            return Err(SimError::BadQubitCount { n: self.n });
        }
        for (idx, g) in self.gates.iter().enumerate() {
            g.validate(idx, self.n, &self.oracles)?;
        }
        for (id, f) in &self.oracles {
            if f.n() != self.n {
                return Err(SimError::OracleArity {
                    id: id.clone(),
                    oracle_n: f.n(),
                    n: self.n,
                });
            }
        }
        let th = self.acceptance.threshold;
        if !(th > 0.0 && th <= 1.0) {
            return Err(SimError::BadThreshold { threshold: th });
        }
        if self.acceptance.prefix.len() > self.n {
            return Err(SimError::BadPrefix {
                len: self.acceptance.prefix.len(),
                n: self.n,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n: usize) -> Self {
        Self::basis_state(&BitString::zeros(n))
    }

    pub fn basis_state(x: &BitString) -> Self {
        let n = x.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[x.index() as usize] = Complex64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self, SimError> {
        if amps.len() != 1usize << n {
            return Err(SimError::DimensionMismatch {
                expected: 1 << n,
                got: amps.len(),
            });
        }
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp_index(&self, x: usize) -> Complex64 {
        self.amps[x]
    }

    pub fn amp(&self, x: &BitString) -> Complex64 {
        assert_eq!(x.len(), self.n);
        self.amps[x.index() as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies one gate, returning the new state.
    pub fn apply(&self, gate: &Gate, oracles: &OracleTable) -> Result<StateVector, SimError> {
        let n = self.n;
        let dim = self.amps.len();
        let mut out = self.amps.clone();
        match gate {
            Gate::Single { q, matrix } => {
                if *q >= n {
                    return Err(SimError::QubitOutOfRange { q: *q, n });
                }
                let mask = 1usize << (n - 1 - q);
                for idx in 0..dim {
                    if idx & mask == 0 {
                        let a0 = self.amps[idx];
                        let a1 = self.amps[idx | mask];
                        out[idx] = matrix[0][0] * a0 + matrix[0][1] * a1;
                        out[idx | mask] = matrix[1][0] * a0 + matrix[1][1] * a1;
                    }
                }
            }
            Gate::Two { q, s, matrix } => {
                if *q >= n {
                    return Err(SimError::QubitOutOfRange { q: *q, n });
                }
                if *s >= n {
                    return Err(SimError::QubitOutOfRange { q: *s, n });
                }
                if q == s {
                    return Err(SimError::DuplicateQubit { q: *q });
                }
                let mq = 1usize << (n - 1 - q);
                let ms = 1usize << (n - 1 - s);
                for idx in 0..dim {
                    if idx & (mq | ms) == 0 {
                        // Local basis order (x_q x_s): 00, 01, 10, 11.
                        let locals = [idx, idx | ms, idx | mq, idx | mq | ms];
                        let a = locals.map(|i| self.amps[i]);
                        for (r, &dst) in locals.iter().enumerate() {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for c in 0..4 {
                                acc += matrix[r][c] * a[c];
                            }
                            out[dst] = acc;
                        }
                    }
                }
            }
            Gate::Oracle { oracle_id } => {
                let f = oracles
                    .get(oracle_id)
                    .ok_or_else(|| SimError::UnknownOracle { id: oracle_id.clone() })?;
                if f.n() != n {
                    return Err(SimError::OracleArity {
                        id: oracle_id.clone(),
                        oracle_n: f.n(),
                        n,
                    });
                }
                for (idx, amp) in out.iter_mut().enumerate() {
                    if f.peek_index(idx as u64) {
                        *amp = -*amp;
                    }
                }
            }
        }
        Ok(StateVector { n, amps: out })
    }

    /// Probability that a measurement string extends `prefix`. An empty
    /// prefix is a vacuous constraint and yields 1 exactly, with no
    /// summation.
    pub fn acceptance_probability(&self, pred: &AcceptancePredicate) -> f64 {
        let l = pred.prefix.len();
        if l == 0 {
            return 1.0;
        }
        assert!(l <= self.n);
        let block = 1usize << (self.n - l);
        let start = (pred.prefix.index() as usize) << (self.n - l);
        self.amps[start..start + block]
            .iter()
            .map(|a| a.norm_sqr())
            .sum()
    }
}

/// ⟨u|v⟩ with the conjugate on `u`, summed in index order.
pub fn inner_product(u: &StateVector, v: &StateVector) -> Complex64 {
    assert_eq!(u.n, v.n);
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in u.amps.iter().zip(&v.amps) {
        acc += a.conj() * b;
    }
    acc
}

/// Runs the circuit on |0^n⟩, returning all m+1 intermediate states;
/// element i is the state after gate i.
pub fn simulate(circuit: &Circuit) -> Result<Vec<StateVector>, SimError> {
    circuit.validate()?;
    let mut states = Vec::with_capacity(circuit.m() + 1);
    states.push(StateVector::zero_state(circuit.n));
    for gate in &circuit.gates {
        let next = states.last().unwrap().apply(gate, &circuit.oracles)?;
        states.push(next);
    }
    Ok(states)
}

pub mod gates {
    //! Stock gate constructors and random unitaries.

    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn hadamard(q: usize) -> Gate {
        let h = FRAC_1_SQRT_2;
        Gate::Single {
            q,
            matrix: [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        }
    }

    pub fn pauli_x(q: usize) -> Gate {
        Gate::Single {
            q,
            matrix: [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        }
    }

    pub fn t_gate(q: usize) -> Gate {
        let w = Complex64::from_polar(1.0, PI / 4.0);
        Gate::Single {
            q,
            matrix: [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), w]],
        }
    }

    /// Controlled-NOT with control `q`, target `s`.
    pub fn cnot(q: usize, s: usize) -> Gate {
        let mut m = [[c(0.0, 0.0); 4]; 4];
        m[0][0] = c(1.0, 0.0);
        m[1][1] = c(1.0, 0.0);
        m[2][3] = c(1.0, 0.0);
        m[3][2] = c(1.0, 0.0);
        Gate::Two { q, s, matrix: m }
    }

    /// One standard normal via Box-Muller.
    fn gauss(rng: &mut impl Rng) -> f64 {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        (-2.0 * (1.0 - u).ln()).sqrt() * (2.0 * PI * v).cos()
    }

    fn random_rows<const D: usize>(rng: &mut impl Rng) -> [[Complex64; D]; D] {
        // Gaussian matrix orthonormalized row by row (modified Gram-Schmidt):
        // Haar-ish, and unitary to machine precision, which is all the tests
        // and gate pool need.
        let mut rows = [[Complex64::new(0.0, 0.0); D]; D];
        for row in rows.iter_mut() {
            for e in row.iter_mut() {
                *e = Complex64::new(gauss(rng), gauss(rng));
            }
        }
        for i in 0..D {
            for j in 0..i {
                let proj: Complex64 = (0..D).map(|k| rows[j][k].conj() * rows[i][k]).sum();
                for k in 0..D {
                    let d = proj * rows[j][k];
                    rows[i][k] -= d;
                }
            }
            let norm: f64 = rows[i].iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
            for e in rows[i].iter_mut() {
                *e /= norm;
            }
        }
        rows
    }

    pub fn random_single(q: usize, rng: &mut impl Rng) -> Gate {
        Gate::Single { q, matrix: random_rows::<2>(rng) }
    }

    pub fn random_two(q: usize, s: usize, rng: &mut impl Rng) -> Gate {
        Gate::Two { q, s, matrix: random_rows::<4>(rng) }
    }
}

/// A random circuit from the pool {H, T, CNOT, random 2×2, random 4×4,
/// oracle}, with an acceptance predicate the honest computation satisfies
/// with slack (the best prefix of a small random length, threshold 0.1% under
/// its actual probability).
pub fn random_circuit(n: usize, m: usize, rng: &mut impl Rng) -> Circuit {
    assert!(n >= 1 && n <= MAX_QUBITS);
    let mut oracles = OracleTable::new();
    let mut gates = Vec::with_capacity(m);
    for _ in 0..m {
        let two_qubit_ok = n >= 2;
        let kind = rng.random_range(0..6u32);
        let q = rng.random_range(0..n);
        let gate = match kind {
            0 => gates::hadamard(q),
            1 => gates::t_gate(q),
            2 if two_qubit_ok => {
                let s = (q + rng.random_range(1..n)) % n;
                gates::cnot(q, s)
            }
            3 => gates::random_single(q, rng),
            4 if two_qubit_ok => {
                let s = (q + rng.random_range(1..n)) % n;
                gates::random_two(q, s, rng)
            }
            5 => {
                let id = format!("o{}", oracles.len());
                oracles.insert(id.clone(), BooleanOracle::random(n, rng));
                Gate::Oracle { oracle_id: id }
            }
            _ => gates::random_single(q, rng),
        };
        gates.push(gate);
    }
    let mut circuit = Circuit {
        n,
        gates,
        oracles,
        acceptance: AcceptancePredicate { prefix: BitString::empty(), threshold: 1.0 },
    };
    let states = simulate(&circuit).expect("random circuit must validate");
    let last = states.last().unwrap();
    let l = rng.random_range(0..=2.min(n));
    let mut best = (BitString::zeros(l), -1.0f64);
    for p in 0..(1u64 << l) {
        let prefix = BitString::from_index(p, l);
        let prob = last.acceptance_probability(&AcceptancePredicate { prefix, threshold: 1.0 });
        if prob > best.1 {
            best = (prefix, prob);
        }
    }
    circuit.acceptance = AcceptancePredicate {
        prefix: best.0,
        threshold: (best.1 * 0.999).min(1.0),
    };
    circuit
}

// ---------------------------------------------------------------------------
// JSON circuit format

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitFile {
    n: usize,
    gates: Vec<GateFile>,
    oracles: BTreeMap<String, String>,
    acceptance: AcceptanceFile,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "type", rename_all = "snake_case")]
enum GateFile {
    Single { q: usize, matrix: Vec<[f64; 2]> },
    Two { q: usize, s: usize, matrix: Vec<[f64; 2]> },
    Oracle { oracle_id: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AcceptanceFile {
    prefix: String,
    threshold: f64,
}

fn matrix_to_pairs(rows: &[&[Complex64]]) -> Vec<[f64; 2]> {
    rows.iter()
        .flat_map(|r| r.iter().map(|z| [z.re, z.im]))
        .collect()
}

impl Circuit {
    pub fn to_json(&self) -> serde_json::Value {
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::Single { q, matrix } => GateFile::Single {
                    q: *q,
                    matrix: matrix_to_pairs(&[&matrix[0], &matrix[1]]),
                },
                Gate::Two { q, s, matrix } => GateFile::Two {
                    q: *q,
                    s: *s,
                    matrix: matrix_to_pairs(&[&matrix[0], &matrix[1], &matrix[2], &matrix[3]]),
                },
                Gate::Oracle { oracle_id } => GateFile::Oracle { oracle_id: oracle_id.clone() },
            })
            .collect();
        let file = CircuitFile {
            n: self.n,
            gates,
            oracles: self
                .oracles
                .iter()
                .map(|(id, f)| (id.clone(), f.to_hex()))
                .collect(),
            acceptance: AcceptanceFile {
                prefix: self.acceptance.prefix.to_string(),
                threshold: self.acceptance.threshold,
            },
        };
        serde_json::to_value(&file).expect("circuit serialization cannot fail")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("circuit serialization cannot fail")
    }

    /// Parses and fully validates a circuit (unitarity, qubit ranges, oracle
    /// arities, acceptance predicate).
    pub fn from_json_str(text: &str) -> Result<Self, SimError> {
        let file: CircuitFile = serde_json::from_str(text)?;
        let mut oracles = OracleTable::new();
        for (id, hex_table) in &file.oracles {
            oracles.insert(id.clone(), BooleanOracle::from_hex(file.n, id, hex_table)?);
        }
        let mut gates = Vec::with_capacity(file.gates.len());
        for (index, g) in file.gates.into_iter().enumerate() {
            let gate = match g {
                GateFile::Single { q, matrix } => {
                    if matrix.len() != 4 {
                        return Err(SimError::BadMatrix { index, expected: 4, got: matrix.len() });
                    }
                    let z = |k: usize| Complex64::new(matrix[k][0], matrix[k][1]);
                    Gate::Single { q, matrix: [[z(0), z(1)], [z(2), z(3)]] }
                }
                GateFile::Two { q, s, matrix } => {
                    if matrix.len() != 16 {
                        return Err(SimError::BadMatrix { index, expected: 16, got: matrix.len() });
                    }
                    let z = |k: usize| Complex64::new(matrix[k][0], matrix[k][1]);
                    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
                    for (r, row) in m.iter_mut().enumerate() {
                        for (c, e) in row.iter_mut().enumerate() {
                            *e = z(r * 4 + c);
                        }
                    }
                    Gate::Two { q, s, matrix: m }
                }
                GateFile::Oracle { oracle_id } => Gate::Oracle { oracle_id },
            };
            gates.push(gate);
        }
        let prefix: BitString = file
            .acceptance
            .prefix
            .parse()
            .map_err(|e| SimError::BadTable { id: "acceptance.prefix".into(), reason: format!("{e}") })?;
        let circuit = Circuit {
            n: file.n,
            gates,
            oracles,
            acceptance: AcceptancePredicate { prefix, threshold: file.acceptance.threshold },
        };
        circuit.validate()?;
        Ok(circuit)
    }
}
