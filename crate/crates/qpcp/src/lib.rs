//! Exponential-size proofs for quantum circuit traces, and the machinery to
//! check them.
//!
//! The pipeline: [`sim`] runs an oracle circuit and exposes its per-gate
//! statevectors; [`proof`] encodes each statevector as a prefix tree of
//! fixed-point conditional probabilities plus per-string phases, one segment
//! per gate; [`verifier`] spot-checks a proof against the circuit with local
//! amplitude propagation checks, touching polynomially many entries of the
//! exponentially long proof; [`mip`] wraps the verifier into a two-prover,
//! two-round protocol whose second prover answers a single consistency
//! challenge; [`forrelation`] builds the standard oracle-problem instance
//! family end to end; [`harness`] plants controlled corruptions and measures
//! acceptance statistics against the theoretical bounds.

pub mod bits;
pub mod fixed;
pub mod forrelation;
pub mod harness;
pub mod mip;
pub mod proof;
pub mod rng;
pub mod sim;
pub mod verifier;

pub use bits::BitString;
pub use fixed::{FixedPhase, FixedProb};
pub use proof::{PcpProof, ProofAccess, ProofAddress, ProofDims};
pub use sim::{BooleanOracle, Circuit, Gate, StateVector};
pub use verifier::{verify, Verdict, VerifierConfig};
