//! qtally: a state-vector quantum circuit simulator with an exact
//! operation-count ledger.
//!
//! The simulator evolves n-qubit registers (up to 24 qubits) and tallies the
//! exact classical arithmetic cost of every engine, so the complexity gaps
//! between dense matrix application (2^(2n) multiply-adds), tensor-factored
//! application (2n * 2^n) and the gate-level Fourier circuit (n(n+1)/2
//! gates) show up as integer ledger facts instead of asymptotic claims.
//!
//! Modules:
//! * [`state`]: amplitude vectors, measurement, reduced density matrices,
//!   Schmidt-rank diagnostics;
//! * [`gates`]: single-qubit / controlled / tensor-factored / dense
//!   application engines;
//! * [`oracle`]: reversible truth-table oracles and evaluation in
//!   superposition;
//! * [`fourier`]: direct DFT, radix-2 FFT and the quantum Fourier circuit,
//!   each with exact counts;
//! * [`period`]: the period-finding pipeline (superpose, evaluate, measure,
//!   transform, sample, continued fractions) and a small factoring demo;
//! * [`teleport`]: the two-classical-bit teleportation protocol;
//! * [`ledger`]: the cost ledger and scaling-law fits;
//! * [`record`]: serializable run records for the CLI.

pub mod error;
pub mod fourier;
pub mod gates;
pub mod ledger;
pub mod linalg;
pub mod oracle;
pub mod period;
pub mod record;
pub mod rng;
pub mod state;
pub mod stats;
pub mod teleport;

pub use error::{Result, SimError, MAX_KRON_QUBITS, MAX_QUBITS};
pub use ledger::CostLedger;
pub use state::QuantumState;
