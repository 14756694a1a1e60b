//! Dense density-matrix simulation for registers of up to five qubits.

pub mod channels;
pub mod decoder;
pub mod gates;
pub mod matrix;

pub use channels::{depolarize1, depolarize2, NoiseChannel, NoiseParams};
pub use decoder::{distill_round, distill_round_density, RoundOutcome};
pub use gates::{apply_gate, pauli, pauli_string, Gate1, GateOp, Pauli};
pub use matrix::{CMatrix, DensityMatrix, MAX_QUBITS};
