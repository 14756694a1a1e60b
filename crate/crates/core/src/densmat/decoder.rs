//! The five-qubit-code decoder that implements one distillation round, with
//! optional depolarizing noise attached to its gates.
//!
//! Qubits are numbered 0..5 top to bottom; qubit 4 carries the output. The
//! decoder is four controlled-Pauli columns (controls 3, 2, 1, 0 in turn),
//! a layer of Z gates on qubits 0, 3, 4, Hadamards on all qubits and a final
//! Y on qubit 4. Post-selecting |0000⟩ on qubits 0..4 after the decoder is
//! equivalent to projecting onto the +1 eigenspace of the code stabilizers.
//!
//! Noise placement: every controlled-Pauli carries Λ₂ on its (control,
//! target) pair. The one-qubit gates on each qubit form a single contiguous
//! run at the end of the circuit; each run is treated as one noisy one-qubit
//! Clifford, so every qubit receives exactly one Λ₁ after its last gate.

use num_complex::Complex64;

use super::channels::{NoiseChannel, NoiseParams};
use super::gates::{apply_gate, pauli_string, Gate1, GateOp};
use super::matrix::{CMatrix, DensityMatrix};
use crate::bloch::{dephase_density, BlochVector};
use crate::error::{Error, Result};

pub const N_QUBITS: usize = 5;
pub const OUTPUT_QUBIT: usize = 4;
pub const MEASURED_QUBITS: [usize; 4] = [0, 1, 2, 3];

/// Stabilizer generators of the five-qubit code, qubit 0 leftmost.
pub const STABILIZERS: [&str; 4] = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"];

/// Post-selection probabilities below this are treated as zero.
pub const MIN_ACCEPT: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderStep {
    pub gate: GateOp,
    pub noise: Option<NoiseChannel>,
}

/// The noiseless gate sequence of the decoder.
pub fn decoder_gates() -> Vec<GateOp> {
    use Gate1::*;
    vec![
        GateOp::controlled(3, 0, Z),
        GateOp::controlled(3, 2, Z),
        GateOp::controlled(3, 4, XZ),
        GateOp::controlled(2, 0, Z),
        GateOp::controlled(2, 1, Z),
        GateOp::controlled(2, 4, X),
        GateOp::controlled(1, 4, X),
        GateOp::controlled(0, 4, XZ),
        GateOp::single(0, Z),
        GateOp::single(3, Z),
        GateOp::single(4, Z),
        GateOp::single(0, H),
        GateOp::single(1, H),
        GateOp::single(2, H),
        GateOp::single(3, H),
        GateOp::single(4, H),
        GateOp::single(4, Y),
    ]
}

/// The decoder with noise channels attached.
pub fn decoder_circuit(noise: NoiseParams) -> Result<Vec<DecoderStep>> {
    noise.validate()?;
    let gates = decoder_gates();
    let last_single: Vec<Option<usize>> = (0..N_QUBITS)
        .map(|q| {
            gates
                .iter()
                .rposition(|g| matches!(g, GateOp::Single { qubit, .. } if *qubit == q))
        })
        .collect();
    let steps = gates
        .iter()
        .enumerate()
        .map(|(i, &gate)| {
            let noise = match gate {
                GateOp::Controlled {
                    control, target, ..
                } => Some(NoiseChannel::Depolarize2 {
                    a: control,
                    b: target,
                    p: noise.p2,
                }),
                GateOp::Single { qubit, .. } if last_single[qubit] == Some(i) => {
                    Some(NoiseChannel::Depolarize1 { qubit, p: noise.p1 })
                }
                GateOp::Single { .. } => None,
            };
            DecoderStep { gate, noise }
        })
        .collect();
    Ok(steps)
}

/// Number of two-qubit gates in the decoder.
pub fn two_qubit_gate_count() -> usize {
    decoder_gates().iter().filter(|g| g.is_two_qubit()).count()
}

/// Number of one-qubit gates in the decoder.
pub fn one_qubit_gate_count() -> usize {
    decoder_gates().iter().filter(|g| !g.is_two_qubit()).count()
}

/// The 32×32 unitary of the noiseless decoder.
pub fn decoder_unitary() -> Result<CMatrix> {
    let dim = 1usize << N_QUBITS;
    let mut u = CMatrix::identity(dim, dim);
    for g in decoder_gates() {
        u = g.full_unitary(N_QUBITS)? * u;
    }
    Ok(u)
}

/// Runs a circuit with its attached noise.
pub fn run_circuit(rho: &DensityMatrix, steps: &[DecoderStep]) -> Result<DensityMatrix> {
    let mut state = rho.clone();
    for step in steps {
        state = apply_gate(&state, &step.gate)?;
        if let Some(ch) = &step.noise {
            state = ch.apply(&state)?;
        }
    }
    Ok(state)
}

/// Result of one post-selected distillation round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    /// Normalized output state of qubit 4.
    pub state: DensityMatrix,
    /// Probability of the trivial syndrome.
    pub p_accept: f64,
}

impl RoundOutcome {
    pub fn bloch(&self) -> Result<BlochVector> {
        BlochVector::from_density(&self.state)
    }
}

/// The unnormalized qubit-4 state after decoding five copies of `input` and
/// post-selecting |0000⟩ on the other qubits.
pub fn distill_round_unnormalized(
    input: &DensityMatrix,
    noise: NoiseParams,
    use_dephasing: bool,
) -> Result<DensityMatrix> {
    if input.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: input.dim(),
        });
    }
    let single = if use_dephasing {
        dephase_density(input)?
    } else {
        input.clone()
    };
    let rho5 = single.tensor_power(N_QUBITS)?;
    let decoded = run_circuit(&rho5, &decoder_circuit(noise)?)?;
    decoded.postselect_zeros(&MEASURED_QUBITS)
}

pub fn distill_round_density(
    input: &DensityMatrix,
    noise: NoiseParams,
    use_dephasing: bool,
) -> Result<RoundOutcome> {
    let out = distill_round_unnormalized(input, noise, use_dephasing)?;
    let p_accept = out.trace();
    if !(p_accept >= MIN_ACCEPT) {
        return Err(Error::ZeroProbability(p_accept));
    }
    Ok(RoundOutcome {
        state: out.normalized()?,
        p_accept,
    })
}

/// One distillation round on five copies of the state with Bloch vector `input`.
pub fn distill_round(
    input: BlochVector,
    noise: NoiseParams,
    use_dephasing: bool,
) -> Result<RoundOutcome> {
    distill_round_density(&input.to_density(), noise, use_dephasing)
}

/// Π = ∏ᵢ (I + Sᵢ)/2 over the four stabilizer generators.
pub fn stabilizer_projector() -> Result<CMatrix> {
    let dim = 1usize << N_QUBITS;
    let id = CMatrix::identity(dim, dim);
    let mut proj = id.clone();
    for s in STABILIZERS {
        proj = proj * (&id + pauli_string(s)?) * Complex64::from(0.5);
    }
    Ok(proj)
}

/// Π ρ Π (unnormalized).
pub fn project_stabilizers(rho5: &DensityMatrix) -> Result<DensityMatrix> {
    if rho5.n_qubits() != N_QUBITS {
        return Err(Error::DimensionMismatch {
            expected: 1 << N_QUBITS,
            actual: rho5.dim(),
        });
    }
    let p = stabilizer_projector()?;
    DensityMatrix::from_matrix(&p * rho5.matrix() * &p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_counts() {
        assert_eq!(two_qubit_gate_count(), 8);
        assert_eq!(one_qubit_gate_count(), 9);
        let steps = decoder_circuit(NoiseParams::new(0.01, 0.02).unwrap()).unwrap();
        let l1 = steps
            .iter()
            .filter(|s| matches!(s.noise, Some(NoiseChannel::Depolarize1 { .. })))
            .count();
        let l2 = steps
            .iter()
            .filter(|s| matches!(s.noise, Some(NoiseChannel::Depolarize2 { .. })))
            .count();
        assert_eq!((l1, l2), (5, 8));
    }

    #[test]
    fn one_qubit_noise_sits_after_each_qubits_last_gate() {
        let steps = decoder_circuit(NoiseParams::new(0.01, 0.0).unwrap()).unwrap();
        for q in 0..N_QUBITS {
            let last = steps
                .iter()
                .rposition(|s| s.gate.qubits().contains(&q))
                .unwrap();
            assert!(
                matches!(steps[last].noise, Some(NoiseChannel::Depolarize1 { qubit, .. }) if qubit == q)
            );
        }
    }

    #[test]
    fn two_qubit_noise_on_control_target_pair() {
        for s in decoder_circuit(NoiseParams::new(0.0, 0.01).unwrap()).unwrap() {
            if let GateOp::Controlled {
                control, target, ..
            } = s.gate
            {
                assert_eq!(
                    s.noise,
                    Some(NoiseChannel::Depolarize2 {
                        a: control,
                        b: target,
                        p: 0.01
                    })
                );
            }
        }
    }

    #[test]
    fn projector_is_idempotent_with_rank_two() {
        let p = stabilizer_projector().unwrap();
        assert!((&p * &p - &p).norm() < 1e-12);
        assert!((p.trace().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn decoder_maps_code_space_onto_ancillas_in_zero() {
        let u = decoder_unitary().unwrap();
        let p = stabilizer_projector().unwrap();
        let mapped = &u * p * u.adjoint();
        let mut want = CMatrix::zeros(32, 32);
        want[(0, 0)] = Complex64::from(1.0);
        want[(1, 1)] = Complex64::from(1.0);
        assert!((mapped - want).norm() < 1e-12);
    }

    #[test]
    fn magic_input_is_accepted_with_probability_one_sixth() {
        let out = distill_round(BlochVector::magic(), NoiseParams::NOISELESS, false).unwrap();
        assert!((out.p_accept - 1.0 / 6.0).abs() < 1e-14);
        let v = out.bloch().unwrap();
        assert!(v.distance(BlochVector::magic()) < 1e-12);
    }

    #[test]
    fn maximally_mixed_input_is_a_fixed_point() {
        let out = distill_round(
            BlochVector::ORIGIN,
            NoiseParams::new(0.01, 0.02).unwrap(),
            false,
        )
        .unwrap();
        assert!(out.bloch().unwrap().norm() < 1e-14);
        assert!((out.p_accept - 1.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_multi_qubit_input() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(distill_round_density(&rho, NoiseParams::NOISELESS, false).is_err());
        assert!(project_stabilizers(&rho).is_err());
    }

    #[test]
    fn zero_acceptance_is_reported() {
        let zero = DensityMatrix::from_matrix(CMatrix::zeros(2, 2)).unwrap();
        assert!(matches!(
            distill_round_density(&zero, NoiseParams::NOISELESS, false),
            Err(Error::ZeroProbability(_))
        ));
    }
}
