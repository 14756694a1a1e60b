//! Clifford gates used by the distillation and gate-teleportation circuits.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::dmatrix;
use num_complex::Complex64;

use super::matrix::{CMatrix, DensityMatrix};
use crate::error::{Error, Result};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const I1: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

pub fn pauli(p: Pauli) -> CMatrix {
    match p {
        Pauli::I => CMatrix::identity(2, 2),
        Pauli::X => dmatrix![C0, C1; C1, C0],
        Pauli::Y => dmatrix![C0, -I1; I1, C0],
        Pauli::Z => dmatrix![C1, C0; C0, -C1],
    }
}

/// Tensor product of a Pauli string such as `"XZZXI"`; the first character
/// acts on qubit 0.
pub fn pauli_string(s: &str) -> Result<CMatrix> {
    let mut out: Option<CMatrix> = None;
    for ch in s.chars() {
        let p = Pauli::from_char(ch)
            .ok_or_else(|| Error::InvalidArgument(format!("bad Pauli character {ch:?}")))?;
        let m = pauli(p);
        out = Some(match out {
            None => m,
            Some(acc) => acc.kronecker(&m),
        });
    }
    out.ok_or_else(|| Error::InvalidArgument("empty Pauli string".into()))
}

/// Single-qubit gates appearing in the circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate1 {
    H,
    /// Phase gate diag(1, i).
    K,
    /// T = KH, the order-three Clifford that cycles X → Z → Y → X.
    T,
    X,
    Y,
    Z,
    /// X followed by Z, i.e. the matrix ZX.
    XZ,
}

impl Gate1 {
    pub fn matrix(self) -> CMatrix {
        let s = Complex64::from(FRAC_1_SQRT_2);
        match self {
            Gate1::H => dmatrix![s, s; s, -s],
            Gate1::K => dmatrix![C1, C0; C0, I1],
            Gate1::T => Gate1::K.matrix() * Gate1::H.matrix(),
            Gate1::X => pauli(Pauli::X),
            Gate1::Y => pauli(Pauli::Y),
            Gate1::Z => pauli(Pauli::Z),
            Gate1::XZ => pauli(Pauli::Z) * pauli(Pauli::X),
        }
    }

    /// Whether the gate is a Pauli product (allowed as a controlled target).
    pub fn is_pauli_product(self) -> bool {
        matches!(self, Gate1::X | Gate1::Y | Gate1::Z | Gate1::XZ)
    }
}

impl fmt::Display for Gate1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Gate1::H => "H",
            Gate1::K => "K",
            Gate1::T => "T",
            Gate1::X => "X",
            Gate1::Y => "Y",
            Gate1::Z => "Z",
            Gate1::XZ => "XZ",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateOp {
    Single {
        qubit: usize,
        gate: Gate1,
    },
    /// Applies `gate` (a Pauli product) to `target` when `control` is |1⟩.
    Controlled {
        control: usize,
        target: usize,
        gate: Gate1,
    },
}

impl GateOp {
    pub fn single(qubit: usize, gate: Gate1) -> Self {
        GateOp::Single { qubit, gate }
    }

    pub fn controlled(control: usize, target: usize, gate: Gate1) -> Self {
        GateOp::Controlled {
            control,
            target,
            gate,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::controlled(control, target, Gate1::X)
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GateOp::Single { qubit, .. } => vec![qubit],
            GateOp::Controlled {
                control, target, ..
            } => vec![control, target],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, GateOp::Controlled { .. })
    }

    /// The local unitary, ordered like [`GateOp::qubits`].
    pub fn unitary(&self) -> Result<CMatrix> {
        match *self {
            GateOp::Single { gate, .. } => Ok(gate.matrix()),
            GateOp::Controlled {
                control,
                target,
                gate,
            } => {
                if control == target {
                    return Err(Error::RepeatedQubit(control));
                }
                if !gate.is_pauli_product() {
                    return Err(Error::InvalidArgument(format!(
                        "controlled-{gate} is not a controlled Pauli"
                    )));
                }
                let mut u = CMatrix::identity(4, 4);
                let g = gate.matrix();
                for r in 0..2 {
                    for c in 0..2 {
                        u[(2 + r, 2 + c)] = g[(r, c)];
                    }
                }
                Ok(u)
            }
        }
    }

    /// Embeds the gate into the full 2ⁿ-dimensional space.
    pub fn full_unitary(&self, n_qubits: usize) -> Result<CMatrix> {
        let dim = 1usize << n_qubits;
        let u = self.unitary()?;
        let qubits = self.qubits();
        let mut out = CMatrix::zeros(dim, dim);
        let n = n_qubits;
        for q in &qubits {
            if *q >= n {
                return Err(Error::QubitOutOfRange {
                    index: *q,
                    n_qubits: n,
                });
            }
        }
        let k = qubits.len();
        let local_of = |idx: usize| -> usize {
            qubits.iter().enumerate().fold(0, |acc, (bit, &q)| {
                acc | (((idx >> (n - 1 - q)) & 1) << (k - 1 - bit))
            })
        };
        let mask: usize = qubits.iter().map(|&q| 1usize << (n - 1 - q)).sum();
        for row in 0..dim {
            for col in 0..dim {
                if row & !mask == col & !mask {
                    out[(row, col)] = u[(local_of(row), local_of(col))];
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateOp::Single { qubit, gate } => write!(f, "{gate}[{qubit}]"),
            GateOp::Controlled {
                control,
                target,
                gate,
            } => write!(f, "C{gate}[{control}->{target}]"),
        }
    }
}

/// ρ → UρU†.
pub fn apply_gate(rho: &DensityMatrix, gate: &GateOp) -> Result<DensityMatrix> {
    rho.conjugate(&gate.unitary()?, &gate.qubits())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn t_gate_cycles_paulis() {
        let t = Gate1::T.matrix();
        let conj = |p: Pauli| &t * pauli(p) * t.adjoint();
        assert!(close(&conj(Pauli::X), &pauli(Pauli::Z), 1e-15));
        assert!(close(&conj(Pauli::Z), &pauli(Pauli::Y), 1e-15));
        assert!(close(&conj(Pauli::Y), &pauli(Pauli::X), 1e-15));
    }

    #[test]
    fn xz_is_x_then_z() {
        let want = pauli(Pauli::Z) * pauli(Pauli::X);
        assert!(close(&Gate1::XZ.matrix(), &want, 1e-15));
        // ZX = iY
        assert!(close(&Gate1::XZ.matrix(), &(pauli(Pauli::Y) * I1), 1e-15));
    }

    #[test]
    fn hadamard_maps_zero_to_plus() {
        let rho = DensityMatrix::zero_state(1).unwrap();
        let out = apply_gate(&rho, &GateOp::single(0, Gate1::H)).unwrap();
        let x = out.expectation(&pauli(Pauli::X)).unwrap();
        let z = out.expectation(&pauli(Pauli::Z)).unwrap();
        assert!((x.re - 1.0).abs() < 1e-15 && z.norm() < 1e-15);
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        // |10⟩⟨10|
        let mut m = CMatrix::zeros(4, 4);
        m[(2, 2)] = C1;
        let rho = DensityMatrix::from_matrix(m).unwrap();
        let out = apply_gate(&rho, &GateOp::cnot(0, 1)).unwrap();
        assert!((out.matrix()[(3, 3)].re - 1.0).abs() < 1e-15);
        assert!((out.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn controlled_gate_validation() {
        assert!(GateOp::controlled(0, 0, Gate1::X).unitary().is_err());
        assert!(GateOp::controlled(0, 1, Gate1::H).unitary().is_err());
        let rho = DensityMatrix::zero_state(2).unwrap();
        assert!(apply_gate(&rho, &GateOp::cnot(0, 2)).is_err());
    }

    #[test]
    fn full_unitary_agrees_with_local_application() {
        let psi: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        for g in [
            GateOp::controlled(2, 0, Gate1::XZ),
            GateOp::single(1, Gate1::T),
            GateOp::cnot(0, 2),
        ] {
            let u = g.full_unitary(3).unwrap();
            let want = &u * rho.matrix() * u.adjoint();
            let got = apply_gate(&rho, &g).unwrap();
            assert!(close(got.matrix(), &want, 1e-13), "{g}");
        }
    }
}
