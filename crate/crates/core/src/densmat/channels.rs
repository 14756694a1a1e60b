//! Depolarizing noise on one and two qubits.

use std::fmt;

use super::matrix::DensityMatrix;
use crate::error::{Error, Result};

/// Depolarizing strengths for one-qubit (`p1`) and two-qubit (`p2`) gates.
///
/// The average gate errors are E₁ = p₁/2 and E₂ = 3p₂/4.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseParams {
    pub p1: f64,
    pub p2: f64,
}

impl NoiseParams {
    pub const NOISELESS: NoiseParams = NoiseParams { p1: 0.0, p2: 0.0 };

    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        let n = Self { p1, p2 };
        n.validate()?;
        Ok(n)
    }

    /// Builds the channel strengths from per-gate error rates: p₁ = 2E₁, p₂ = 4E₂/3.
    pub fn from_gate_errors(e1: f64, e2: f64) -> Result<Self> {
        Self::new(2.0 * e1, 4.0 * e2 / 3.0)
    }

    pub fn e1(&self) -> f64 {
        self.p1 / 2.0
    }

    pub fn e2(&self) -> f64 {
        3.0 * self.p2 / 4.0
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p1", self.p1)?;
        check_probability("p2", self.p2)
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}

/// Noise attached to a gate location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseChannel {
    Depolarize1 { qubit: usize, p: f64 },
    Depolarize2 { a: usize, b: usize, p: f64 },
}

impl NoiseChannel {
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        match *self {
            NoiseChannel::Depolarize1 { qubit, p } => depolarize1(rho, qubit, p),
            NoiseChannel::Depolarize2 { a, b, p } => depolarize2(rho, a, b, p),
        }
    }
}

impl fmt::Display for NoiseChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseChannel::Depolarize1 { qubit, p } => write!(f, "L1[{qubit}](p={p})"),
            NoiseChannel::Depolarize2 { a, b, p } => write!(f, "L2[{a},{b}](p={p})"),
        }
    }
}

/// (1 − p₁)ρ + p₁ I/2 on one qubit.
pub fn depolarize1(rho: &DensityMatrix, qubit: usize, p1: f64) -> Result<DensityMatrix> {
    check_probability("p1", p1)?;
    rho.depolarize(&[qubit], p1)
}

/// (1 − p₂)ρ + p₂ I₄/4 on the pair `(a, b)`.
pub fn depolarize2(rho: &DensityMatrix, a: usize, b: usize, p2: f64) -> Result<DensityMatrix> {
    check_probability("p2", p2)?;
    if a == b {
        return Err(Error::RepeatedQubit(a));
    }
    rho.depolarize(&[a, b], p2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::gates::{pauli, Pauli};
    use crate::densmat::matrix::CMatrix;
    use num_complex::Complex64;

    fn state3() -> DensityMatrix {
        let psi: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new((1.1 * i as f64).cos(), (0.4 * i as f64).sin()))
            .collect();
        DensityMatrix::from_pure(&psi)
            .unwrap()
            .normalized()
            .unwrap()
    }

    // Pauli-twirl forms written out independently of the marginal-replacement
    // implementation.
    fn twirl1(rho: &DensityMatrix, q: usize, p: f64) -> CMatrix {
        let mut out = rho.matrix() * Complex64::from(1.0 - 3.0 * p / 4.0);
        for s in [Pauli::X, Pauli::Y, Pauli::Z] {
            let t = rho.conjugate(&pauli(s), &[q]).unwrap();
            out += t.matrix() * Complex64::from(p / 4.0);
        }
        out
    }

    fn twirl2(rho: &DensityMatrix, a: usize, b: usize, p: f64) -> CMatrix {
        let mut out = rho.matrix() * Complex64::from(1.0 - 15.0 * p / 16.0);
        for s in Pauli::ALL {
            for t in Pauli::ALL {
                if s == Pauli::I && t == Pauli::I {
                    continue;
                }
                let op = pauli(s).kronecker(&pauli(t));
                let r = rho.conjugate(&op, &[a, b]).unwrap();
                out += r.matrix() * Complex64::from(p / 16.0);
            }
        }
        out
    }

    #[test]
    fn single_qubit_matches_pauli_twirl() {
        let rho = state3();
        for p in [0.0, 0.03, 0.5, 1.0] {
            for q in 0..3 {
                let got = depolarize1(&rho, q, p).unwrap();
                assert!((got.matrix() - twirl1(&rho, q, p)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn two_qubit_matches_pauli_twirl() {
        let rho = state3();
        for p in [0.0, 0.02, 0.7, 1.0] {
            for (a, b) in [(0, 1), (2, 0), (1, 2)] {
                let got = depolarize2(&rho, a, b, p).unwrap();
                assert!((got.matrix() - twirl2(&rho, a, b, p)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn single_qubit_scales_bloch_vector() {
        let rho = DensityMatrix::from_matrix(
            (CMatrix::identity(2, 2)
                + pauli(Pauli::X) * Complex64::from(0.3)
                + pauli(Pauli::Y) * Complex64::from(-0.5)
                + pauli(Pauli::Z) * Complex64::from(0.6))
                * Complex64::from(0.5),
        )
        .unwrap();
        let p = 0.37;
        let out = depolarize1(&rho, 0, p).unwrap();
        for (s, v) in [(Pauli::X, 0.3), (Pauli::Y, -0.5), (Pauli::Z, 0.6)] {
            let e = out.expectation(&pauli(s)).unwrap().re;
            assert!((e - (1.0 - p) * v).abs() < 1e-15);
        }
    }

    #[test]
    fn full_strength_gives_maximally_mixed() {
        let psi = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let one = DensityMatrix::from_pure(&psi).unwrap();
        let out = depolarize1(&one, 0, 1.0).unwrap();
        assert!(
            (out.matrix() - DensityMatrix::maximally_mixed(1).unwrap().matrix()).norm() < 1e-15
        );

        let two = one.kron(&one).unwrap();
        let out = depolarize2(&two, 0, 1, 1.0).unwrap();
        assert!(
            (out.matrix() - DensityMatrix::maximally_mixed(2).unwrap().matrix()).norm() < 1e-15
        );
    }

    #[test]
    fn gate_error_conversion() {
        let n = NoiseParams::from_gate_errors(1.3e-4, 4.7e-3).unwrap();
        assert_eq!(n.p1, 2.0 * 1.3e-4);
        assert_eq!(n.p2, 4.0 * 4.7e-3 / 3.0);
        assert!((n.e1() - 1.3e-4).abs() < 1e-18);
        assert!((n.e2() - 4.7e-3).abs() < 1e-18);
        assert!(NoiseParams::new(-0.1, 0.0).is_err());
        assert!(NoiseParams::new(0.0, 1.1).is_err());
    }

    #[test]
    fn two_qubit_rejects_same_pair() {
        let rho = state3();
        assert_eq!(depolarize2(&rho, 1, 1, 0.1), Err(Error::RepeatedQubit(1)));
    }
}
