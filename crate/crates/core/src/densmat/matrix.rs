//! Dense complex density matrices over a handful of qubits.
//!
//! Qubit 0 is the most significant bit of a basis-state index, so the
//! projector |0000⟩⟨0000| ⊗ I on a five-qubit register selects indices 0 and 1.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest register the dense engine accepts.
pub const MAX_QUBITS: usize = 5;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// A Hermitian positive semidefinite matrix on `n_qubits` qubits.
///
/// The trace is not forced to one: post-selected states carry their
/// acceptance probability as trace until [`DensityMatrix::normalized`] is
/// called.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: CMatrix,
}

impl DensityMatrix {
    pub fn from_matrix(data: CMatrix) -> Result<Self> {
        let dim = data.nrows();
        if data.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: data.ncols(),
            });
        }
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimension {dim} is not a power of two"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "{n_qubits} qubits exceeds the supported maximum of {MAX_QUBITS}"
            )));
        }
        Ok(Self { n_qubits, data })
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) state vector.
    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        Self::from_matrix(&v * v.adjoint())
    }

    /// The computational basis state |0…0⟩.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        let mut data = CMatrix::zeros(dim, dim);
        data[(0, 0)] = C1;
        Self::from_matrix(data)
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        Self::from_matrix(CMatrix::identity(dim, dim) / Complex64::from(dim as f64))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.data * &self.data).trace().re
    }

    /// Largest |ρᵢⱼ − conj(ρⱼᵢ)|.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.data + self.data.adjoint()) * Complex64::from(0.5);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Checks the Hermitian, trace and positivity invariants.
    pub fn validate(&self, expected_trace: f64) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr - expected_trace).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "trace {tr} differs from expected {expected_trace}"
            )));
        }
        let min = self.min_eigenvalue();
        if min < -1e-10 {
            return Err(Error::InvalidArgument(format!(
                "matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    /// ρ / tr ρ.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if !(tr > 1e-300) {
            return Err(Error::ZeroProbability(tr));
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            data: &self.data / Complex64::from(tr),
        })
    }

    /// ρ ⊗ σ, with `self` on the more significant qubits.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        Self::from_matrix(self.data.kronecker(&other.data))
    }

    /// ρ^{⊗n}.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("tensor power of zero copies".into()));
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.kron(self)?;
        }
        Ok(out)
    }

    pub fn expectation(&self, op: &CMatrix) -> Result<Complex64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: op.nrows(),
            });
        }
        Ok((&self.data * op).trace())
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::RepeatedQubit(q));
            }
        }
        Ok(())
    }

    /// Index groups for a local operator on `qubits`: one group per setting
    /// of the remaining qubits, each listing full indices ordered by the local
    /// index (qubits[0] most significant).
    fn local_groups(&self, qubits: &[usize]) -> Vec<Vec<usize>> {
        let n = self.n_qubits;
        let k = qubits.len();
        let masks: Vec<usize> = qubits.iter().map(|&q| 1usize << (n - 1 - q)).collect();
        let local_mask: usize = masks.iter().sum();
        (0..self.dim())
            .filter(|idx| idx & local_mask == 0)
            .map(|base| {
                (0..1usize << k)
                    .map(|l| {
                        let mut idx = base;
                        for (bit, &m) in masks.iter().enumerate() {
                            if l & (1 << (k - 1 - bit)) != 0 {
                                idx |= m;
                            }
                        }
                        idx
                    })
                    .collect()
            })
            .collect()
    }

    /// ρ → M ρ M† for an operator `op` acting on `qubits`.
    ///
    /// `op` need not be unitary; projectors are applied through this too.
    pub fn conjugate(&self, op: &CMatrix, qubits: &[usize]) -> Result<Self> {
        self.check_qubits(qubits)?;
        let local = 1usize << qubits.len();
        if op.nrows() != local || op.ncols() != local {
            return Err(Error::DimensionMismatch {
                expected: local,
                actual: op.nrows(),
            });
        }
        let groups = self.local_groups(qubits);
        let dim = self.dim();
        let mut left = self.data.clone();
        let mut buf = vec![C0; local];
        for c in 0..dim {
            for g in &groups {
                for (m, &idx) in g.iter().enumerate() {
                    buf[m] = self.data[(idx, c)];
                }
                for (l, &idx) in g.iter().enumerate() {
                    let mut acc = C0;
                    for m in 0..local {
                        acc += op[(l, m)] * buf[m];
                    }
                    left[(idx, c)] = acc;
                }
            }
        }
        let mut out = left.clone();
        for r in 0..dim {
            for g in &groups {
                for (m, &idx) in g.iter().enumerate() {
                    buf[m] = left[(r, idx)];
                }
                for (l, &idx) in g.iter().enumerate() {
                    let mut acc = C0;
                    for m in 0..local {
                        acc += buf[m] * op[(l, m)].conj();
                    }
                    out[(r, idx)] = acc;
                }
            }
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            data: out,
        })
    }

    /// Mixes the marginal on `qubits` toward the maximally mixed state:
    /// ρ → (1 − p) ρ + p · I/2ᵏ ⊗ Tr_qubits(ρ).
    pub fn depolarize(&self, qubits: &[usize], p: f64) -> Result<Self> {
        self.check_qubits(qubits)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability {
                name: "p",
                value: p,
            });
        }
        let groups = self.local_groups(qubits);
        let local = 1usize << qubits.len();
        let mut out = &self.data * Complex64::from(1.0 - p);
        let w = Complex64::from(p / local as f64);
        for g1 in &groups {
            for g2 in &groups {
                let s: Complex64 = g1.iter().zip(g2).map(|(&i, &j)| self.data[(i, j)]).sum();
                for (&i, &j) in g1.iter().zip(g2) {
                    out[(i, j)] += w * s;
                }
            }
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            data: out,
        })
    }

    /// Traces out every qubit not listed in `keep` (kept qubits retain their
    /// relative order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        self.check_qubits(keep)?;
        if keep.is_empty() {
            return Err(Error::InvalidArgument(
                "must keep at least one qubit".into(),
            ));
        }
        let traced: Vec<usize> = (0..self.n_qubits).filter(|q| !keep.contains(q)).collect();
        let mut sorted_keep = keep.to_vec();
        sorted_keep.sort_unstable();
        // groups over the kept qubits; each group enumerates the kept register
        let n = self.n_qubits;
        let k = keep.len();
        let kdim = 1usize << k;
        let index_of = |kept: usize, rest: usize| -> usize {
            let mut idx = 0usize;
            for (bit, &q) in keep.iter().enumerate() {
                if kept & (1 << (k - 1 - bit)) != 0 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            for (bit, &q) in traced.iter().enumerate() {
                if rest & (1 << (traced.len() - 1 - bit)) != 0 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            idx
        };
        let mut out = CMatrix::zeros(kdim, kdim);
        for a in 0..kdim {
            for b in 0..kdim {
                let mut acc = C0;
                for rest in 0..1usize << traced.len() {
                    acc += self.data[(index_of(a, rest), index_of(b, rest))];
                }
                out[(a, b)] = acc;
            }
        }
        Self::from_matrix(out)
    }

    /// Projects `qubits` onto |0…0⟩ and returns the unnormalized state of the
    /// remaining qubits; its trace is the probability of the all-zero outcome.
    pub fn postselect_zeros(&self, qubits: &[usize]) -> Result<Self> {
        self.check_qubits(qubits)?;
        let keep: Vec<usize> = (0..self.n_qubits).filter(|q| !qubits.contains(q)).collect();
        if keep.is_empty() {
            return Err(Error::InvalidArgument(
                "must keep at least one qubit".into(),
            ));
        }
        let n = self.n_qubits;
        let k = keep.len();
        let index_of = |kept: usize| -> usize {
            let mut idx = 0usize;
            for (bit, &q) in keep.iter().enumerate() {
                if kept & (1 << (k - 1 - bit)) != 0 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            idx
        };
        let kdim = 1usize << k;
        let out = CMatrix::from_fn(kdim, kdim, |a, b| self.data[(index_of(a), index_of(b))]);
        Self::from_matrix(out)
    }
}
