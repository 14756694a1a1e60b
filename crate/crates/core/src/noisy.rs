//! Distillation rounds with depolarizing noise on the decoder gates, for
//! inputs on the magic axis, and the π/12 phase gate driven by the distilled
//! states.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bloch::{BlochVector, MagicBasis};
use crate::densmat::decoder::distill_round_unnormalized;
use crate::densmat::gates::{apply_gate, pauli, Gate1, GateOp, Pauli};
use crate::densmat::{CMatrix, DensityMatrix, NoiseParams};
use crate::error::{Error, Result};
use crate::roots::bisect;

/// Noise strengths above this are outside the first-order regime of the
/// closed-form coefficients.
pub const FIRST_ORDER_LIMIT: f64 = 0.05;

/// Unnormalized output of one round in the |T₀⟩, |T₁⟩ basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyRoundCoeffs {
    pub c00: f64,
    pub c11: f64,
    /// ⟨T₀|ρ_out|T₁⟩.
    pub c01: Complex64,
}

impl NoisyRoundCoeffs {
    pub fn p_accept(&self) -> f64 {
        self.c00 + self.c11
    }

    pub fn eps_out(&self) -> f64 {
        self.c11 / (self.c00 + self.c11)
    }
}

/// First-order closed form of the round in (p₁, p₂), for input error `eps`.
pub fn analytic_coeffs(eps: f64, noise: NoiseParams) -> NoisyRoundCoeffs {
    let e = eps;
    let (p1, p2) = (noise.p1, noise.p2);
    let q = 1.0 - e;
    let poly = |c: &[f64]| c.iter().rev().fold(0.0, |acc, &k| acc * e + k);
    let base = (1.0 - 5.0 * p1 - 8.0 * p2) / 6.0;

    let c00 = base * (q.powi(5) + 5.0 * e.powi(3) * q * q)
        + p1 / 36.0 * poly(&[19.0, -87.0, 197.0, -164.0, 6.0, 32.0])
        + p2 / 54.0 * poly(&[20.0, -44.0, 107.0, -106.0, 28.0, 8.0]);
    let c11 = base * (e.powi(5) + 5.0 * e * e * q.powi(3))
        + p1 / 36.0 * poly(&[3.0, 1.0, 61.0, -180.0, 166.0, -32.0])
        + p2 / 54.0 * poly(&[13.0, -4.0, 37.0, -86.0, 68.0, -8.0]);

    let s3 = 3f64.sqrt();
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let terms = [
        c(-2.0, 3.0) - c(1.0, 5.0) * s3,
        c(-2.0, -9.0) + c(3.0, 10.0) * s3,
        c(6.0, 9.0) - c(3.0, 6.0) * s3,
        c(-8.0, -6.0) + c(2.0, -8.0) * s3,
        c(4.0, 4.0 * s3),
    ];
    let bracket = terms
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &k| acc * e + k);
    let c01 = c(1.0, 1.0) * (p2 * (2.0 * e - 1.0) / 432.0) * bracket;

    NoisyRoundCoeffs { c00, c11, c01 }
}

/// One noisy round on the magic axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyRound {
    pub eps_out: f64,
    pub p_accept: f64,
    pub coeffs: NoisyRoundCoeffs,
    /// Set when p₁ or p₂ exceeds [`FIRST_ORDER_LIMIT`].
    pub out_of_range: bool,
}

impl NoisyRound {
    fn from_coeffs(coeffs: NoisyRoundCoeffs, noise: NoiseParams) -> Result<Self> {
        let p_accept = coeffs.p_accept();
        if !(p_accept > 0.0) {
            return Err(Error::InvalidRegime(format!(
                "acceptance weight c00 + c11 = {p_accept} is not positive"
            )));
        }
        Ok(Self {
            eps_out: coeffs.c11 / p_accept,
            p_accept,
            coeffs,
            out_of_range: noise.p1 > FIRST_ORDER_LIMIT || noise.p2 > FIRST_ORDER_LIMIT,
        })
    }

    /// |⟨T₀|ρ|T₁⟩| of the normalized output, dropped when iterating on the axis.
    pub fn off_diagonal(&self) -> f64 {
        self.coeffs.c01.norm() / self.p_accept
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::InvalidProbability {
            name: "epsilon",
            value: eps,
        })
    }
}

pub fn analytic_round(eps: f64, noise: NoiseParams) -> Result<NoisyRound> {
    check_eps(eps)?;
    noise.validate()?;
    NoisyRound::from_coeffs(analytic_coeffs(eps, noise), noise)
}

/// The same round computed by simulating the noisy decoder on five copies
/// of (1 − ε)|T₀⟩⟨T₀| + ε|T₁⟩⟨T₁|.
pub fn simulated_round(eps: f64, noise: NoiseParams) -> Result<NoisyRound> {
    check_eps(eps)?;
    let input = BlochVector::on_axis(1.0 - eps)?.to_density();
    let out = distill_round_unnormalized(&input, noise, false)?;
    let (c00, c11, c01) = MagicBasis::new().components(&out);
    NoisyRound::from_coeffs(NoisyRoundCoeffs { c00, c11, c01 }, noise)
}

/// Which evaluation of the round map to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoundModel {
    #[default]
    Analytic,
    Simulated,
}

impl RoundModel {
    pub fn round(self, eps: f64, noise: NoiseParams) -> Result<NoisyRound> {
        match self {
            RoundModel::Analytic => analytic_round(eps, noise),
            RoundModel::Simulated => simulated_round(eps, noise),
        }
    }
}

/// Stable and unstable fixed points of ε ↦ ε_out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyFixedPoint {
    /// Limiting error of repeated rounds.
    pub epsilon_star: f64,
    pub f_ceiling: f64,
    /// Largest input error that still converges to `epsilon_star`.
    pub threshold_eps: f64,
    pub threshold_f: f64,
}

const FIXED_POINT_SCAN: usize = 4000;
const FIXED_POINT_WIDTH: f64 = 1e-14;
const FIXED_POINT_EPS_MAX: f64 = 0.5 - 1e-6;

pub fn noisy_fixed_points(noise: NoiseParams) -> Result<NoisyFixedPoint> {
    noisy_fixed_points_with(noise, RoundModel::Analytic)
}

pub fn noisy_fixed_points_with(noise: NoiseParams, model: RoundModel) -> Result<NoisyFixedPoint> {
    noise.validate()?;
    let gap = |e: f64| -> Result<f64> { Ok(model.round(e, noise)?.eps_out - e) };
    let n = FIXED_POINT_SCAN;
    let grid: Vec<f64> = (0..=n)
        .map(|i| FIXED_POINT_EPS_MAX * i as f64 / n as f64)
        .collect();
    let values = grid
        .par_iter()
        .map(|&e| gap(e))
        .collect::<Result<Vec<f64>>>()?;

    let refine = |i: usize| -> Result<f64> {
        bisect(
            |e| gap(e).unwrap_or(f64::NAN),
            grid[i],
            grid[i + 1],
            FIXED_POINT_WIDTH,
        )
    };

    let (epsilon_star, start) = if values[0] <= 0.0 {
        (0.0, 0)
    } else {
        let i = (0..n)
            .find(|&i| values[i] > 0.0 && values[i + 1] <= 0.0)
            .ok_or(Error::NoDistillation)?;
        (refine(i)?, i + 1)
    };
    let j = (start..n)
        .find(|&i| values[i] < 0.0 && values[i + 1] >= 0.0)
        .ok_or(Error::NoDistillation)?;
    let threshold_eps = if values[j + 1] == 0.0 {
        grid[j + 1]
    } else {
        refine(j)?
    };
    Ok(NoisyFixedPoint {
        epsilon_star,
        f_ceiling: 1.0 - epsilon_star,
        threshold_eps,
        threshold_f: 1.0 - threshold_eps,
    })
}

/// Error and acceptance of one iteration on the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyStep {
    pub round: usize,
    /// Input error of this round.
    pub eps_in: f64,
    pub eps_out: f64,
    pub p_accept: f64,
    /// Off-diagonal magnitude discarded before the next round.
    pub dropped_off_diagonal: f64,
}

/// Iterates the round map on the axis for `rounds` rounds.
pub fn iterate_noisy(
    eps0: f64,
    noise: NoiseParams,
    rounds: usize,
    model: RoundModel,
) -> Result<Vec<NoisyStep>> {
    let mut eps = eps0;
    let mut steps = Vec::with_capacity(rounds);
    for round in 1..=rounds {
        let r = model.round(eps, noise)?;
        steps.push(NoisyStep {
            round,
            eps_in: eps,
            eps_out: r.eps_out,
            p_accept: r.p_accept,
            dropped_off_diagonal: r.off_diagonal(),
        });
        eps = r.eps_out;
    }
    Ok(steps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub f_in: f64,
    pub f_out: f64,
    /// Fidelity reached after many rounds.
    pub f_limit: f64,
}

/// One-round and limiting output fidelity for each input fidelity in `grid`.
pub fn fidelity_curve(noise: NoiseParams, grid: &[f64]) -> Result<Vec<CurvePoint>> {
    if let Some(&bad) = grid.iter().find(|&&f| !(f > 0.5 && f <= 1.0)) {
        return Err(Error::InvalidArgument(format!(
            "input fidelity {bad} outside (0.5, 1]"
        )));
    }
    let fixed = match noisy_fixed_points(noise) {
        Ok(fp) => Some(fp),
        Err(Error::NoDistillation) => None,
        Err(e) => return Err(e),
    };
    grid.iter()
        .map(|&f_in| {
            let eps = 1.0 - f_in;
            let r = analytic_round(eps, noise)?;
            let f_limit = match fixed {
                Some(fp) if eps < fp.threshold_eps => fp.f_ceiling,
                Some(fp) if eps == fp.threshold_eps => fp.threshold_f,
                _ => 0.5,
            };
            Ok(CurvePoint {
                f_in,
                f_out: 1.0 - r.eps_out,
                f_limit,
            })
        })
        .collect()
}

fn check_gate_args(a_amp: f64, eps_prime: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&a_amp) {
        return Err(Error::InvalidArgument(format!(
            "|a| must lie in [0, 1], got {a_amp}"
        )));
    }
    if !(0.0..0.5).contains(&eps_prime) {
        return Err(Error::InvalidArgument(format!(
            "magic-state error must lie in [0, 1/2), got {eps_prime}"
        )));
    }
    Ok(())
}

/// 1 − 12ε′|a|²(1 − |a|)² / (3 + (1 − 2ε′)²).
pub fn universal_gate_fidelity(a_amp: f64, eps_prime: f64) -> Result<f64> {
    check_gate_args(a_amp, eps_prime)?;
    let a2 = a_amp * a_amp;
    let q = 1.0 - 2.0 * eps_prime;
    Ok(1.0 - 12.0 * eps_prime * a2 * (1.0 - a_amp).powi(2) / (3.0 + q * q))
}

/// 1 − 12ε′|a|²(1 − |a|²) / (3 + (1 − 2ε′)²), which is what the gate
/// circuit actually produces.
pub fn universal_gate_fidelity_corrected(a_amp: f64, eps_prime: f64) -> Result<f64> {
    check_gate_args(a_amp, eps_prime)?;
    let a2 = a_amp * a_amp;
    let q = 1.0 - 2.0 * eps_prime;
    Ok(1.0 - 12.0 * eps_prime * a2 * (1.0 - a2) / (3.0 + q * q))
}

/// diag(e^{iφ}, e^{−iφ}).
pub fn phase_gate(phi: f64) -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = Complex64::from_polar(1.0, phi);
    m[(1, 1)] = Complex64::from_polar(1.0, -phi);
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pi12Branch {
    /// Outcome of the second parity measurement.
    pub outcome: i8,
    /// The phase gate this branch applies: Λ_{outcome·π/12}.
    pub phi: f64,
    /// Probability of this branch given the first measurement passed.
    pub probability: f64,
    /// Normalized output qubit.
    pub state: DensityMatrix,
    /// ⟨ψ|Λ†ρΛ|ψ⟩ for this branch's own phase gate.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pi12Outcome {
    /// Probability that the first parity measurement gives +1.
    pub p_accept: f64,
    pub branches: Vec<Pi12Branch>,
}

impl Pi12Outcome {
    /// Branch-probability weighted fidelity.
    pub fn fidelity(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| b.probability * b.fidelity)
            .sum()
    }
}

/// Applies the ±π/12 phase gate to `psi` using two copies of `magic`.
///
/// Qubit 0 holds ψ, qubits 1 and 2 the resource states. Z₁Z₂ = +1 is
/// post-selected, then CNOT(1→2) and H on qubit 1 prepare the resource, and
/// Z₀Z₁ is measured. Outcome +1 leaves Λ_{π/12}ψ and −1 leaves Λ_{−π/12}ψ on
/// qubit 0 after CNOT(0→1). Both branches are kept.
pub fn apply_pi12_gate(psi: [Complex64; 2], magic: &DensityMatrix) -> Result<Pi12Outcome> {
    if magic.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: magic.dim(),
        });
    }
    magic.validate(1.0)?;
    let norm = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidArgument("input ket has zero norm".into()));
    }
    let psi = [psi[0] / norm, psi[1] / norm];
    let input = DensityMatrix::from_pure(&psi)?;

    let id = CMatrix::identity(4, 4);
    let zz = pauli(Pauli::Z).kronecker(&pauli(Pauli::Z));
    let parity = |s: f64| (&id + &zz * Complex64::from(s)) * Complex64::from(0.5);

    let rho = input.kron(&magic.kron(magic)?)?;
    let rho = rho.conjugate(&parity(1.0), &[1, 2])?;
    let p_accept = rho.trace();
    if !(p_accept > 1e-300) {
        return Err(Error::ZeroProbability(p_accept));
    }
    let rho = apply_gate(&rho, &GateOp::cnot(1, 2))?;
    let rho = apply_gate(&rho, &GateOp::single(1, Gate1::H))?;

    let mut branches = Vec::with_capacity(2);
    for outcome in [1i8, -1] {
        let branch = rho.conjugate(&parity(outcome as f64), &[0, 1])?;
        let branch = apply_gate(&branch, &GateOp::cnot(0, 1))?;
        let out = branch.partial_trace(&[0])?;
        let weight = out.trace();
        let phi = outcome as f64 * PI / 12.0;
        let target = phase_gate(phi) * CMatrix::from_column_slice(2, 1, &psi);
        let (state, fidelity) = if weight > 1e-300 {
            let state = out.normalized()?;
            let f = (target.adjoint() * state.matrix() * &target)[(0, 0)].re;
            (state, f)
        } else {
            (out, 0.0)
        };
        branches.push(Pi12Branch {
            outcome,
            phi,
            probability: weight / p_accept,
            state,
            fidelity,
        });
    }
    Ok(Pi12Outcome { p_accept, branches })
}

/// Gate fidelity obtained by simulating the gate circuit with resources
/// (1 − ε′)|T₀⟩⟨T₀| + ε′|T₁⟩⟨T₁| on ψ = a|0⟩ + √(1 − a²)|1⟩.
pub fn simulated_gate_fidelity(a_amp: f64, eps_prime: f64) -> Result<f64> {
    check_gate_args(a_amp, eps_prime)?;
    let magic = MagicBasis::new().noisy_magic(eps_prime)?;
    let psi = [
        Complex64::from(a_amp),
        Complex64::from((1.0 - a_amp * a_amp).max(0.0).sqrt()),
    ];
    Ok(apply_pi12_gate(psi, &magic)?.fidelity())
}
