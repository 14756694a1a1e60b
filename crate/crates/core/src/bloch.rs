//! Single-qubit states as Bloch vectors, fidelity with the T-type magic
//! state, the dephasing twirl onto the magic axis, and the (a, r, θ)
//! coordinates of constant-fidelity planes.
//!
//! A plane of constant fidelity F is x + y + z = a with a = √3(2F − 1). Inside
//! it, r is the distance from the magic axis and θ is measured from the
//! in-plane direction (1, 1, −2)/√6 toward (1, −1, 0)/√2.

use std::f64::consts::{PI, TAU};

use nalgebra::dmatrix;
use num_complex::Complex64;

use crate::densmat::gates::{pauli, Gate1, Pauli};
use crate::densmat::matrix::{CMatrix, DensityMatrix};
use crate::error::{Error, Result};

/// Slack allowed outside the unit ball before a point is rejected.
pub const BALL_TOL: f64 = 1e-9;

const SQRT3: f64 = 1.732_050_807_568_877_2;
const SQRT6: f64 = 2.449_489_742_783_178;
const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Unit vector along the magic axis, (1, 1, 1)/√3.
pub const MAGIC_AXIS: [f64; 3] = [1.0 / SQRT3, 1.0 / SQRT3, 1.0 / SQRT3];
/// In-plane direction for θ = 0.
pub const PLANE_E1: [f64; 3] = [1.0 / SQRT6, 1.0 / SQRT6, -2.0 / SQRT6];
/// In-plane direction for θ = π/2.
pub const PLANE_E2: [f64; 3] = [1.0 / SQRT2, -1.0 / SQRT2, 0.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ORIGIN: BlochVector = BlochVector {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Validated constructor. Points up to [`BALL_TOL`] outside the ball are
    /// pulled back onto the sphere; anything farther out is an error.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let (v, _) = Self::checked(x, y, z)?;
        Ok(v)
    }

    /// Like [`BlochVector::new`] but also reports whether the point was
    /// clamped back onto the sphere.
    pub fn checked(x: f64, y: f64, z: f64) -> Result<(Self, bool)> {
        let v = Self { x, y, z };
        let norm = v.norm();
        if !norm.is_finite() || norm > 1.0 + BALL_TOL {
            return Err(Error::OutsideBall { x, y, z, norm });
        }
        Ok(v.clamp_to_ball())
    }

    /// Rescales points outside the unit ball onto its surface.
    pub fn clamp_to_ball(self) -> (Self, bool) {
        let norm = self.norm();
        if norm > 1.0 {
            (self.scale(1.0 / norm), true)
        } else {
            (self, false)
        }
    }

    /// Unchecked constructor for internal arithmetic.
    pub(crate) const fn raw(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn magic() -> Self {
        Self::raw(MAGIC_AXIS[0], MAGIC_AXIS[1], MAGIC_AXIS[2])
    }

    pub fn orthogonal_magic() -> Self {
        Self::magic().scale(-1.0)
    }

    /// A point on the magic axis with the given fidelity.
    pub fn on_axis(fidelity: f64) -> Result<Self> {
        let s = (2.0 * fidelity - 1.0) / SQRT3;
        Self::new(s, s, s)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::raw(self.x * s, self.y * s, self.z * s)
    }

    pub fn distance(self, other: Self) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// ρ = ½(I + xσˣ + yσʸ + zσᶻ).
    pub fn to_density(self) -> DensityMatrix {
        let m = (CMatrix::identity(2, 2)
            + pauli(Pauli::X) * Complex64::from(self.x)
            + pauli(Pauli::Y) * Complex64::from(self.y)
            + pauli(Pauli::Z) * Complex64::from(self.z))
            * Complex64::from(0.5);
        DensityMatrix::from_matrix(m).expect("2x2 matrix is a valid one-qubit operator")
    }

    /// Bloch vector of a one-qubit state (normalized by its trace).
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.n_qubits() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: rho.dim(),
            });
        }
        let tr = rho.trace();
        if !(tr > 1e-300) {
            return Err(Error::ZeroProbability(tr));
        }
        let e = |p| rho.expectation(&pauli(p)).map(|c| c.re / tr);
        let (x, y, z) = (e(Pauli::X)?, e(Pauli::Y)?, e(Pauli::Z)?);
        Self::new(x, y, z)
    }
}

/// ⟨T₀|ρ|T₀⟩ = ½(1 + (x + y + z)/√3).
pub fn fidelity_to_magic(v: BlochVector) -> f64 {
    0.5 * (1.0 + (v.x + v.y + v.z) / SQRT3)
}

/// Projection onto the magic axis: (x, y, z) → (s, s, s) with s = (x+y+z)/3.
pub fn dephase(v: BlochVector) -> BlochVector {
    let s = (v.x + v.y + v.z) / 3.0;
    BlochVector::raw(s, s, s)
}

/// ⅓(ρ + TρT† + T†ρT) with T = KH.
pub fn dephase_density(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: rho.dim(),
        });
    }
    let t = Gate1::T.matrix();
    let m = rho.matrix();
    let sum = m + &t * m * t.adjoint() + t.adjoint() * m * &t;
    DensityMatrix::from_matrix(sum / Complex64::from(3.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneCoords {
    /// x + y + z, equal to √3(2F − 1).
    pub a: f64,
    /// Distance from the magic axis.
    pub r: f64,
    /// Angle in [0, 2π).
    pub theta: f64,
}

impl PlaneCoords {
    pub fn new(a: f64, r: f64, theta: f64) -> Self {
        Self { a, r, theta }
    }

    /// Plane coordinates for a fidelity value rather than `a`.
    pub fn from_fidelity(fidelity: f64, r: f64, theta: f64) -> Self {
        Self::new(a_from_fidelity(fidelity), r, theta)
    }

    pub fn fidelity(&self) -> f64 {
        fidelity_from_a(self.a)
    }
}

pub fn a_from_fidelity(fidelity: f64) -> f64 {
    SQRT3 * (2.0 * fidelity - 1.0)
}

pub fn fidelity_from_a(a: f64) -> f64 {
    0.5 * (1.0 + a / SQRT3)
}

/// Largest r for which the point (a, r, θ) stays inside the unit ball.
pub fn max_plane_radius(a: f64) -> f64 {
    (1.0 - a * a / 3.0).max(0.0).sqrt()
}

pub fn to_plane(v: BlochVector) -> PlaneCoords {
    let a = v.x + v.y + v.z;
    let u = v.x * PLANE_E1[0] + v.y * PLANE_E1[1] + v.z * PLANE_E1[2];
    let w = v.x * PLANE_E2[0] + v.y * PLANE_E2[1] + v.z * PLANE_E2[2];
    let r = u.hypot(w);
    let theta = if r == 0.0 {
        0.0
    } else {
        wrap_angle(w.atan2(u))
    };
    PlaneCoords { a, r, theta }
}

/// Cartesian point for plane coordinates; not checked against the ball.
pub fn from_plane_unchecked(p: PlaneCoords) -> BlochVector {
    let s = p.a / 3.0;
    let (sin, cos) = p.theta.sin_cos();
    let u = p.r * cos;
    let w = p.r * sin;
    BlochVector::raw(
        s + u * PLANE_E1[0] + w * PLANE_E2[0],
        s + u * PLANE_E1[1] + w * PLANE_E2[1],
        s + u * PLANE_E1[2] + w * PLANE_E2[2],
    )
}

pub fn from_plane(p: PlaneCoords) -> Result<BlochVector> {
    let v = from_plane_unchecked(p);
    BlochVector::new(v.x, v.y, v.z)
}

/// Wraps an angle into [0, 2π).
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// |T₀⟩ and |T₁⟩ as kets, density matrices and Bloch vectors.
#[derive(Debug, Clone)]
pub struct MagicBasis {
    pub t0_ket: [Complex64; 2],
    pub t1_ket: [Complex64; 2],
    pub t0: DensityMatrix,
    pub t1: DensityMatrix,
    pub t0_bloch: BlochVector,
    pub t1_bloch: BlochVector,
}

impl MagicBasis {
    pub fn new() -> Self {
        // |T₀⟩ = cos β|0⟩ + e^{iπ/4} sin β|1⟩ with cos 2β = 1/√3
        let beta = 0.5 * (1.0 / SQRT3).acos();
        let phase = Complex64::from_polar(1.0, PI / 4.0);
        let t0_ket = [Complex64::from(beta.cos()), phase * beta.sin()];
        let t1_ket = [-t0_ket[1].conj(), t0_ket[0].conj()];
        let t0 = DensityMatrix::from_pure(&t0_ket).expect("one-qubit ket");
        let t1 = DensityMatrix::from_pure(&t1_ket).expect("one-qubit ket");
        Self {
            t0_ket,
            t1_ket,
            t0,
            t1,
            t0_bloch: BlochVector::magic(),
            t1_bloch: BlochVector::orthogonal_magic(),
        }
    }

    /// (1 − ε)|T₀⟩⟨T₀| + ε|T₁⟩⟨T₁|.
    pub fn noisy_magic(&self, eps: f64) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidProbability {
                name: "epsilon",
                value: eps,
            });
        }
        DensityMatrix::from_matrix(
            self.t0.matrix() * Complex64::from(1.0 - eps) + self.t1.matrix() * Complex64::from(eps),
        )
    }

    /// Matrix elements (⟨T₀|ρ|T₀⟩, ⟨T₁|ρ|T₁⟩, ⟨T₀|ρ|T₁⟩) of a one-qubit operator.
    pub fn components(&self, rho: &DensityMatrix) -> (f64, f64, Complex64) {
        let m = rho.matrix();
        let elem = |bra: &[Complex64; 2], ket: &[Complex64; 2]| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    acc += bra[i].conj() * m[(i, j)] * ket[j];
                }
            }
            acc
        };
        (
            elem(&self.t0_ket, &self.t0_ket).re,
            elem(&self.t1_ket, &self.t1_ket).re,
            elem(&self.t0_ket, &self.t1_ket),
        )
    }

    /// The change-of-basis matrix whose columns are |T₀⟩ and |T₁⟩.
    pub fn basis_matrix(&self) -> CMatrix {
        dmatrix![self.t0_ket[0], self.t1_ket[0]; self.t0_ket[1], self.t1_ket[1]]
    }
}

impl Default for MagicBasis {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: BlochVector, b: BlochVector, tol: f64) -> bool {
        a.distance(b) < tol
    }

    #[test]
    fn fidelity_examples() {
        assert!((fidelity_to_magic(BlochVector::magic()) - 1.0).abs() < 1e-15);
        assert_eq!(fidelity_to_magic(BlochVector::ORIGIN), 0.5);
        // on-axis point with a = 3/√7
        let s = 3f64 / 7f64.sqrt() / 3.0;
        let f = fidelity_to_magic(BlochVector::raw(s, s, s));
        assert!((f - 0.5 * (1.0 + (3.0f64 / 7.0).sqrt())).abs() < 1e-15);
        assert!((f - 0.8273268).abs() < 1e-7);
    }

    #[test]
    fn dephase_examples() {
        assert!(close(
            dephase(BlochVector::magic()),
            BlochVector::magic(),
            1e-15
        ));
        let third = 1.0 / 3.0;
        assert_eq!(
            dephase(BlochVector::raw(1.0, 0.0, 0.0)),
            BlochVector::raw(third, third, third)
        );
        assert_eq!(
            dephase(BlochVector::raw(1.0, -1.0, 0.0)),
            BlochVector::ORIGIN
        );
    }

    #[test]
    fn rejects_points_outside_ball_and_clamps_rounding() {
        assert!(matches!(
            BlochVector::new(1.0, 0.1, 0.0),
            Err(Error::OutsideBall { .. })
        ));
        let (v, clamped) = BlochVector::checked(1.0 + 5e-10, 0.0, 0.0).unwrap();
        assert!(clamped);
        assert_eq!(v.norm(), 1.0);
        let (_, clamped) = BlochVector::checked(0.5, 0.5, 0.5).unwrap();
        assert!(!clamped);
    }

    #[test]
    fn plane_of_magic_state() {
        let p = to_plane(BlochVector::magic());
        assert!((p.a - 3f64.sqrt()).abs() < 1e-15);
        assert!(p.r < 1e-15);
        assert_eq!(p.theta, 0.0);
    }

    #[test]
    fn modified_x_axis_direction() {
        let r = 0.4;
        let v = from_plane(PlaneCoords::new(0.0, r, 0.0)).unwrap();
        assert!((v.x + v.y + v.z).abs() < 1e-15);
        let want = BlochVector::raw(PLANE_E1[0] * r, PLANE_E1[1] * r, PLANE_E1[2] * r);
        assert!(close(v, want, 1e-15));
        let w = from_plane(PlaneCoords::new(0.0, r, PI / 2.0)).unwrap();
        assert!(close(
            w,
            BlochVector::raw(r / SQRT2, -r / SQRT2, 0.0),
            1e-15
        ));
    }

    #[test]
    fn magic_basis_is_orthonormal() {
        let b = MagicBasis::new();
        let ip: Complex64 = b.t0_ket[0].conj() * b.t1_ket[0] + b.t0_ket[1].conj() * b.t1_ket[1];
        assert!(ip.norm() < 1e-12);
        for rho in [&b.t0, &b.t1] {
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            assert!((rho.purity() - 1.0).abs() < 1e-12);
        }
        let v0 = BlochVector::from_density(&b.t0).unwrap();
        let v1 = BlochVector::from_density(&b.t1).unwrap();
        assert!(close(v0, BlochVector::magic(), 1e-12));
        assert!(close(v1, BlochVector::orthogonal_magic(), 1e-12));
    }

    #[test]
    fn dephase_density_examples() {
        let b = MagicBasis::new();
        let out = dephase_density(&b.t0).unwrap();
        assert!((out.matrix() - b.t0.matrix()).norm() < 1e-14);

        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        let out = dephase_density(&mixed).unwrap();
        assert!((out.matrix() - mixed.matrix()).norm() < 1e-15);

        let zero = BlochVector::raw(0.0, 0.0, 1.0);
        let out = dephase_density(&zero.to_density()).unwrap();
        let want = dephase(zero).to_density();
        assert!((out.matrix() - want.matrix()).norm() < 1e-14);
    }

    fn ball_point() -> impl Strategy<Value = BlochVector> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("inside ball", |(x, y, z)| x * x + y * y + z * z <= 1.0)
            .prop_map(|(x, y, z)| BlochVector::raw(x, y, z))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn plane_round_trip(v in ball_point()) {
            let p = to_plane(v);
            prop_assert!(p.theta >= 0.0 && p.theta < TAU);
            let back = from_plane_unchecked(p);
            prop_assert!(close(v, back, 1e-12));
            if p.r > 1e-6 {
                let again = to_plane(back);
                prop_assert!((again.a - p.a).abs() < 1e-12);
                prop_assert!((again.r - p.r).abs() < 1e-12);
                let dt = (again.theta - p.theta).abs();
                prop_assert!(dt < 1e-9 || (TAU - dt) < 1e-9);
            }
        }

        #[test]
        fn dephase_is_idempotent_and_keeps_fidelity(v in ball_point()) {
            let d = dephase(v);
            prop_assert_eq!(dephase(d), d);
            prop_assert!((fidelity_to_magic(d) - fidelity_to_magic(v)).abs() < 1e-15);
        }

        #[test]
        fn dephase_density_agrees_with_bloch(v in ball_point()) {
            let out = dephase_density(&v.to_density()).unwrap();
            let want = dephase(v).to_density();
            prop_assert!((out.matrix() - want.matrix()).norm() < 1e-12);
            prop_assert!((out.trace() - 1.0).abs() < 1e-14);
            prop_assert!(out.hermiticity_error() < 1e-15);
        }

        #[test]
        fn plane_fidelity_depends_only_on_a(
            f in 0.55f64..0.99, r in 0.0f64..1.0, theta in 0.0f64..TAU
        ) {
            let a = a_from_fidelity(f);
            let r = r * max_plane_radius(a);
            let v = from_plane_unchecked(PlaneCoords::new(a, r, theta));
            prop_assert!((fidelity_to_magic(v) - f).abs() < 1e-12);
        }
    }
}
