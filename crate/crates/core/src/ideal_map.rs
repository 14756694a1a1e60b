//! The single-round distillation map with perfect gates and its iterated
//! dynamics on the Bloch ball.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bloch::{
    a_from_fidelity, from_plane_unchecked, max_plane_radius, BlochVector, PlaneCoords, BALL_TOL,
};
use crate::error::{Error, Result};
use crate::roots::{bisect, bisect_predicate};

pub const DEFAULT_RADIUS_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ROUNDS: usize = 60;
pub const THRESHOLD_WIDTH: f64 = 1e-10;
pub const OFF_AXIS_R_SAMPLES: usize = 400;

const SQRT3: f64 = 1.732_050_807_568_877_2;
const SQRT6: f64 = 2.449_489_742_783_178;

/// Output Bloch vector of one post-selected round on five copies of `v`,
/// together with a flag set when rounding pushed it outside the ball.
pub fn distill_map_checked(v: BlochVector) -> (BlochVector, bool) {
    let (x, y, z) = (v.x, v.y, v.z);
    let (x2, y2, z2) = (x * x, y * y, z * z);
    let d = 1.0 + 5.0 * (z2 * y2 + x2 * y2 + z2 * x2);
    let xo = -z * (z2 * z2 - 5.0 * x2 + 5.0 * y2 * (x2 - 1.0)) / d;
    let yo = -y * (y2 * y2 - 5.0 * z2 + 5.0 * x2 * (z2 - 1.0)) / d;
    let zo = -x * (x2 * x2 - 5.0 * z2 + 5.0 * y2 * (z2 - 1.0)) / d;
    BlochVector::raw(xo, yo, zo).clamp_to_ball()
}

pub fn distill_map(v: BlochVector) -> BlochVector {
    distill_map_checked(v).0
}

/// F_out − F_in for one round, in plane coordinates.
pub fn fidelity_difference(p: PlaneCoords) -> f64 {
    let PlaneCoords { a, r, theta } = p;
    let a2 = a * a;
    let r3 = r * r * r;
    let r4 = r3 * r;
    let c3 = (3.0 * theta).cos();
    let num =
        a * (54.0 - 60.0 * a2 + 14.0 * a2 * a2 + 135.0 * r4) + 15.0 * SQRT6 * (a2 - 3.0) * r3 * c3;
    let den = 108.0 + 20.0 * a2 * a2 + 135.0 * r4 + 60.0 * SQRT6 * a * r3 * c3;
    -2.0 * num / (2.0 * SQRT3 * den)
}

/// Fixed points reached by iterating the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttractorClass {
    /// (1, 1, 1)/√3.
    MagicT0,
    /// (sx, sy, sz)/√3 with mixed signs.
    Corner {
        signs: [i8; 3],
    },
    /// (−1, −1, −1)/√3.
    OrthogonalT1,
    MaximallyMixed,
    Unresolved,
}

impl AttractorClass {
    pub fn corner(signs: [i8; 3]) -> Self {
        match signs {
            [1, 1, 1] => AttractorClass::MagicT0,
            [-1, -1, -1] => AttractorClass::OrthogonalT1,
            s => AttractorClass::Corner { signs: s },
        }
    }

    /// Signs of the corner, if the class is one of the eight corners.
    pub fn signs(&self) -> Option<[i8; 3]> {
        match *self {
            AttractorClass::MagicT0 => Some([1, 1, 1]),
            AttractorClass::OrthogonalT1 => Some([-1, -1, -1]),
            AttractorClass::Corner { signs } => Some(signs),
            _ => None,
        }
    }

    /// Number of negative signs, for corner classes.
    pub fn sign_flips(&self) -> Option<usize> {
        self.signs().map(|s| s.iter().filter(|&&v| v < 0).count())
    }

    pub fn corner_point(&self) -> Option<BlochVector> {
        self.signs()
            .map(|s| BlochVector::raw(s[0] as f64, s[1] as f64, s[2] as f64).scale(1.0 / SQRT3))
    }

    /// Coarse class used by basin plots: corners grouped by sign-flip count.
    pub fn legend(&self) -> &'static str {
        match self {
            AttractorClass::MagicT0 => "magic",
            AttractorClass::OrthogonalT1 => "orthogonal",
            AttractorClass::MaximallyMixed => "mixed",
            AttractorClass::Unresolved => "unresolved",
            AttractorClass::Corner { .. } => match self.sign_flips() {
                Some(1) => "corner1",
                _ => "corner2",
            },
        }
    }
}

impl fmt::Display for AttractorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttractorClass::MagicT0 => f.write_str("MagicT0"),
            AttractorClass::OrthogonalT1 => f.write_str("OrthogonalT1"),
            AttractorClass::MaximallyMixed => f.write_str("MaximallyMixed"),
            AttractorClass::Unresolved => f.write_str("Unresolved"),
            AttractorClass::Corner { signs } => {
                let c = |s: i8| if s > 0 { '+' } else { '-' };
                write!(f, "Corner({}{}{})", c(signs[0]), c(signs[1]), c(signs[2]))
            }
        }
    }
}

impl FromStr for AttractorClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "MagicT0" => return Ok(AttractorClass::MagicT0),
            "OrthogonalT1" => return Ok(AttractorClass::OrthogonalT1),
            "MaximallyMixed" => return Ok(AttractorClass::MaximallyMixed),
            "Unresolved" => return Ok(AttractorClass::Unresolved),
            _ => {}
        }
        let inner = s
            .strip_prefix("Corner(")
            .and_then(|r| r.strip_suffix(')'))
            .filter(|r| r.len() == 3)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown attractor class {s:?}")))?;
        let mut signs = [0i8; 3];
        for (slot, ch) in signs.iter_mut().zip(inner.chars()) {
            *slot = match ch {
                '+' => 1,
                '-' => -1,
                _ => return Err(Error::InvalidArgument(format!("bad corner sign in {s:?}"))),
            };
        }
        Ok(AttractorClass::corner(signs))
    }
}

/// The attractor `v` sits on, if it lies within `radius_tol` of one.
pub fn classify_point(v: BlochVector, radius_tol: f64) -> Option<AttractorClass> {
    if v.norm() <= radius_tol {
        return Some(AttractorClass::MaximallyMixed);
    }
    let sign = |c: f64| if c >= 0.0 { 1 } else { -1 };
    let class = AttractorClass::corner([sign(v.x), sign(v.y), sign(v.z)]);
    let corner = class.corner_point()?;
    (v.distance(corner) <= radius_tol).then_some(class)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    /// The input followed by one entry per applied round.
    pub states: Vec<BlochVector>,
    pub classification: AttractorClass,
    pub rounds_used: usize,
}

impl IterationTrace {
    pub fn last(&self) -> BlochVector {
        *self.states.last().expect("trace holds at least the input")
    }
}

/// Iterates the map until the state settles on an attractor or `max_rounds`
/// rounds have been applied.
pub fn iterate_and_classify(
    v: BlochVector,
    max_rounds: usize,
    radius_tol: f64,
) -> Result<IterationTrace> {
    if max_rounds == 0 {
        return Err(Error::InvalidArgument(
            "max_rounds must be at least 1".into(),
        ));
    }
    if !(radius_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius_tol must be positive, got {radius_tol}"
        )));
    }
    let mut states = vec![v];
    let mut cur = v;
    for round in 0..=max_rounds {
        if let Some(class) = classify_point(cur, radius_tol) {
            return Ok(IterationTrace {
                states,
                classification: class,
                rounds_used: round,
            });
        }
        if round == max_rounds {
            break;
        }
        cur = distill_map(cur);
        states.push(cur);
    }
    Ok(IterationTrace {
        states,
        classification: AttractorClass::Unresolved,
        rounds_used: max_rounds,
    })
}

/// Final class and round count only, without storing the trajectory.
pub fn classify_orbit(
    v: BlochVector,
    max_rounds: usize,
    radius_tol: f64,
) -> (AttractorClass, usize) {
    let mut cur = v;
    for round in 0..=max_rounds {
        if let Some(class) = classify_point(cur, radius_tol) {
            return (class, round);
        }
        if round < max_rounds {
            cur = distill_map(cur);
        }
    }
    (AttractorClass::Unresolved, max_rounds)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasinCell {
    pub r: f64,
    pub theta: f64,
    /// Cartesian point; present even when outside the ball.
    pub point: BlochVector,
    /// `None` for grid points outside the ball.
    pub class: Option<AttractorClass>,
    pub rounds_used: usize,
}

impl BasinCell {
    pub fn in_domain(&self) -> bool {
        self.class.is_some()
    }
}

/// Grid radii `0, r_max/(n_r−1), …, r_max` (a single radius 0 when `n_r == 1`).
pub fn radius_grid(r_max: f64, n_r: usize) -> Vec<f64> {
    if n_r == 1 {
        return vec![0.0];
    }
    (0..n_r)
        .map(|i| r_max * i as f64 / (n_r - 1) as f64)
        .collect()
}

/// Angles `2πj/n_theta` for `j < n_theta`.
pub fn theta_grid(n_theta: usize) -> Vec<f64> {
    (0..n_theta)
        .map(|j| TAU * j as f64 / n_theta as f64)
        .collect()
}

/// Classifies every point of an (r, θ) grid on the plane of fidelity `fidelity`.
/// Cells are returned r-major: all angles for the first radius, then the next.
pub fn basin_grid(
    fidelity: f64,
    r_max: f64,
    n_r: usize,
    n_theta: usize,
    max_rounds: usize,
) -> Result<Vec<BasinCell>> {
    basin_grid_with_tol(
        fidelity,
        r_max,
        n_r,
        n_theta,
        max_rounds,
        DEFAULT_RADIUS_TOL,
    )
}

pub fn basin_grid_with_tol(
    fidelity: f64,
    r_max: f64,
    n_r: usize,
    n_theta: usize,
    max_rounds: usize,
    radius_tol: f64,
) -> Result<Vec<BasinCell>> {
    if !(fidelity > 0.0 && fidelity < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fidelity must lie in (0, 1), got {fidelity}"
        )));
    }
    if n_r == 0 || n_theta == 0 || max_rounds == 0 {
        return Err(Error::InvalidArgument(
            "grid sizes and max_rounds must be at least 1".into(),
        ));
    }
    if !(r_max >= 0.0 && r_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "r_max must be finite and ≥ 0, got {r_max}"
        )));
    }
    let a = a_from_fidelity(fidelity);
    let radii = radius_grid(r_max, n_r);
    let angles = theta_grid(n_theta);
    let cells = (0..n_r * n_theta)
        .into_par_iter()
        .map(|k| {
            let (r, theta) = (radii[k / n_theta], angles[k % n_theta]);
            let point = from_plane_unchecked(PlaneCoords::new(a, r, theta));
            if point.norm() > 1.0 + BALL_TOL {
                return BasinCell {
                    r,
                    theta,
                    point,
                    class: None,
                    rounds_used: 0,
                };
            }
            let (class, rounds_used) =
                classify_orbit(point.clamp_to_ball().0, max_rounds, radius_tol);
            BasinCell {
                r,
                theta,
                point,
                class: Some(class),
                rounds_used,
            }
        })
        .collect();
    Ok(cells)
}

/// Gain of one round for an on-axis input of the given fidelity.
pub fn on_axis_gain(fidelity: f64) -> f64 {
    fidelity_difference(PlaneCoords::new(a_from_fidelity(fidelity), 0.0, 0.0))
}

/// Input fidelity below which on-axis states lose fidelity each round.
pub fn on_axis_threshold() -> Result<f64> {
    bisect(on_axis_gain, 0.6, 0.95, THRESHOLD_WIDTH)
}

/// Whether some point at angle `theta` on the plane of fidelity `fidelity`
/// converges to the magic state.
pub fn plane_reaches_magic(
    fidelity: f64,
    theta: f64,
    r_samples: usize,
    max_rounds: usize,
    radius_tol: f64,
) -> bool {
    let a = a_from_fidelity(fidelity);
    let r_max = max_plane_radius(a);
    radius_grid(r_max, r_samples.max(1))
        .into_par_iter()
        .any(|r| {
            let v = from_plane_unchecked(PlaneCoords::new(a, r, theta))
                .clamp_to_ball()
                .0;
            classify_orbit(v, max_rounds, radius_tol).0 == AttractorClass::MagicT0
        })
}

/// Lowest input fidelity at angle `theta` reached by lowering F continuously
/// from the on-axis threshold while some distance from the axis still
/// converges to the magic state.
///
/// Convergence as a function of F is not monotone: nearly pure states far
/// from the axis can reach the magic state from much lower fidelities. The
/// search therefore steps down from just above the on-axis threshold in
/// increments of [`OFF_AXIS_F_STEP`] until convergence first fails, then
/// bisects that step.
pub fn off_axis_threshold(theta: f64) -> Result<f64> {
    off_axis_threshold_with(
        theta,
        OFF_AXIS_R_SAMPLES,
        DEFAULT_MAX_ROUNDS,
        DEFAULT_RADIUS_TOL,
    )
}

pub const OFF_AXIS_F_STEP: f64 = 2e-4;

pub fn off_axis_threshold_with(
    theta: f64,
    r_samples: usize,
    max_rounds: usize,
    radius_tol: f64,
) -> Result<f64> {
    if !(0.0..TAU).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "theta must lie in [0, 2π), got {theta}"
        )));
    }
    let reaches = |f: f64| plane_reaches_magic(f, theta, r_samples, max_rounds, radius_tol);
    let mut hi = on_axis_threshold()? + 1e-3;
    if !reaches(hi) {
        return Err(Error::Unreachable(format!(
            "no convergence at F = {hi} within {max_rounds} rounds"
        )));
    }
    loop {
        let lo = hi - OFF_AXIS_F_STEP;
        if lo <= 0.5 {
            return Err(Error::Unreachable(
                "convergence persists down to F = 0.5".into(),
            ));
        }
        if !reaches(lo) {
            return bisect_predicate(reaches, lo, hi, THRESHOLD_WIDTH);
        }
        hi = lo;
    }
}

/// Angles at which one round gains the most fidelity off the axis.
pub const MAX_GAIN_ANGLES: [f64; 3] = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{fidelity_from_a, fidelity_to_magic, from_plane};
    use proptest::prelude::*;

    fn closed_form_threshold() -> f64 {
        0.5 * (1.0 + (3.0f64 / 7.0).sqrt())
    }

    #[test]
    fn fixed_points() {
        assert!(distill_map(BlochVector::magic()).distance(BlochVector::magic()) < 1e-15);
        assert_eq!(distill_map(BlochVector::ORIGIN), BlochVector::ORIGIN);
    }

    #[test]
    fn corners_are_fixed_or_swapped() {
        // (sx, sy, sz) ↦ (sz, sy, sx)
        for bits in 0..8 {
            let s = [
                if bits & 4 != 0 { -1i8 } else { 1 },
                if bits & 2 != 0 { -1 } else { 1 },
                if bits & 1 != 0 { -1 } else { 1 },
            ];
            let c = AttractorClass::corner(s).corner_point().unwrap();
            let want = AttractorClass::corner([s[2], s[1], s[0]])
                .corner_point()
                .unwrap();
            assert!(distill_map(c).distance(want) < 1e-15, "{s:?}");
        }
    }

    #[test]
    fn on_axis_reduction() {
        for t in [0.1, 0.3, 0.45, 0.577] {
            let out = distill_map(BlochVector::raw(t, t, t));
            let want = (10.0 * t.powi(3) - 6.0 * t.powi(5)) / (1.0 + 15.0 * t.powi(4));
            for c in out.to_array() {
                assert!((c - want).abs() < 1e-15);
            }
        }
        let ft = closed_form_threshold();
        let v = BlochVector::on_axis(ft).unwrap();
        assert!((fidelity_to_magic(distill_map(v)) - ft).abs() < 1e-10);
    }

    #[test]
    fn gain_vanishes_at_fixed_points() {
        assert!(fidelity_difference(PlaneCoords::new(SQRT3, 0.0, 0.0)).abs() < 1e-14);
        let a = 3.0 / 7f64.sqrt();
        assert!(fidelity_difference(PlaneCoords::new(a, 0.0, 0.0)).abs() < 1e-14);
    }

    #[test]
    fn below_threshold_gain_turns_positive_off_axis() {
        let a = a_from_fidelity(0.8269);
        assert!(fidelity_difference(PlaneCoords::new(a, 0.0, 0.0)) < 0.0);
        let best = (1..200)
            .map(|i| fidelity_difference(PlaneCoords::new(a, 0.3 * i as f64 / 200.0, 0.0)))
            .fold(f64::MIN, f64::max);
        assert!(best > 0.0);
    }

    #[test]
    fn on_axis_threshold_matches_closed_form() {
        let f = on_axis_threshold().unwrap();
        assert!((f - closed_form_threshold()).abs() < 1e-9);
        assert!(on_axis_gain(f * (1.0 + 1e-6)) > 0.0);
        assert!(on_axis_gain(f * (1.0 - 1e-6)) < 0.0);
    }

    #[test]
    fn class_names_round_trip() {
        let all = [
            AttractorClass::MagicT0,
            AttractorClass::OrthogonalT1,
            AttractorClass::MaximallyMixed,
            AttractorClass::Unresolved,
            AttractorClass::corner([1, -1, 1]),
            AttractorClass::corner([-1, -1, 1]),
        ];
        for c in all {
            assert_eq!(c.to_string().parse::<AttractorClass>().unwrap(), c);
        }
        assert_eq!(AttractorClass::corner([1, 1, 1]), AttractorClass::MagicT0);
        assert_eq!(
            "Corner(---)".parse::<AttractorClass>().unwrap(),
            AttractorClass::OrthogonalT1
        );
        assert!("Corner(+x+)".parse::<AttractorClass>().is_err());
        assert_eq!(AttractorClass::corner([1, -1, -1]).sign_flips(), Some(2));
        assert_eq!(AttractorClass::MaximallyMixed.sign_flips(), None);
    }

    #[test]
    fn iteration_examples() {
        let t = iterate_and_classify(BlochVector::magic(), 60, 1e-6).unwrap();
        assert_eq!(
            (t.classification, t.rounds_used),
            (AttractorClass::MagicT0, 0)
        );
        assert_eq!(t.states.len(), 1);

        let t = iterate_and_classify(BlochVector::on_axis(0.823).unwrap(), 60, 1e-6).unwrap();
        assert_eq!(t.classification, AttractorClass::MaximallyMixed);
        for w in t.states.windows(2) {
            assert_eq!(w[1], distill_map(w[0]));
        }

        assert!(iterate_and_classify(BlochVector::magic(), 0, 1e-6).is_err());
    }

    #[test]
    fn iteration_reports_unresolved() {
        let t = iterate_and_classify(BlochVector::on_axis(0.9).unwrap(), 1, 1e-6).unwrap();
        assert_eq!(t.classification, AttractorClass::Unresolved);
        assert_eq!(t.rounds_used, 1);
        assert_eq!(t.states.len(), 2);
    }

    #[test]
    fn basin_grid_shape_and_domain() {
        let cells = basin_grid(0.886, 0.9, 7, 12, 60).unwrap();
        assert_eq!(cells.len(), 84);
        assert_eq!(cells[0].class, Some(AttractorClass::MagicT0));
        assert!(cells.iter().any(|c| !c.in_domain()));
        assert_eq!(cells[13].r, cells[12].r);
        assert!(basin_grid(1.0, 0.5, 2, 2, 10).is_err());
        assert!(basin_grid(0.0, 0.5, 2, 2, 10).is_err());
        assert!(basin_grid(0.9, 0.5, 0, 2, 10).is_err());
    }

    #[test]
    fn max_gain_angles() {
        let a = SQRT3 * (2.0 * 0.85 - 1.0);
        let n = 360;
        let gains: Vec<f64> = (0..n)
            .map(|j| fidelity_difference(PlaneCoords::new(a, 0.2, TAU * j as f64 / n as f64)))
            .collect();
        let best = gains.iter().cloned().fold(f64::MIN, f64::max);
        for target in MAX_GAIN_ANGLES {
            let j = (target / TAU * n as f64).round() as usize;
            assert!((gains[j] - best).abs() < 1e-15);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn map_stays_in_ball(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
            let n = (x * x + y * y + z * z).sqrt();
            let v = if n > 1.0 { BlochVector::raw(x / n, y / n, z / n) } else { BlochVector::raw(x, y, z) };
            let (_, clamped) = distill_map_checked(v);
            let raw_norm = {
                let (x2, y2, z2) = (v.x * v.x, v.y * v.y, v.z * v.z);
                let d = 1.0 + 5.0 * (z2 * y2 + x2 * y2 + z2 * x2);
                let xo = -v.z * (z2 * z2 - 5.0 * x2 + 5.0 * y2 * (x2 - 1.0)) / d;
                let yo = -v.y * (y2 * y2 - 5.0 * z2 + 5.0 * x2 * (z2 - 1.0)) / d;
                let zo = -v.x * (x2 * x2 - 5.0 * z2 + 5.0 * y2 * (z2 - 1.0)) / d;
                (xo * xo + yo * yo + zo * zo).sqrt()
            };
            prop_assert!(raw_norm <= 1.0 + 1e-12);
            prop_assert!(!clamped || raw_norm > 1.0);
        }

        #[test]
        fn gain_matches_composed_map(f in 0.5f64..1.0, u in 0.0f64..1.0, theta in 0.0f64..TAU) {
            let a = a_from_fidelity(f);
            let r = u * max_plane_radius(a);
            let p = PlaneCoords::new(a, r, theta);
            let v = from_plane(p).unwrap();
            let d = fidelity_to_magic(distill_map(v)) - fidelity_from_a(a);
            prop_assert!((fidelity_difference(p) - d).abs() < 1e-10);
        }

        #[test]
        fn gain_has_threefold_symmetry(a in -1.7f64..1.7, r in 0.0f64..0.8, theta in 0.0f64..TAU) {
            let d0 = fidelity_difference(PlaneCoords::new(a, r, theta));
            let d1 = fidelity_difference(PlaneCoords::new(a, r, theta + TAU / 3.0));
            prop_assert!((d0 - d1).abs() < 1e-12);
        }

        #[test]
        fn map_commutes_with_cyclic_shift(x in -0.57f64..0.57, y in -0.57f64..0.57, z in -0.57f64..0.57) {
            // M(z, x, y) is M(x, y, z) shifted the other way
            let m = distill_map(BlochVector::raw(x, y, z));
            let ms = distill_map(BlochVector::raw(z, x, y));
            prop_assert!((ms.x - m.y).abs() < 1e-14);
            prop_assert!((ms.y - m.z).abs() < 1e-14);
            prop_assert!((ms.z - m.x).abs() < 1e-14);
        }
    }
}
