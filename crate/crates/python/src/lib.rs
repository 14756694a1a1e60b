//! Python bindings for `magicforge`.

use std::collections::HashMap;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use magicforge_core::bloch::{fidelity_to_magic, from_plane, to_plane};
use magicforge_core::cost::{expected_gate_count as cost_count, CostModel};
use magicforge_core::densmat::distill_round;
use magicforge_core::ideal_map::{self, DEFAULT_MAX_ROUNDS, DEFAULT_RADIUS_TOL};
use magicforge_core::noisy;
use magicforge_core::{Error, NoiseParams, PlaneCoords};

create_exception!(magicforge, UnreachableError, PyRuntimeError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Unreachable(_)
        | Error::InvalidRegime(_)
        | Error::NoDistillation
        | Error::ZeroProbability(_) => UnreachableError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Single-qubit Bloch vector inside the unit ball.
#[pyclass(name = "BlochVector", frozen, eq, skip_from_py_object)]
#[derive(Clone, Copy, PartialEq)]
pub struct PyBlochVector {
    inner: magicforge_core::BlochVector,
}

impl From<magicforge_core::BlochVector> for PyBlochVector {
    fn from(inner: magicforge_core::BlochVector) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyBlochVector {
    #[new]
    fn new(x: f64, y: f64, z: f64) -> PyResult<Self> {
        Ok(magicforge_core::BlochVector::new(x, y, z)
            .map_err(to_py)?
            .into())
    }

    #[staticmethod]
    fn magic() -> Self {
        magicforge_core::BlochVector::magic().into()
    }

    #[staticmethod]
    fn on_axis(fidelity: f64) -> PyResult<Self> {
        Ok(magicforge_core::BlochVector::on_axis(fidelity)
            .map_err(to_py)?
            .into())
    }

    /// Point at distance `r` and angle `theta` on the plane of fidelity `fidelity`.
    #[staticmethod]
    fn from_plane(fidelity: f64, r: f64, theta: f64) -> PyResult<Self> {
        Ok(from_plane(PlaneCoords::from_fidelity(fidelity, r, theta))
            .map_err(to_py)?
            .into())
    }

    #[getter]
    fn x(&self) -> f64 {
        self.inner.x
    }

    #[getter]
    fn y(&self) -> f64 {
        self.inner.y
    }

    #[getter]
    fn z(&self) -> f64 {
        self.inner.z
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    /// Fidelity with the magic state.
    fn fidelity(&self) -> f64 {
        fidelity_to_magic(self.inner)
    }

    /// `(a, r, theta)` plane coordinates.
    fn to_plane(&self) -> (f64, f64, f64) {
        let p = to_plane(self.inner);
        (p.a, p.r, p.theta)
    }

    fn to_list(&self) -> [f64; 3] {
        self.inner.to_array()
    }

    fn __repr__(&self) -> String {
        format!(
            "BlochVector({}, {}, {})",
            self.inner.x, self.inner.y, self.inner.z
        )
    }
}

/// Depolarizing strengths of one- and two-qubit gates.
#[pyclass(name = "NoiseParams", frozen, eq, skip_from_py_object)]
#[derive(Clone, Copy, PartialEq)]
pub struct PyNoiseParams {
    inner: NoiseParams,
}

#[pymethods]
impl PyNoiseParams {
    #[new]
    #[pyo3(signature = (p1 = 0.0, p2 = 0.0))]
    fn new(p1: f64, p2: f64) -> PyResult<Self> {
        Ok(Self {
            inner: NoiseParams::new(p1, p2).map_err(to_py)?,
        })
    }

    /// From average gate errors: p1 = 2 E1, p2 = 4 E2 / 3.
    #[staticmethod]
    fn from_gate_errors(e1: f64, e2: f64) -> PyResult<Self> {
        Ok(Self {
            inner: NoiseParams::from_gate_errors(e1, e2).map_err(to_py)?,
        })
    }

    #[getter]
    fn p1(&self) -> f64 {
        self.inner.p1
    }

    #[getter]
    fn p2(&self) -> f64 {
        self.inner.p2
    }

    #[getter]
    fn e1(&self) -> f64 {
        self.inner.e1()
    }

    #[getter]
    fn e2(&self) -> f64 {
        self.inner.e2()
    }

    fn __repr__(&self) -> String {
        format!("NoiseParams(p1={}, p2={})", self.inner.p1, self.inner.p2)
    }
}

/// One noisy round on the magic axis.
#[pyclass(name = "NoisyRound", frozen)]
pub struct PyNoisyRound {
    #[pyo3(get)]
    eps_out: f64,
    #[pyo3(get)]
    p_accept: f64,
    #[pyo3(get)]
    c00: f64,
    #[pyo3(get)]
    c11: f64,
    #[pyo3(get)]
    c01: Complex64,
    #[pyo3(get)]
    out_of_range: bool,
}

impl From<noisy::NoisyRound> for PyNoisyRound {
    fn from(r: noisy::NoisyRound) -> Self {
        Self {
            eps_out: r.eps_out,
            p_accept: r.p_accept,
            c00: r.coeffs.c00,
            c11: r.coeffs.c11,
            c01: r.coeffs.c01,
            out_of_range: r.out_of_range,
        }
    }
}

#[pymethods]
impl PyNoisyRound {
    fn __repr__(&self) -> String {
        format!(
            "NoisyRound(eps_out={}, p_accept={})",
            self.eps_out, self.p_accept
        )
    }
}

/// Closed-form ideal round map.
#[pyfunction]
fn distill_map(v: &PyBlochVector) -> PyBlochVector {
    ideal_map::distill_map(v.inner).into()
}

/// F_out − F_in for one round at plane coordinates.
#[pyfunction]
fn fidelity_difference(fidelity: f64, r: f64, theta: f64) -> f64 {
    ideal_map::fidelity_difference(PlaneCoords::from_fidelity(fidelity, r, theta))
}

/// Trajectory, attractor name and rounds used.
#[pyfunction]
#[pyo3(signature = (v, max_rounds = DEFAULT_MAX_ROUNDS, radius_tol = DEFAULT_RADIUS_TOL))]
fn iterate_and_classify(
    v: &PyBlochVector,
    max_rounds: usize,
    radius_tol: f64,
) -> PyResult<(Vec<PyBlochVector>, String, usize)> {
    let t = ideal_map::iterate_and_classify(v.inner, max_rounds, radius_tol).map_err(to_py)?;
    Ok((
        t.states.into_iter().map(Into::into).collect(),
        t.classification.to_string(),
        t.rounds_used,
    ))
}

type BasinRow = (f64, f64, f64, f64, f64, Option<String>, usize);

/// Rows `(r, theta, x, y, z, class, rounds_used)`; class is `None` outside the ball.
#[pyfunction]
#[pyo3(signature = (fidelity, n_r, n_theta, max_rounds = DEFAULT_MAX_ROUNDS, r_max = None))]
fn basin_grid(
    py: Python<'_>,
    fidelity: f64,
    n_r: usize,
    n_theta: usize,
    max_rounds: usize,
    r_max: Option<f64>,
) -> PyResult<Vec<BasinRow>> {
    let r_max = r_max.unwrap_or_else(|| {
        magicforge_core::bloch::max_plane_radius(magicforge_core::bloch::a_from_fidelity(fidelity))
    });
    let cells = py
        .detach(|| ideal_map::basin_grid(fidelity, r_max, n_r, n_theta, max_rounds))
        .map_err(to_py)?;
    Ok(cells
        .into_iter()
        .map(|c| {
            (
                c.r,
                c.theta,
                c.point.x,
                c.point.y,
                c.point.z,
                c.class.map(|k| k.to_string()),
                c.rounds_used,
            )
        })
        .collect())
}

#[pyfunction]
fn on_axis_threshold() -> PyResult<f64> {
    ideal_map::on_axis_threshold().map_err(to_py)
}

#[pyfunction]
fn off_axis_threshold(py: Python<'_>, theta: f64) -> PyResult<f64> {
    py.detach(|| ideal_map::off_axis_threshold(theta))
        .map_err(to_py)
}

/// Round from the closed-form polynomials.
#[pyfunction]
fn analytic_round(eps: f64, noise: &PyNoiseParams) -> PyResult<PyNoisyRound> {
    Ok(noisy::analytic_round(eps, noise.inner)
        .map_err(to_py)?
        .into())
}

/// Round from the dense five-qubit simulation.
#[pyfunction]
fn simulated_round(eps: f64, noise: &PyNoiseParams) -> PyResult<PyNoisyRound> {
    Ok(noisy::simulated_round(eps, noise.inner)
        .map_err(to_py)?
        .into())
}

/// Output state and acceptance of the simulated circuit for five copies of `v`.
#[pyfunction]
#[pyo3(signature = (v, noise = None, use_dephasing = true))]
fn simulate_round(
    v: &PyBlochVector,
    noise: Option<&PyNoiseParams>,
    use_dephasing: bool,
) -> PyResult<(PyBlochVector, f64)> {
    let noise = noise.map_or(NoiseParams::NOISELESS, |n| n.inner);
    let out = distill_round(v.inner, noise, use_dephasing).map_err(to_py)?;
    Ok((out.bloch().map_err(to_py)?.into(), out.p_accept))
}

#[pyfunction]
fn noisy_fixed_points(noise: &PyNoiseParams) -> PyResult<HashMap<&'static str, f64>> {
    let fp = noisy::noisy_fixed_points(noise.inner).map_err(to_py)?;
    Ok(HashMap::from([
        ("epsilon_star", fp.epsilon_star),
        ("f_ceiling", fp.f_ceiling),
        ("threshold_eps", fp.threshold_eps),
        ("threshold_f", fp.threshold_f),
    ]))
}

/// Rows `(f_in, f_out, f_limit)`.
#[pyfunction]
fn fidelity_curve(noise: &PyNoiseParams, grid: Vec<f64>) -> PyResult<Vec<(f64, f64, f64)>> {
    let pts = noisy::fidelity_curve(noise.inner, &grid).map_err(to_py)?;
    Ok(pts
        .into_iter()
        .map(|p| (p.f_in, p.f_out, p.f_limit))
        .collect())
}

/// Fidelity of the pi/12 gate built from a magic state of error `eps_prime`.
#[pyfunction]
fn universal_gate_fidelity(a_amp: f64, eps_prime: f64) -> PyResult<f64> {
    noisy::universal_gate_fidelity(a_amp, eps_prime).map_err(to_py)
}

#[pyfunction]
fn simulated_gate_fidelity(a_amp: f64, eps_prime: f64) -> PyResult<f64> {
    noisy::simulated_gate_fidelity(a_amp, eps_prime).map_err(to_py)
}

/// `(gates, rounds)` to reach `target` from `f_in` with gate error `e`,
/// or with perfect gates when `noisy` is false.
#[pyfunction]
#[pyo3(signature = (f_in, target, e, noisy = true, ft_overhead = 100.0, include_one_qubit = false))]
fn expected_gate_count(
    f_in: f64,
    target: f64,
    e: f64,
    noisy: bool,
    ft_overhead: f64,
    include_one_qubit: bool,
) -> PyResult<(f64, usize)> {
    let noise = NoiseParams::from_gate_errors(e, e).map_err(to_py)?;
    let mut model = CostModel::new(target, noise).map_err(to_py)?;
    model.ft_overhead = ft_overhead;
    model.include_one_qubit = include_one_qubit;
    let c = cost_count(f_in, &model, noisy).map_err(to_py)?;
    Ok((c.gates, c.rounds))
}

#[pyfunction]
fn two_qubit_gate_count() -> usize {
    magicforge_core::densmat::decoder::two_qubit_gate_count()
}

#[pymodule]
fn magicforge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("UnreachableError", m.py().get_type::<UnreachableError>())?;
    m.add_class::<PyBlochVector>()?;
    m.add_class::<PyNoiseParams>()?;
    m.add_class::<PyNoisyRound>()?;
    m.add_function(wrap_pyfunction!(distill_map, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_difference, m)?)?;
    m.add_function(wrap_pyfunction!(iterate_and_classify, m)?)?;
    m.add_function(wrap_pyfunction!(basin_grid, m)?)?;
    m.add_function(wrap_pyfunction!(on_axis_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(off_axis_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_round, m)?)?;
    m.add_function(wrap_pyfunction!(simulated_round, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_round, m)?)?;
    m.add_function(wrap_pyfunction!(noisy_fixed_points, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_curve, m)?)?;
    m.add_function(wrap_pyfunction!(universal_gate_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(simulated_gate_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(expected_gate_count, m)?)?;
    m.add_function(wrap_pyfunction!(two_qubit_gate_count, m)?)?;
    Ok(())
}
