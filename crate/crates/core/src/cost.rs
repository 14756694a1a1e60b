//! Expected gate cost of distilling to a target fidelity, with faulty gates
//! and with perfect (logical) gates.
//!
//! Level k consumes five level-(k−1) outputs per attempt and succeeds with
//! the acceptance probability P(k) of its round, so its expected cost is
//! C(k) = (5·C(k−1) + B)/P(k) with C(0) = 0, where B is the number of gates
//! in one round.

use rayon::prelude::*;

use crate::densmat::decoder::{one_qubit_gate_count, two_qubit_gate_count};
use crate::densmat::NoiseParams;
use crate::error::{Error, Result};
use crate::noisy::{analytic_round, noisy_fixed_points};

/// Rounds after which a target is treated as unreachable.
pub const MAX_COST_ROUNDS: usize = 64;

/// Default input-fidelity grid for cost curves: 0.85 to 0.99 in steps of 0.001.
pub fn default_grid() -> Vec<f64> {
    (0..=140).map(|i| 0.85 + i as f64 * 1e-3).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    /// Two-qubit gates per round.
    pub b2: usize,
    pub target_f: f64,
    /// Physical two-qubit gates per logical gate.
    pub ft_overhead: f64,
    /// Gate noise of the faulty branch.
    pub noise: NoiseParams,
    /// Count one-qubit gates as well.
    pub include_one_qubit: bool,
}

impl CostModel {
    /// Model using the decoder's own gate count.
    pub fn new(target_f: f64, noise: NoiseParams) -> Result<Self> {
        let m = Self {
            b2: two_qubit_gate_count(),
            target_f,
            ft_overhead: 100.0,
            noise,
            include_one_qubit: false,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.b2 == 0 {
            return Err(Error::InvalidArgument("b2 must be at least 1".into()));
        }
        if !(self.ft_overhead >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "ft_overhead must be ≥ 1, got {}",
                self.ft_overhead
            )));
        }
        if !(self.target_f > 0.5 && self.target_f < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "target fidelity must lie in (0.5, 1), got {}",
                self.target_f
            )));
        }
        self.noise.validate()
    }

    /// Gates counted per round.
    pub fn gates_per_round(&self) -> usize {
        if self.include_one_qubit {
            self.b2 + one_qubit_gate_count()
        } else {
            self.b2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEstimate {
    pub gates: f64,
    pub rounds: usize,
}

/// Expected gates to bring five-fold copies of fidelity `f_in` to the
/// model's target, with the model's noise (`noisy`) or perfect gates.
pub fn expected_gate_count(f_in: f64, model: &CostModel, noisy: bool) -> Result<CostEstimate> {
    model.validate()?;
    if !(0.0..=1.0).contains(&f_in) {
        return Err(Error::InvalidProbability {
            name: "f_in",
            value: f_in,
        });
    }
    let noise = if noisy {
        model.noise
    } else {
        NoiseParams::NOISELESS
    };
    if !noise.is_noiseless() {
        let ceiling = match noisy_fixed_points(noise) {
            Ok(fp) => fp.f_ceiling,
            Err(Error::NoDistillation) => 0.0,
            Err(e) => return Err(e),
        };
        if model.target_f > ceiling {
            return Err(Error::Unreachable(format!(
                "target {} exceeds the ceiling {ceiling}",
                model.target_f
            )));
        }
    }
    let b = model.gates_per_round() as f64;
    let mut eps = 1.0 - f_in;
    let mut cost = 0.0;
    let mut rounds = 0;
    while 1.0 - eps < model.target_f {
        if rounds == MAX_COST_ROUNDS {
            return Err(Error::Unreachable(format!(
                "target not reached within {MAX_COST_ROUNDS} rounds"
            )));
        }
        let r = analytic_round(eps, noise)?;
        if r.eps_out >= eps {
            return Err(Error::Unreachable(format!(
                "input fidelity {f_in} does not improve under distillation"
            )));
        }
        cost = (5.0 * cost + b) / r.p_accept;
        eps = r.eps_out;
        rounds += 1;
    }
    Ok(CostEstimate {
        gates: cost,
        rounds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostCurvePoint {
    pub f_in: f64,
    /// `None` where the faulty branch cannot reach the target.
    pub faulty: Option<CostEstimate>,
    /// Perfect-gate branch, a lower bound on logical gates.
    pub ideal: Option<CostEstimate>,
}

impl CostCurvePoint {
    /// Faulty over ideal gate count, when both are reachable.
    pub fn ratio(&self) -> Option<f64> {
        match (self.faulty, self.ideal) {
            (Some(f), Some(i)) => Some(gate_ratio(f.gates, i.gates)),
            _ => None,
        }
    }
}

fn gate_ratio(faulty: f64, ideal: f64) -> f64 {
    if faulty == 0.0 && ideal == 0.0 {
        1.0
    } else {
        faulty / ideal
    }
}

fn reachable(r: Result<CostEstimate>) -> Result<Option<CostEstimate>> {
    match r {
        Ok(c) => Ok(Some(c)),
        Err(Error::Unreachable(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Both branches on every grid point, in grid order.
pub fn comparison_curve(model: &CostModel, grid: &[f64]) -> Result<Vec<CostCurvePoint>> {
    model.validate()?;
    grid.par_iter()
        .map(|&f_in| {
            Ok(CostCurvePoint {
                f_in,
                faulty: reachable(expected_gate_count(f_in, model, true))?,
                ideal: reachable(expected_gate_count(f_in, model, false))?,
            })
        })
        .collect()
}

/// Physical-per-logical overhead at which both approaches cost the same.
pub fn crossover_overhead(f_in: f64, model: &CostModel) -> Result<f64> {
    let faulty = expected_gate_count(f_in, model, true)?;
    let ideal = expected_gate_count(f_in, model, false)?;
    Ok(gate_ratio(faulty.gates, ideal.gates))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(e: f64) -> CostModel {
        CostModel::new(0.99, NoiseParams::from_gate_errors(e, e).unwrap()).unwrap()
    }

    #[test]
    fn one_round_cost() {
        let m = model(0.0);
        let f_in = 0.96;
        let c = expected_gate_count(f_in, &m, false).unwrap();
        assert_eq!(c.rounds, 1);
        let p = analytic_round(1.0 - f_in, NoiseParams::NOISELESS)
            .unwrap()
            .p_accept;
        assert!((c.gates - 8.0 / p).abs() < 1e-12);
    }

    #[test]
    fn already_at_target_costs_nothing() {
        let c = expected_gate_count(0.995, &model(0.0), false).unwrap();
        assert_eq!(
            c,
            CostEstimate {
                gates: 0.0,
                rounds: 0
            }
        );
        assert_eq!(crossover_overhead(0.995, &model(0.001)).unwrap(), 1.0);
    }

    #[test]
    fn unreachable_cases() {
        assert!(matches!(
            expected_gate_count(0.8, &model(0.0), false),
            Err(Error::Unreachable(_))
        ));
        let mut m = model(0.001);
        m.target_f = 0.999;
        assert!(matches!(
            expected_gate_count(0.95, &m, true),
            Err(Error::Unreachable(_))
        ));
        assert!(expected_gate_count(0.95, &m, false).is_ok());
    }

    #[test]
    fn doubling_gates_doubles_cost() {
        let m = model(0.001);
        let mut m2 = m;
        m2.b2 *= 2;
        for f in [0.86, 0.9, 0.95] {
            for noisy in [false, true] {
                let a = expected_gate_count(f, &m, noisy).unwrap();
                let b = expected_gate_count(f, &m2, noisy).unwrap();
                assert_eq!(a.rounds, b.rounds);
                assert!((b.gates - 2.0 * a.gates).abs() <= 1e-12 * b.gates);
            }
        }
    }

    #[test]
    fn one_qubit_extension_adds_gates() {
        let mut m = model(0.001);
        let base = expected_gate_count(0.9, &m, true).unwrap();
        m.include_one_qubit = true;
        let ext = expected_gate_count(0.9, &m, true).unwrap();
        assert!((ext.gates / base.gates - 17.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(CostModel::new(1.0, NoiseParams::NOISELESS).is_err());
        let mut m = model(0.0);
        m.ft_overhead = 0.5;
        assert!(m.validate().is_err());
        m = model(0.0);
        m.b2 = 0;
        assert!(m.validate().is_err());
    }
}
