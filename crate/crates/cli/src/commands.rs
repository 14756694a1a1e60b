//! Subcommands: argument parsing, config merging and CSV output.

use std::io;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use magicforge::bloch::{
    a_from_fidelity, fidelity_to_magic, from_plane_unchecked, max_plane_radius, wrap_angle,
    BALL_TOL,
};
use magicforge::cost::{comparison_curve, CostModel};
use magicforge::densmat::decoder::{one_qubit_gate_count, two_qubit_gate_count};
use magicforge::ideal_map::{
    basin_grid_with_tol, distill_map, fidelity_difference, iterate_and_classify,
    off_axis_threshold_with, on_axis_threshold, AttractorClass, OFF_AXIS_R_SAMPLES,
};
use magicforge::noisy::{fidelity_curve, noisy_fixed_points, RoundModel};
use magicforge::{BlochVector, Error, NoiseParams, PlaneCoords};

use crate::config::{linear_grid, ConfigError, RunConfig, ThresholdMode};
use crate::output::{opt_real, real, CsvOut};

#[derive(Debug, Parser)]
#[command(
    name = "magicforge",
    version,
    about = "Five-qubit magic state distillation"
)]
pub struct Cli {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output CSV path (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate one state and classify its attractor.
    Iterate(IterateArgs),
    /// Classify every cell of an (r, θ) grid on a fidelity plane.
    Basin(BasinArgs),
    /// Threshold fidelities, ideal or noisy.
    Threshold(ThresholdArgs),
    /// Output fidelity against input fidelity for several noise settings.
    Curve(CurveArgs),
    /// Expected gate counts with faulty and with perfect gates.
    Cost(CostArgs),
    /// One-round fidelity gain over an (r, θ) grid.
    Gain(GainArgs),
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<f64>,
    #[arg(long)]
    fidelity: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    radius_tol: Option<f64>,
    /// Inputs this far outside the ball are projected onto it.
    #[arg(long)]
    input_tol: Option<f64>,
    #[arg(long = "noise-e1")]
    e1: Option<f64>,
    #[arg(long = "noise-e2")]
    e2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BasinArgs {
    #[arg(long)]
    fidelity: Option<f64>,
    #[arg(long)]
    nr: Option<usize>,
    #[arg(long)]
    ntheta: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    radius_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, value_enum)]
    mode: Option<ThresholdMode>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long)]
    e1: Option<f64>,
    #[arg(long)]
    e2: Option<f64>,
    #[arg(long)]
    rounds: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// E₁ of each setting, comma separated.
    #[arg(long, value_delimiter = ',')]
    e1: Option<Vec<f64>>,
    /// E₂ of each setting, paired with `--e1`.
    #[arg(long, value_delimiter = ',')]
    e2: Option<Vec<f64>>,
    /// Input-fidelity grid as MIN,MAX,STEP.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    /// Gate error E₁ = E₂ of the faulty branch.
    #[arg(long)]
    e: Option<f64>,
    #[arg(long)]
    target: Option<f64>,
    #[arg(long)]
    ft_overhead: Option<f64>,
    /// Count one-qubit gates as well as two-qubit gates.
    #[arg(long)]
    include_one_qubit: bool,
    /// Input-fidelity grid as MIN,MAX,STEP.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct GainArgs {
    #[arg(long)]
    fidelity: Option<f64>,
    #[arg(long)]
    nr: Option<usize>,
    #[arg(long)]
    ntheta: Option<usize>,
    #[arg(long)]
    r_max: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Unreachable(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::Config(_) => 2,
            CliError::Unreachable(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Unreachable(_)
            | Error::InvalidRegime(_)
            | Error::NoDistillation
            | Error::ZeroProbability(_) => CliError::Unreachable(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Base config from `--config`, or defaults.
pub fn base_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    Ok(cfg)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = base_config(cli)?;
    match &cli.command {
        Command::Iterate(a) => {
            for (slot, v) in [(&mut cfg.x, a.x), (&mut cfg.y, a.y), (&mut cfg.z, a.z)] {
                if v.is_some() {
                    *slot = v;
                }
            }
            if a.fidelity.is_some() {
                cfg.fidelity = a.fidelity;
            }
            set(&mut cfg.r, a.r);
            set(&mut cfg.theta, a.theta);
            set(&mut cfg.rounds, a.rounds);
            set(&mut cfg.radius_tol, a.radius_tol);
            set(&mut cfg.input_tol, a.input_tol);
            set(&mut cfg.e1, a.e1);
            set(&mut cfg.e2, a.e2);
            cmd_iterate(&cfg)
        }
        Command::Basin(a) => {
            if a.fidelity.is_some() {
                cfg.fidelity = a.fidelity;
            }
            set(&mut cfg.nr, a.nr);
            set(&mut cfg.ntheta, a.ntheta);
            set(&mut cfg.rounds, a.rounds);
            set(&mut cfg.radius_tol, a.radius_tol);
            if a.r_max.is_some() {
                cfg.r_max = a.r_max;
            }
            cmd_basin(&cfg)
        }
        Command::Threshold(a) => {
            set(&mut cfg.mode, a.mode);
            set(&mut cfg.theta, a.theta);
            set(&mut cfg.e1, a.e1);
            set(&mut cfg.e2, a.e2);
            set(&mut cfg.rounds, a.rounds);
            cmd_threshold(&cfg)
        }
        Command::Curve(a) => {
            set(&mut cfg.curve_e1, a.e1.clone());
            set(&mut cfg.curve_e2, a.e2.clone());
            if let Some(g) = &a.grid {
                (cfg.curve_f_min, cfg.curve_f_max, cfg.curve_f_step) = grid_flag(g)?;
            }
            cmd_curve(&cfg)
        }
        Command::Cost(a) => {
            set(&mut cfg.cost_e, a.e);
            set(&mut cfg.target, a.target);
            set(&mut cfg.ft_overhead, a.ft_overhead);
            cfg.include_one_qubit |= a.include_one_qubit;
            if let Some(g) = &a.grid {
                (cfg.cost_f_min, cfg.cost_f_max, cfg.cost_f_step) = grid_flag(g)?;
            }
            cmd_cost(&cfg)
        }
        Command::Gain(a) => {
            if a.fidelity.is_some() {
                cfg.fidelity = a.fidelity;
            }
            set(&mut cfg.nr, a.nr);
            set(&mut cfg.ntheta, a.ntheta);
            if a.r_max.is_some() {
                cfg.r_max = a.r_max;
            }
            cmd_gain(&cfg)
        }
    }
}

fn grid_flag(g: &[f64]) -> Result<(f64, f64, f64), CliError> {
    match g {
        &[min, max, step] => Ok((min, max, step)),
        _ => Err(invalid("--grid takes MIN,MAX,STEP")),
    }
}

fn input_state(cfg: &RunConfig) -> Result<BlochVector, CliError> {
    let v = match (cfg.x, cfg.y, cfg.z) {
        (Some(x), Some(y), Some(z)) => [x, y, z],
        (None, None, None) => {
            let f = require_fidelity(cfg)?;
            from_plane_unchecked(PlaneCoords::from_fidelity(f, cfg.r, cfg.theta)).to_array()
        }
        _ => return Err(invalid("give all of --x, --y, --z or none of them")),
    };
    if !(cfg.input_tol >= 0.0) {
        return Err(invalid(format!(
            "input_tol must be ≥ 0, got {}",
            cfg.input_tol
        )));
    }
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !norm.is_finite() || norm > 1.0 + cfg.input_tol {
        return Err(Error::OutsideBall {
            x: v[0],
            y: v[1],
            z: v[2],
            norm,
        }
        .into());
    }
    let s = if norm > 1.0 { 1.0 / norm } else { 1.0 };
    Ok(BlochVector::new(v[0] * s, v[1] * s, v[2] * s)?)
}

fn require_fidelity(cfg: &RunConfig) -> Result<f64, CliError> {
    match cfg.fidelity {
        Some(f) if (0.0..=1.0).contains(&f) => Ok(f),
        Some(f) => Err(invalid(format!("fidelity must lie in [0, 1], got {f}"))),
        None => Err(invalid("a fidelity is required")),
    }
}

fn noise_from(e1: f64, e2: f64) -> Result<NoiseParams, CliError> {
    Ok(NoiseParams::from_gate_errors(e1, e2)?)
}

fn b2_line() -> (&'static str, String) {
    ("b2", two_qubit_gate_count().to_string())
}

const TRACE_COLUMNS: [&str; 6] = ["round", "x", "y", "z", "fidelity", "class"];

/// Trace of the ideal map, or of the noisy on-axis round map when any gate
/// error is set. Every row carries the final class of the orbit.
pub fn cmd_iterate(cfg: &RunConfig) -> Result<(), CliError> {
    let v = input_state(cfg)?;
    let noise = noise_from(cfg.e1, cfg.e2)?;
    if cfg.rounds == 0 {
        return Err(invalid("rounds must be at least 1"));
    }
    let (states, class) = if noise.is_noiseless() {
        let trace = iterate_and_classify(v, cfg.rounds, cfg.radius_tol)?;
        (trace.states, trace.classification)
    } else {
        noisy_trace(v, noise, cfg.rounds, cfg.radius_tol)?
    };
    let mut out = CsvOut::open(cfg.out.as_deref())?;
    let extra = if noise.is_noiseless() {
        vec![]
    } else {
        vec![b2_line()]
    };
    out.header("iterate", cfg, &extra)?;
    out.row(&TRACE_COLUMNS)?;
    let name = class.to_string();
    for (k, s) in states.iter().enumerate() {
        out.row(&[
            k.to_string(),
            real(s.x),
            real(s.y),
            real(s.z),
            real(fidelity_to_magic(*s)),
            name.clone(),
        ])?;
    }
    Ok(out.finish()?)
}

/// On-axis states visited by the noisy round map, stopping once the error
/// moves by less than `tol` in one round.
fn noisy_trace(
    v: BlochVector,
    noise: NoiseParams,
    rounds: usize,
    tol: f64,
) -> Result<(Vec<BlochVector>, AttractorClass), CliError> {
    let threshold = match noisy_fixed_points(noise) {
        Ok(fp) => Some(fp.threshold_eps),
        Err(Error::NoDistillation) => None,
        Err(e) => return Err(e.into()),
    };
    let mut eps = 1.0 - fidelity_to_magic(v);
    let class = match threshold {
        Some(t) if eps < t => AttractorClass::MagicT0,
        _ => AttractorClass::MaximallyMixed,
    };
    let mut states = vec![BlochVector::on_axis(1.0 - eps)?];
    for _ in 0..rounds {
        let next = RoundModel::Analytic.round(eps, noise)?.eps_out;
        states.push(BlochVector::on_axis(1.0 - next)?);
        let done = (next - eps).abs() < tol;
        eps = next;
        if done {
            break;
        }
    }
    Ok((states, class))
}

fn grid_radius(cfg: &RunConfig, a: f64) -> Result<f64, CliError> {
    match cfg.r_max {
        Some(r) if r >= 0.0 && r.is_finite() => Ok(r),
        Some(r) => Err(invalid(format!("r_max must be finite and ≥ 0, got {r}"))),
        None => Ok(max_plane_radius(a)),
    }
}

pub fn cmd_basin(cfg: &RunConfig) -> Result<(), CliError> {
    let f = require_fidelity(cfg)?;
    let r_max = grid_radius(cfg, a_from_fidelity(f))?;
    let cells = basin_grid_with_tol(f, r_max, cfg.nr, cfg.ntheta, cfg.rounds, cfg.radius_tol)?;
    let mut out = CsvOut::open(cfg.out.as_deref())?;
    out.header("basin", cfg, &[("r_max", real(r_max))])?;
    out.row(&["r", "theta", "x", "y", "z", "class", "rounds_used"])?;
    for c in &cells {
        let (class, rounds) = match c.class {
            Some(class) => (class.to_string(), c.rounds_used.to_string()),
            None => ("OutsideBall".to_string(), String::new()),
        };
        out.row(&[
            real(c.r),
            real(c.theta),
            real(c.point.x),
            real(c.point.y),
            real(c.point.z),
            class,
            rounds,
        ])?;
    }
    Ok(out.finish()?)
}

pub fn cmd_threshold(cfg: &RunConfig) -> Result<(), CliError> {
    let mut rows: Vec<(&str, String)> = Vec::new();
    let mut extra = Vec::new();
    match cfg.mode {
        ThresholdMode::OnAxis => {
            rows.push(("threshold_f", real(on_axis_threshold()?)));
        }
        ThresholdMode::OffAxis => {
            let theta = wrap_angle(cfg.theta);
            let t = off_axis_threshold_with(theta, OFF_AXIS_R_SAMPLES, cfg.rounds, cfg.radius_tol)?;
            rows.push(("theta", real(theta)));
            rows.push(("threshold_f", real(t)));
        }
        ThresholdMode::Noisy => {
            let noise = noise_from(cfg.e1, cfg.e2)?;
            let fp = noisy_fixed_points(noise)?;
            extra.push(b2_line());
            rows.push(("p1", real(noise.p1)));
            rows.push(("p2", real(noise.p2)));
            rows.push(("threshold_f", real(fp.threshold_f)));
            rows.push(("threshold_eps", real(fp.threshold_eps)));
            rows.push(("f_ceiling", real(fp.f_ceiling)));
            rows.push(("epsilon_star", real(fp.epsilon_star)));
            rows.push((
                "epsilon_star_first_order",
                real(noise.p1 / 2.0 + 13.0 * noise.p2 / 9.0),
            ));
        }
    }
    let mut out = CsvOut::open(cfg.out.as_deref())?;
    out.header("threshold", cfg, &extra)?;
    out.row(&["quantity", "value"])?;
    for (k, v) in rows {
        out.row(&[k.to_string(), v])?;
    }
    Ok(out.finish()?)
}

fn checked_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    linear_grid(min, max, step).ok_or_else(|| {
        invalid(format!(
            "bad grid {min},{max},{step}: need MIN ≤ MAX and STEP > 0"
        ))
    })
}

/// Long-format curves: the noiseless setting first, then each configured pair.
pub fn cmd_curve(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.curve_e1.len() != cfg.curve_e2.len() {
        return Err(invalid(format!(
            "{} E1 values but {} E2 values",
            cfg.curve_e1.len(),
            cfg.curve_e2.len()
        )));
    }
    let grid = checked_grid(cfg.curve_f_min, cfg.curve_f_max, cfg.curve_f_step)?;
    let settings: Vec<(f64, f64)> = std::iter::once((0.0, 0.0))
        .chain(
            cfg.curve_e1
                .iter()
                .copied()
                .zip(cfg.curve_e2.iter().copied()),
        )
        .collect();
    let mut curves = Vec::with_capacity(settings.len());
    for &(e1, e2) in &settings {
        curves.push(fidelity_curve(noise_from(e1, e2)?, &grid)?);
    }
    let mut out = CsvOut::open(cfg.out.as_deref())?;
    out.header("curve", cfg, &[b2_line()])?;
    out.row(&["setting", "e1", "e2", "f_in", "f_out", "f_limit"])?;
    for (k, (&(e1, e2), curve)) in settings.iter().zip(&curves).enumerate() {
        for p in curve {
            out.row(&[
                k.to_string(),
                real(e1),
                real(e2),
                real(p.f_in),
                real(p.f_out),
                real(p.f_limit),
            ])?;
        }
    }
    Ok(out.finish()?)
}

pub fn cmd_cost(cfg: &RunConfig) -> Result<(), CliError> {
    let noise = noise_from(cfg.cost_e, cfg.cost_e)?;
    let mut model = CostModel::new(cfg.target, noise)?;
    model.ft_overhead = cfg.ft_overhead;
    model.include_one_qubit = cfg.include_one_qubit;
    model.validate()?;
    if !noise.is_noiseless() {
        let ceiling = noisy_fixed_points(noise)?.f_ceiling;
        if cfg.target > ceiling {
            return Err(CliError::Unreachable(format!(
                "target {} exceeds the faulty-gate ceiling {ceiling}",
                cfg.target
            )));
        }
    }
    let grid = checked_grid(cfg.cost_f_min, cfg.cost_f_max, cfg.cost_f_step)?;
    let points = comparison_curve(&model, &grid)?;
    let mut out = CsvOut::open(cfg.out.as_deref())?;
    out.header(
        "cost",
        cfg,
        &[
            b2_line(),
            ("b1", one_qubit_gate_count().to_string()),
            ("gates_per_round", model.gates_per_round().to_string()),
        ],
    )?;
    out.row(&[
        "f_in",
        "faulty_gates",
        "faulty_rounds",
        "ideal_gates",
        "ideal_rounds",
        "ideal_physical_gates",
        "ratio",
    ])?;
    let rounds = |c: Option<magicforge::cost::CostEstimate>| {
        c.map(|c| c.rounds.to_string()).unwrap_or_default()
    };
    for p in &points {
        out.row(&[
            real(p.f_in),
            opt_real(p.faulty.map(|c| c.gates)),
            rounds(p.faulty),
            opt_real(p.ideal.map(|c| c.gates)),
            rounds(p.ideal),
            opt_real(p.ideal.map(|c| c.gates * model.ft_overhead)),
            opt_real(p.ratio()),
        ])?;
    }
    Ok(out.finish()?)
}

/// F_out − F_in over the plane grid, closed form and by applying the map.
pub fn cmd_gain(cfg: &RunConfig) -> Result<(), CliError> {
    let f = require_fidelity(cfg)?;
    if cfg.nr == 0 || cfg.ntheta == 0 {
        return Err(invalid("nr and ntheta must be at least 1"));
    }
    let a = a_from_fidelity(f);
    let r_max = grid_radius(cfg, a)?;
    let radii = magicforge::ideal_map::radius_grid(r_max, cfg.nr);
    let angles = magicforge::ideal_map::theta_grid(cfg.ntheta);
    let mut out = CsvOut::open(cfg.out.as_deref())?;
    out.header("gain", cfg, &[("r_max", real(r_max))])?;
    out.row(&["r", "theta", "x", "y", "z", "in_ball", "d", "d_map"])?;
    for &r in &radii {
        for &theta in &angles {
            let p = PlaneCoords::new(a, r, theta);
            let v = from_plane_unchecked(p);
            let inside = v.norm() <= 1.0 + BALL_TOL;
            let d_map = inside.then(|| fidelity_to_magic(distill_map(v.clamp_to_ball().0)) - f);
            out.row(&[
                real(r),
                real(theta),
                real(v.x),
                real(v.y),
                real(v.z),
                u8::from(inside).to_string(),
                real(fidelity_difference(p)),
                opt_real(d_map),
            ])?;
        }
    }
    Ok(out.finish()?)
}

/// Applies `MAGICFORGE_THREADS` to the global thread pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("MAGICFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        invalid(format!(
            "MAGICFORGE_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| invalid(e.to_string()))
}
