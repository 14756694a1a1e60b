#![allow(dead_code)]

use magicforge::densmat::{CMatrix, DensityMatrix};
use magicforge::BlochVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn seed_points() -> Vec<BlochVector> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/data/bloch_seed_points.csv"
    );
    let mut reader = csv::Reader::from_path(path).expect("seed file");
    reader
        .records()
        .map(|rec| {
            let rec = rec.expect("seed row");
            let c = |i: usize| rec[i].parse::<f64>().expect("seed value");
            BlochVector::new(c(0), c(1), c(2)).expect("seed point in ball")
        })
        .collect()
}

/// Uniform point in the unit ball.
pub fn ball_point(rng: &mut impl Rng) -> BlochVector {
    loop {
        let (x, y, z) = (
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if let Ok(v) = BlochVector::new(x, y, z) {
            return v;
        }
    }
}

/// GG†/tr(GG†) for a complex Gaussian-ish G.
pub fn random_state(rng: &mut impl Rng, n_qubits: usize) -> DensityMatrix {
    let d = 1 << n_qubits;
    let g = CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    DensityMatrix::from_matrix(&g * g.adjoint())
        .and_then(|m| m.normalized())
        .expect("random state")
}

pub fn random_pure(rng: &mut impl Rng, n_qubits: usize) -> DensityMatrix {
    let psi: Vec<Complex64> = (0..1 << n_qubits)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    DensityMatrix::from_pure(&psi)
        .and_then(|m| m.normalized())
        .expect("random pure state")
}
