//! Shared helpers for unit, property, and acceptance tests.

#![doc(hidden)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::spd::SpdMatrix;

pub fn seeded_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Largest absolute entrywise difference.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Random symmetric matrix with standard normal entries on and above the
/// diagonal.
pub fn random_symmetric<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let v: f64 = StandardNormal.sample(rng);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// Well-conditioned random SPD matrix: `exp(scale/√d · S)` for a Gaussian
/// symmetric `S`, keeping eigenvalue magnitudes around `e^{±2·scale}` so
/// whitened eigensolves stay accurate to tight tolerances.
pub fn random_spd_exp<R: Rng + ?Sized>(d: usize, scale: f64, rng: &mut R) -> SpdMatrix {
    let s = random_symmetric(d, rng) * (scale / (d as f64).sqrt());
    SpdMatrix::new(crate::spd::matrix_exp_sym(&s).expect("symmetric exponential"))
        .expect("exponential of symmetric matrix is SPD")
}

/// Random invertible matrix with condition number around `e^2`: orthogonal
/// factors from QR of a Gaussian matrix around a log-uniform diagonal.
pub fn random_well_conditioned<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        let v: f64 = StandardNormal.sample(rng);
        v
    });
    let q = g.qr().q();
    let g2 = DMatrix::from_fn(d, d, |_, _| {
        let v: f64 = StandardNormal.sample(rng);
        v
    });
    let q2 = g2.qr().q();
    let diag = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            (rng.random_range(-1.0..1.0f64)).exp()
        } else {
            0.0
        }
    });
    q * diag * q2
}

/// The worked 3-matrix d = 2 example dataset.
pub fn paper_dataset() -> Vec<SpdMatrix> {
    vec![
        SpdMatrix::new(DMatrix::from_row_slice(2, 2, &[0.95, -0.6, -0.6, 1.1])).unwrap(),
        SpdMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 2.1])).unwrap(),
        SpdMatrix::new(DMatrix::from_row_slice(2, 2, &[2.5, -0.2, -0.2, 1.2])).unwrap(),
    ]
}
