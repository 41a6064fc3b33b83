#![allow(dead_code)]

use proptest::prelude::*;
use qenergy::projector_from_basis;
use qenergy::spectral::{Projector, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> SymMatrix<f64> {
    SymMatrix::new(n, uniform_vec(rng, n * n, -1.0, 1.0)).unwrap()
}

/// `A Aᵀ` with `A` having `cols` uniform columns: PSD of rank ≤ `cols`.
pub fn random_psd(rng: &mut impl Rng, n: usize, cols: usize) -> SymMatrix<f64> {
    let a = uniform_vec(rng, n * cols, -1.0, 1.0);
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = (0..cols).map(|k| a[i * cols + k] * a[j * cols + k]).sum();
        }
    }
    SymMatrix::new(n, data).unwrap()
}

pub fn random_projector(rng: &mut impl Rng, n: usize) -> Projector<f64> {
    let k = rng.random_range(0..=n);
    let basis: Vec<Vec<f64>> = (0..k).map(|_| uniform_vec(rng, n, -1.0, 1.0)).collect();
    projector_from_basis(n, &basis).unwrap()
}

/// Projector whose range contains or avoids another one's with some probability,
/// so lattice tests see non-trivial meets.
pub fn related_projector(rng: &mut impl Rng, p: &Projector<f64>) -> Projector<f64> {
    let n = p.dim();
    let mut basis = p.range_basis().unwrap();
    basis.truncate(rng.random_range(0..=basis.len()));
    for _ in 0..rng.random_range(0..=n) {
        basis.push(uniform_vec(rng, n, -1.0, 1.0));
    }
    projector_from_basis(n, &basis).unwrap()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

/// `max |P² − P|`.
pub fn idempotence_error(p: &Projector<f64>) -> f64 {
    let sq = p.matrix().matmul(p.matrix()).unwrap();
    sq.iter()
        .zip(p.matrix().as_slice())
        .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()))
}

pub fn samples_strategy(max_n: usize, max_rows: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(prop::collection::vec(-10.0..10.0_f64, n), 1..=max_rows)
    })
}
