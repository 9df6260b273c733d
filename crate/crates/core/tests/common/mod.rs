//! Helpers shared by the integration tests: tiny panels and independent
//! numerical oracles.
#![allow(dead_code)]

use gravity_shock::estimator::Matrix;
use gravity_shock::ingest::{build_panel, parse_countries, parse_pairs};
use gravity_shock::GravityPanel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn panel(countries: &str, pairs: &str, years: &[i32]) -> GravityPanel {
    build_panel(
        parse_countries(countries.as_bytes(), "countries.csv").unwrap(),
        parse_pairs(pairs.as_bytes(), "pairs.csv").unwrap(),
        years,
    )
    .unwrap()
}

/// Solves `(X'X) b = X'y` by Gauss-Jordan elimination with partial pivoting.
pub fn normal_equations(x: &Matrix, y: &[f64]) -> Vec<f64> {
    let k = x.cols();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = (0..x.rows()).map(|r| x.get(r, i) * x.get(r, j)).sum();
        }
        a[i][k] = (0..x.rows()).map(|r| x.get(r, i) * y[r]).sum();
    }
    for c in 0..k {
        let p = (c..k)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        a.swap(c, p);
        for r in 0..k {
            if r != c {
                let f = a[r][c] / a[c][c];
                for j in c..=k {
                    a[r][j] -= f * a[c][j];
                }
            }
        }
    }
    (0..k).map(|i| a[i][k] / a[i][i]).collect()
}

/// Intercept plus `k - 1` standard normal regressors.
pub fn random_design(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Matrix {
    let z = Normal::new(0.0, 1.0).unwrap();
    let mut cols = vec![vec![1.0; n]];
    for _ in 1..k {
        cols.push((0..n).map(|_| z.sample(rng)).collect());
    }
    let names = (0..k).map(|j| format!("x{j}")).collect();
    Matrix::from_columns(cols, names).unwrap()
}

pub fn random_beta(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.random_range(-3.0..3.0)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}
