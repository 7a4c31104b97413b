//! Shared oracles and generators for the integration tests. Everything here
//! stays independent of the library's transform path.
#![allow(dead_code)]

use cubesense_core::function::{BooleanFunction, FunctionKind};
use cubesense_core::rng::stream_rng;
use rand::Rng;

/// Naive `O(4^n)` Fourier-Walsh transform straight from the definition:
/// `coeff(S) = 2^{-n} sum_x f(x) (-1)^{|S ∩ x|}`.
pub fn naive_transform(table: &[f64]) -> Vec<f64> {
    let size = table.len();
    let mut coeffs = vec![0.0f64; size];
    for (s, c) in coeffs.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (x, v) in table.iter().enumerate() {
            let parity = (s & x).count_ones() % 2;
            acc += if parity == 0 { *v } else { -*v };
        }
        *c = acc / size as f64;
    }
    coeffs
}

pub fn random_indicator(n: usize, seed: u64, stream: u64) -> BooleanFunction {
    let mut rng = stream_rng(seed, stream);
    let table = (0..1usize << n)
        .map(|_| f64::from(rng.random::<bool>()))
        .collect();
    BooleanFunction::new(n, FunctionKind::Indicator, table).unwrap()
}

pub fn random_real(n: usize, seed: u64, stream: u64) -> BooleanFunction {
    let mut rng = stream_rng(seed, stream);
    let table = (0..1usize << n)
        .map(|_| rng.random::<f64>() * 4.0 - 2.0)
        .collect();
    BooleanFunction::new(n, FunctionKind::Real, table).unwrap()
}

/// Uniformly random table with dyadic entries `k / 2^8`.
pub fn random_dyadic(n: usize, seed: u64, stream: u64) -> BooleanFunction {
    let mut rng = stream_rng(seed, stream);
    let table = (0..1usize << n)
        .map(|_| rng.random_range(-512i32..=512) as f64 / 256.0)
        .collect();
    BooleanFunction::new(n, FunctionKind::Real, table).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual}, expected {expected} (tol {tol})"
    );
}
