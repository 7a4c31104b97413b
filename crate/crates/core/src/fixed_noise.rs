//! Fixed-size noise: exactly `q` bits flip instead of a Bernoulli pattern.

use crate::spectrum::Spectrum;
use crate::{Error, Result};

fn check_range(n: usize, q: usize, k: usize) -> Result<()> {
    if q > n || k > n {
        return Err(Error::contract(format!(
            "c(n={n}, q={q}, k={k}) needs 0 <= q, k <= n"
        )));
    }
    Ok(())
}

/// Exact binomial coefficient as i128; safe for n <= 64.
fn binom_i128(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// The spectral multiplier of the fixed-size noise operator:
/// `c(n, q, k) = binom(n, q)^{-1} sum_j (-1)^j binom(k, j) binom(n-k, q-j)`.
///
/// For `n <= 64` the alternating sum is evaluated in exact integer
/// arithmetic (Vandermonde bounds every term and every partial sum by
/// `binom(n, q)`, which fits an i128 comfortably). Above that, log-domain
/// binomials with sign tracking and compensated summation are used; the
/// cancellation of the alternating sum is the documented hazard of that
/// path.
pub fn fixed_noise_coeff(n: usize, q: usize, k: usize) -> Result<f64> {
    check_range(n, q, k)?;
    if n <= 64 {
        let mut num: i128 = 0;
        for j in 0..=q.min(k) {
            if q - j > n - k {
                continue;
            }
            let term = binom_i128(k, j) * binom_i128(n - k, q - j);
            num += if j % 2 == 0 { term } else { -term };
        }
        Ok(num as f64 / binom_i128(n, q) as f64)
    } else {
        let ln_fact = ln_factorial_table(n);
        let ln_binom = |n: usize, k: usize| ln_fact[n] - ln_fact[k] - ln_fact[n - k];
        let ln_total = ln_binom(n, q);
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for j in 0..=q.min(k) {
            if q - j > n - k {
                continue;
            }
            let magnitude = (ln_binom(k, j) + ln_binom(n - k, q - j) - ln_total).exp();
            let term = if j % 2 == 0 { magnitude } else { -magnitude };
            // Kahan step.
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        Ok(sum)
    }
}

fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut t = vec![0.0f64; n + 1];
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for (i, slot) in t.iter_mut().enumerate().skip(1) {
        let y = (i as f64).ln() - comp;
        let s = acc + y;
        comp = (s - acc) - y;
        acc = s;
        *slot = acc;
    }
    t
}

/// The operator `T~_q`: each coefficient scaled by `c(n, q, |S|)`.
pub fn fixed_noise_operator(sp: &Spectrum, q: usize) -> Result<Spectrum> {
    let n = sp.n();
    check_range(n, q, 0)?;
    let per_level: Vec<f64> = (0..=n)
        .map(|k| fixed_noise_coeff(n, q, k))
        .collect::<Result<_>>()?;
    Ok(sp.scale_by_level(|k| per_level[k as usize]))
}

/// `VAR~(f, q) = sum_{S != empty} c(n, q, |S|)^2 coeff(S)^2`.
pub fn var_fixed(sp: &Spectrum, q: usize) -> Result<f64> {
    let n = sp.n();
    check_range(n, q, 0)?;
    let per_level: Vec<f64> = (0..=n)
        .map(|k| fixed_noise_coeff(n, q, k))
        .collect::<Result<_>>()?;
    let mut acc = 0.0;
    for (mask, c) in sp.coeffs().iter().enumerate().skip(1) {
        let f = per_level[mask.count_ones() as usize];
        acc += c * c * f * f;
    }
    Ok(acc)
}
