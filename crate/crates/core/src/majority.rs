//! Majority and weighted-majority functions, correlation with majority, and
//! the stability deficit `P[M triangle N_eps M]`.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::estimate::Estimate;
use crate::function::{BooleanFunction, FunctionKind};
use crate::influence::influence_profile;
use crate::noise::var_noise;
use crate::rng::stream_rng;
use crate::spectrum::Spectrum;
use crate::{Error, Result, MAX_N};

/// `M_K(x) = sign sum_{j in K} (2 x_j - 1)`: -1 / 0 / +1, with 0 on exact
/// ties (and for empty `K`).
pub fn majority_sign(x: u64, k_mask: u64) -> i8 {
    let inside = (x & k_mask).count_ones() as i64;
    let size = k_mask.count_ones() as i64;
    match (2 * inside - size).signum() {
        1 => 1,
        -1 => -1,
        _ => 0,
    }
}

/// A generalized weighted majority: the event
/// `{x : sum_j (2 x_j - 1) w_j > s}` with strict inequality. Weights are
/// nonnegative and not all zero, so the event is monotone.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMajority {
    weights: Vec<f64>,
    threshold: f64,
}

impl WeightedMajority {
    pub fn new(weights: Vec<f64>, threshold: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::contract("weight vector must be nonempty"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::contract("weights must be finite and nonnegative"));
        }
        if weights.iter().all(|w| *w == 0.0) {
            return Err(Error::contract("weights must not all be zero"));
        }
        if !threshold.is_finite() {
            return Err(Error::contract("threshold must be finite"));
        }
        Ok(WeightedMajority { weights, threshold })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        WeightedMajority::new(vec![1.0; n], 0.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// `sum_j (2 x_j - 1) w_j` for a packed point (n <= 64).
    pub fn margin(&self, x: u64) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(j, w)| if x >> j & 1 == 1 { *w } else { -*w })
            .sum()
    }
}

/// Materializes the indicator table of the weighted majority event.
pub fn weighted_event(wm: &WeightedMajority) -> Result<BooleanFunction> {
    let n = wm.n();
    crate::check_table_n(n, MAX_N)?;
    let mut table = vec![0.0f64; 1 << n];
    // Gray-code walk keeps the margin update O(1) per point.
    let total: f64 = wm.weights.iter().sum();
    let mut margin = -total;
    let mut x = 0u64;
    table[0] = if margin > wm.threshold { 1.0 } else { 0.0 };
    for i in 1..1u64 << n {
        let j = i.trailing_zeros() as usize;
        x ^= 1 << j;
        margin += if x >> j & 1 == 1 {
            2.0 * wm.weights[j]
        } else {
            -2.0 * wm.weights[j]
        };
        table[x as usize] = if margin > wm.threshold { 1.0 } else { 0.0 };
    }
    BooleanFunction::new(n, FunctionKind::Indicator, table)
}

/// Correlation of `f` with the unweighted majority on the subset `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    /// `E(f M_K)`.
    pub value: f64,
    /// The subset mask the majority ran on.
    pub subset: u64,
    /// `sqrt(|K|) v (1 + sqrt(-ln v))` with C = 1, the shape of the
    /// majority-correlation influence bound. Populated only for monotone
    /// indicators with positive correlation; diagnostic, never asserted.
    pub bound_rhs: Option<f64>,
}

pub fn correlation_with_majority(f: &BooleanFunction, k_mask: u64) -> Result<CorrelationReport> {
    let n = f.n();
    if n < 64 && k_mask >> n != 0 {
        return Err(Error::contract("subset mask mentions variables beyond n"));
    }
    let mut sum = 0.0;
    for (x, v) in f.table().iter().enumerate() {
        sum += v * majority_sign(x as u64, k_mask) as f64;
    }
    let value = sum / f.len() as f64;
    let bound_rhs = if f.is_indicator() && value > 0.0 && f.is_monotone() {
        let k = k_mask.count_ones() as f64;
        Some(k.sqrt() * value * (1.0 + (-value.ln()).max(0.0).sqrt()))
    } else {
        None
    };
    Ok(CorrelationReport {
        value,
        subset: k_mask,
        bound_rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaMode {
    /// Maximize `|E(f M_K)|` over all `2^n` subsets. `O(4^n)`, n <= 12.
    Exact,
    /// A certified lower bound for the weighted maximum, from a fixed
    /// candidate set: uniform weights, uniform on the top-k variables by
    /// influence for every k, and the normalized influence vector itself.
    Heuristic,
}

const LAMBDA_EXACT_CAP: usize = 12;

pub fn lambda(f: &BooleanFunction, mode: LambdaMode) -> Result<f64> {
    let n = f.n();
    match mode {
        LambdaMode::Exact => {
            if n > LAMBDA_EXACT_CAP {
                return Err(Error::Resource {
                    what: format!(
                        "exact majority correlation scan on {n} variables; use LambdaMode::Heuristic"
                    ),
                    cap: LAMBDA_EXACT_CAP,
                });
            }
            let mut best = 0.0f64;
            for k_mask in 0..1u64 << n {
                let mut sum = 0.0;
                for (x, v) in f.table().iter().enumerate() {
                    sum += v * majority_sign(x as u64, k_mask) as f64;
                }
                best = best.max((sum / f.len() as f64).abs());
            }
            Ok(best)
        }
        LambdaMode::Heuristic => {
            let profile = influence_profile(f)?;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|a, b| {
                profile.per_var[*b]
                    .partial_cmp(&profile.per_var[*a])
                    .unwrap()
            });

            let mut best = correlation_with_majority(f, (1u64 << n) - 1)?.value.abs();
            let mut k_mask = 0u64;
            for j in &order {
                k_mask |= 1 << j;
                best = best.max(correlation_with_majority(f, k_mask)?.value.abs());
            }

            let max_inf = profile.per_var.iter().cloned().fold(0.0f64, f64::max);
            if max_inf > 0.0 {
                let weights: Vec<f64> = profile.per_var.iter().map(|i| i / max_inf).collect();
                if let Ok(wm) = WeightedMajority::new(weights, 0.0) {
                    best = best.max(weighted_correlation(f, &wm).abs());
                }
            }
            Ok(best)
        }
    }
}

/// `E[f(x) sign(margin_w(x))]` by gray-code table walk.
fn weighted_correlation(f: &BooleanFunction, wm: &WeightedMajority) -> f64 {
    let total: f64 = wm.weights.iter().sum();
    let mut margin = -total;
    let mut x = 0u64;
    let mut sum = f.value(0) * sign_i8(margin) as f64;
    for i in 1..f.len() as u64 {
        let j = i.trailing_zeros() as usize;
        x ^= 1 << j;
        margin += if x >> j & 1 == 1 {
            2.0 * wm.weights[j]
        } else {
            -2.0 * wm.weights[j]
        };
        sum += f.value(x) * sign_i8(margin) as f64;
    }
    sum / f.len() as f64
}

const STABILITY_EXACT_CAP: usize = 12;

/// `P[x in M, N_eps(x) notin M] + P[x notin M, N_eps(x) in M]`, the
/// symmetric-difference mass under correlated noise.
///
/// For `n <= 12` the value is exact (`samples` is ignored and the estimate
/// carries zero standard error): the joint enumeration collapses to
/// `2 (P[M] - E[chi_M Q_eps chi_M])` through the noise operator. Beyond that
/// it is a Monte Carlo estimate with one ChaCha stream per sample.
pub fn stability_deficit(
    wm: &WeightedMajority,
    eps: f64,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::contract(format!("eps {eps} outside [0, 1]")));
    }
    let n = wm.n();
    if n <= STABILITY_EXACT_CAP {
        let f = weighted_event(wm)?;
        let sp = Spectrum::transform(&f)?;
        let rho = 1.0 - 2.0 * eps;
        let pair: f64 = sp
            .coeffs()
            .iter()
            .enumerate()
            .map(|(mask, c)| c * c * rho.powi(mask.count_ones() as i32))
            .sum();
        let value = (2.0 * (sp.mean() - pair)).max(0.0);
        return Ok(Estimate {
            value,
            std_error: 0.0,
            samples: 0,
            seed,
        });
    }
    if samples == 0 {
        return Err(Error::contract("sample count must be at least 1"));
    }

    let changed: u64 = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            u64::from(one_deficit_sample(wm, eps, &mut rng))
        })
        .sum();
    Ok(Estimate::bernoulli(changed, samples, seed))
}

fn one_deficit_sample(wm: &WeightedMajority, eps: f64, rng: &mut impl Rng) -> bool {
    let n = wm.n();
    let words = n.div_ceil(64);
    let mut margin = 0.0f64;
    let mut bits = vec![0u64; words];
    for (wi, word) in bits.iter_mut().enumerate() {
        let mut b: u64 = rng.random();
        if wi == words - 1 && !n.is_multiple_of(64) {
            b &= (1u64 << (n % 64)) - 1;
        }
        *word = b;
        let base = wi * 64;
        let top = (n - base).min(64);
        for j in 0..top {
            let w = wm.weights[base + j];
            margin += if b >> j & 1 == 1 { w } else { -w };
        }
    }

    let flip_count = Binomial::new(n as u64, eps).expect("valid p").sample(rng) as usize;
    let mut delta = 0.0f64;
    if flip_count > 0 {
        let mut chosen = vec![false; n];
        let mut drawn = 0usize;
        while drawn < flip_count {
            let j = rng.random_range(0..n);
            if !chosen[j] {
                chosen[j] = true;
                drawn += 1;
                let signed = if bits[j / 64] >> (j % 64) & 1 == 1 {
                    wm.weights[j]
                } else {
                    -wm.weights[j]
                };
                delta -= 2.0 * signed;
            }
        }
    }

    (margin > wm.threshold) != (margin + delta > wm.threshold)
}

/// `(sum_j w_j I_j(M_w), E|sum_j w_j (2 x_j - 1)|)` for the sign function
/// `M_w` with zero threshold. The first component is computed from the
/// verbatim L1 influences, the second by direct enumeration; the contract is
/// that the first equals exactly twice the second.
pub fn influence_inner_product(weights: &[f64]) -> Result<(f64, f64)> {
    let n = weights.len();
    crate::check_table_n(n, MAX_N)?;
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::contract("weights must be finite and nonnegative"));
    }
    if weights.iter().map(|w| w * w).sum::<f64>() <= 0.0 {
        return Err(Error::contract("weights must not all be zero"));
    }

    // Sign table of M_w plus E|f| in one gray-code pass.
    let size = 1usize << n;
    let mut signs = vec![0i8; size];
    let total: f64 = weights.iter().sum();
    let mut margin = -total;
    let mut x = 0u64;
    let mut abs_sum = margin.abs();
    signs[0] = sign_i8(margin);
    for i in 1..size as u64 {
        let j = i.trailing_zeros() as usize;
        x ^= 1 << j;
        margin += if x >> j & 1 == 1 {
            2.0 * weights[j]
        } else {
            -2.0 * weights[j]
        };
        signs[x as usize] = sign_i8(margin);
        abs_sum += margin.abs();
    }
    let abs_mean = abs_sum / size as f64;

    let mut ip = 0.0;
    for (j, w) in weights.iter().enumerate() {
        let bit = 1usize << j;
        let mut change = 0.0f64;
        for y in 0..size {
            if y & bit == 0 {
                change += (signs[y] as f64 - signs[y | bit] as f64).abs();
            }
        }
        ip += w * change / (size as f64 / 2.0);
    }
    Ok((ip, abs_mean))
}

fn sign_i8(m: f64) -> i8 {
    if m > 0.0 {
        1
    } else if m < 0.0 {
        -1
    } else {
        0
    }
}

/// Exact fourth moment of `f(x) = sum_j w_j (2 x_j - 1)` next to the
/// closed-form right-hand side `3 ||w||_2^4 - 2 ||w||_4^4`.
pub fn moment_check(weights: &[f64]) -> Result<(f64, f64)> {
    let n = weights.len();
    crate::check_table_n(n, MAX_N)?;
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::contract("weights must be finite"));
    }
    if weights.iter().map(|w| w * w).sum::<f64>() <= 0.0 {
        return Err(Error::contract("weights must not all be zero"));
    }
    let total: f64 = weights.iter().sum();
    let mut margin = -total;
    let mut x = 0u64;
    let mut sum4 = margin.powi(4);
    for i in 1..1u64 << n {
        let j = i.trailing_zeros() as usize;
        x ^= 1 << j;
        margin += if x >> j & 1 == 1 {
            2.0 * weights[j]
        } else {
            -2.0 * weights[j]
        };
        sum4 += margin.powi(4);
    }
    let fourth_moment = sum4 / (1u64 << n) as f64;
    let l2sq: f64 = weights.iter().map(|w| w * w).sum();
    let l4_4: f64 = weights.iter().map(|w| w.powi(4)).sum();
    Ok((fourth_moment, 3.0 * l2sq * l2sq - 2.0 * l4_4))
}

/// Sampled fourth moment for weight vectors too long to enumerate.
pub fn moment_check_sampled(weights: &[f64], samples: u64, seed: u64) -> Result<(Estimate, f64)> {
    if samples == 0 {
        return Err(Error::contract("sample count must be at least 1"));
    }
    if weights.iter().map(|w| w * w).sum::<f64>() <= 0.0 {
        return Err(Error::contract("weights must not all be zero"));
    }
    let n = weights.len();
    let (sum, sum_sq) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let mut margin = 0.0f64;
            let mut j = 0;
            while j < n {
                let word: u64 = rng.random();
                let top = (n - j).min(64);
                for b in 0..top {
                    margin += if word >> b & 1 == 1 {
                        weights[j + b]
                    } else {
                        -weights[j + b]
                    };
                }
                j += 64;
            }
            let v = margin.powi(4);
            (v, v * v)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let l2sq: f64 = weights.iter().map(|w| w * w).sum();
    let l4_4: f64 = weights.iter().map(|w| w.powi(4)).sum();
    Ok((
        Estimate::from_sums(sum, sum_sq, samples, seed),
        3.0 * l2sq * l2sq - 2.0 * l4_4,
    ))
}

/// Exact `VAR(M_w, eps)` for a materializable weighted majority; used by the
/// shifting-lemma checks.
pub fn weighted_event_var_noise(wm: &WeightedMajority, eps: f64) -> Result<f64> {
    let sp = Spectrum::transform(&weighted_event(wm)?)?;
    var_noise(&sp, eps)
}
