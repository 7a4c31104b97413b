//! Noise operators, exact noise variance, the sensitivity gauge and
//! hypercontractivity diagnostics.

use rand::Rng;

use crate::function::BooleanFunction;
use crate::spectrum::Spectrum;
use crate::{Error, Result, MAX_N};

/// How a configuration is perturbed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// Every bit flips independently with the given probability.
    Bernoulli(f64),
    /// Exactly `q` uniformly chosen bits flip.
    FixedSize(usize),
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::contract(format!("eps {eps} outside [0, 1]")));
    }
    Ok(())
}

/// Applies one draw of the noise model to a packed configuration of `n` bits.
/// Deterministic given the generator state.
pub fn sample_noise(x: u64, n: usize, model: NoiseModel, rng: &mut impl Rng) -> Result<u64> {
    if n == 0 || n > 64 {
        return Err(Error::contract(format!("bitmask configurations need 1 <= n <= 64, got {n}")));
    }
    match model {
        NoiseModel::Bernoulli(eps) => {
            check_eps(eps)?;
            let mut flips = 0u64;
            for j in 0..n {
                if rng.random::<f64>() < eps {
                    flips |= 1 << j;
                }
            }
            Ok(x ^ flips)
        }
        NoiseModel::FixedSize(q) => {
            if q > n {
                return Err(Error::contract(format!("flip count {q} exceeds n={n}")));
            }
            // Partial Fisher-Yates over the bit positions.
            let mut pos: Vec<u8> = (0..n as u8).collect();
            let mut flips = 0u64;
            for i in 0..q {
                let j = rng.random_range(i..n);
                pos.swap(i, j);
                flips |= 1 << pos[i];
            }
            Ok(x ^ flips)
        }
    }
}

/// The noise operator `Q_eps` on the spectral side: the coefficient at `S`
/// is multiplied by `(1 - 2 eps)^{|S|}`.
pub fn noise_operator(sp: &Spectrum, eps: f64) -> Result<Spectrum> {
    check_eps(eps)?;
    let rho = 1.0 - 2.0 * eps;
    Ok(sp.scale_by_level(|k| rho.powi(k as i32)))
}

/// The semigroup form `T_eta = Q_{(1 - eta)/2}`.
pub fn semigroup_operator(sp: &Spectrum, eta: f64) -> Result<Spectrum> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::contract(format!("eta {eta} outside [0, 1]")));
    }
    noise_operator(sp, (1.0 - eta) / 2.0)
}

/// `VAR(f, eps) = sum_{S != empty} coeff(S)^2 (1 - 2 eps)^{2|S|}`, the
/// variance of `x -> E[f(N_eps(x)) | x]`.
pub fn var_noise(sp: &Spectrum, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let rho_sq = (1.0 - 2.0 * eps) * (1.0 - 2.0 * eps);
    let mut acc = 0.0;
    for (mask, c) in sp.coeffs().iter().enumerate().skip(1) {
        acc += c * c * rho_sq.powi(mask.count_ones() as i32);
    }
    Ok(acc)
}

fn deviations(f: &BooleanFunction, eps: f64) -> Result<(Vec<f64>, f64)> {
    if !f.is_indicator() {
        return Err(Error::contract("gauge operations require an indicator"));
    }
    crate::check_table_n(f.n(), MAX_N - 1)?;
    check_eps(eps)?;
    let sp = Spectrum::transform(f)?;
    let mean = sp.mean();
    let smoothed = noise_operator(&sp, eps)?.inverse();
    let devs = smoothed.table().iter().map(|g| (g - mean).abs()).collect();
    Ok((devs, mean))
}

/// `gamma(A, eps, delta)`: the probability mass of points whose smoothed
/// prediction deviates from `P(A)` by strictly more than `delta`.
pub fn gamma(f: &BooleanFunction, eps: f64, delta: f64) -> Result<f64> {
    if delta <= 0.0 {
        return Err(Error::contract(format!("delta {delta} must be positive")));
    }
    let (devs, _) = deviations(f, eps)?;
    let count = devs.iter().filter(|d| **d > delta).count();
    Ok(count as f64 / devs.len() as f64)
}

/// Result of the exact sensitivity-gauge computation.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeResult {
    /// `phi = inf { delta > 0 : gamma(delta) < delta }`.
    pub phi: f64,
    /// `VAR(f, eps)` for the sandwich diagnostic.
    pub var_noise: f64,
    /// Sorted distinct `(deviation, probability mass)` pairs.
    pub deviation_distribution: Vec<(f64, f64)>,
}

/// Exact sensitivity gauge. `gamma` is nonincreasing and `delta` increasing,
/// so `gamma(delta) - delta` crosses zero once and the set
/// `{delta : gamma(delta) < delta}` is upward closed; the infimum is found by
/// one walk over the sorted deviation distribution.
pub fn gauge_phi(f: &BooleanFunction, eps: f64) -> Result<GaugeResult> {
    let (mut devs, _) = deviations(f, eps)?;
    let sp = Spectrum::transform(f)?;
    let var = var_noise(&sp, eps)?;

    devs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mass = 1.0 / devs.len() as f64;
    let mut distribution: Vec<(f64, f64)> = Vec::new();
    for d in devs {
        match distribution.last_mut() {
            Some((v, m)) if *v == d => *m += mass,
            _ => distribution.push((d, mass)),
        }
    }

    // Breakpoints 0 = b_0 < b_1 < ... with gamma constant on [b_k, b_{k+1}).
    let mut breakpoints: Vec<f64> = Vec::with_capacity(distribution.len() + 1);
    if distribution.first().map(|(v, _)| *v) != Some(0.0) {
        breakpoints.push(0.0);
    }
    breakpoints.extend(distribution.iter().map(|(v, _)| *v));

    let tail_above = |v: f64| -> f64 {
        distribution
            .iter()
            .filter(|(d, _)| *d > v)
            .map(|(_, m)| *m)
            .sum()
    };

    let mut phi = 0.0;
    for (k, &b) in breakpoints.iter().enumerate() {
        let g = tail_above(b);
        if g < b {
            phi = b;
            break;
        }
        let next = breakpoints.get(k + 1).copied().unwrap_or(f64::INFINITY);
        if g < next {
            phi = g;
            break;
        }
    }

    Ok(GaugeResult {
        phi,
        var_noise: var,
        deviation_distribution: distribution,
    })
}

/// Variances of the first-stage variables of the generalized two-stage
/// noise. Each entry must lie in `[0, 1/4]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceVector {
    zetas: Vec<f64>,
}

impl VarianceVector {
    pub fn new(zetas: Vec<f64>) -> Result<Self> {
        if let Some(z) = zetas.iter().find(|z| !(0.0..=0.25).contains(*z)) {
            return Err(Error::contract(format!(
                "first-stage variance {z} outside [0, 1/4]"
            )));
        }
        Ok(VarianceVector { zetas })
    }

    pub fn zetas(&self) -> &[f64] {
        &self.zetas
    }

    /// Ordinary Bernoulli noise: `q_j` is `1 - eps` or `eps` with equal
    /// probability, so `zeta_j = (1/2 - eps)^2`.
    pub fn bernoulli(n: usize, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        let z = (0.5 - eps) * (0.5 - eps);
        VarianceVector::new(vec![z; n])
    }

    /// One-sided noise where 1 bits are immune: `q_j = 1` with probability
    /// `1/2 - eps` and `q_j = eps / (1/2 + eps)` otherwise. Needs
    /// `eps <= 1/2`.
    pub fn asymmetric(n: usize, eps: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&eps) {
            return Err(Error::contract(format!("eps {eps} outside [0, 1/2]")));
        }
        let p_hi = 0.5 - eps;
        let lo = eps / (0.5 + eps);
        let second_moment = p_hi + (0.5 + eps) * lo * lo;
        VarianceVector::new(vec![second_moment - 0.25; n])
    }

    /// Three-point first stage: `q_j` is 1 or 0 with probability
    /// `(1 - eps)/2` each, and `1/2` with probability `eps`.
    pub fn three_point(n: usize, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        let second_moment = (1.0 - eps) / 2.0 + eps * 0.25;
        VarianceVector::new(vec![second_moment - 0.25; n])
    }
}

/// `Z(f, nu) = sum_S coeff(S)^2 prod_{j in S} 4 zeta_j`, the second moment of
/// the first-stage prediction.
pub fn z_general(sp: &Spectrum, zetas: &VarianceVector) -> Result<f64> {
    if zetas.zetas().len() != sp.n() {
        return Err(Error::contract(format!(
            "variance vector length {} does not match n={}",
            zetas.zetas().len(),
            sp.n()
        )));
    }
    // prod[mask] built by peeling the lowest set bit.
    let coeffs = sp.coeffs();
    let mut acc = coeffs[0] * coeffs[0];
    let mut prod = vec![1.0f64; coeffs.len()];
    for mask in 1..coeffs.len() {
        let low = mask.trailing_zeros() as usize;
        prod[mask] = prod[mask & (mask - 1)] * 4.0 * zetas.zetas()[low];
        acc += coeffs[mask] * coeffs[mask] * prod[mask];
    }
    Ok(acc)
}

/// Both sides of the Bonami-Beckner inequality
/// `||T_eta f||_2 <= ||f||_{1 + eta^2}`, returned as `(lhs, rhs)`.
pub fn bonami_margin(f: &BooleanFunction, eta: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::contract(format!("eta {eta} outside [0, 1]")));
    }
    let sp = Spectrum::transform(f)?;
    let lhs = semigroup_operator(&sp, eta)?.energy().sqrt();
    let p = 1.0 + eta * eta;
    let mean_pow = f.table().iter().map(|v| v.abs().powf(p)).sum::<f64>() / f.len() as f64;
    Ok((lhs, mean_pow.powf(1.0 / p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn dictator(n: usize) -> BooleanFunction {
        BooleanFunction::indicator_from_fn(n, |b| b & 1 == 1).unwrap()
    }

    #[test]
    fn noise_extremes() {
        let mut rng = stream_rng(1, 0);
        for _ in 0..50 {
            let x: u64 = rng.random_range(0..256);
            let same = sample_noise(x, 8, NoiseModel::Bernoulli(0.0), &mut rng).unwrap();
            assert_eq!(same, x);
            let flipped = sample_noise(x, 8, NoiseModel::Bernoulli(1.0), &mut rng).unwrap();
            assert_eq!(flipped, x ^ 0xff);
            let full = sample_noise(x, 8, NoiseModel::FixedSize(8), &mut rng).unwrap();
            assert_eq!(full, x ^ 0xff);
        }
    }

    #[test]
    fn fixed_size_popcount_is_exact() {
        let mut rng = stream_rng(2, 0);
        for _ in 0..200 {
            let y = sample_noise(0, 10, NoiseModel::FixedSize(4), &mut rng).unwrap();
            assert_eq!(y.count_ones(), 4);
        }
        assert!(sample_noise(0, 4, NoiseModel::FixedSize(5), &mut rng).is_err());
    }

    #[test]
    fn q_eps_edge_cases() {
        let f = BooleanFunction::indicator_from_fn(3, |b| b.count_ones() >= 2).unwrap();
        let sp = Spectrum::transform(&f).unwrap();
        assert_eq!(noise_operator(&sp, 0.0).unwrap(), sp);
        let killed = noise_operator(&sp, 0.5).unwrap();
        assert_eq!(killed.coeff(0), sp.mean());
        assert!(killed.coeffs()[1..].iter().all(|c| *c == 0.0));
        let scaled = noise_operator(&Spectrum::transform(&dictator(1)).unwrap(), 0.1).unwrap();
        assert!((scaled.coeff(1) - (-0.5 * 0.8)).abs() < 1e-15);
        assert!(noise_operator(&sp, 1.5).is_err());
    }

    #[test]
    fn var_noise_dictator_closed_form() {
        let sp = Spectrum::transform(&dictator(4)).unwrap();
        for eps in [0.0, 0.05, 0.2, 0.5, 0.9] {
            let expected = 0.25 * (1.0 - 2.0 * eps) * (1.0 - 2.0 * eps);
            assert!((var_noise(&sp, eps).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn var_noise_majority_three_at_zero_is_variance() {
        let f = BooleanFunction::indicator_from_fn(3, |b| b.count_ones() >= 2).unwrap();
        let sp = Spectrum::transform(&f).unwrap();
        assert!((var_noise(&sp, 0.0).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn gamma_dictator_step() {
        let f = dictator(5);
        for eps in [0.1, 0.3] {
            let edge = 0.5 - eps;
            assert_eq!(gamma(&f, eps, edge * 0.99).unwrap(), 1.0);
            assert_eq!(gamma(&f, eps, edge).unwrap(), 0.0);
            assert_eq!(gamma(&f, eps, 1.0).unwrap(), 0.0);
        }
        assert_eq!(gamma(&f, 0.5, 1e-9).unwrap(), 0.0);
        assert!(gamma(&f, 0.1, 0.0).is_err());
        let signed =
            BooleanFunction::new(1, crate::FunctionKind::Signed, vec![-1.0, 1.0]).unwrap();
        assert!(gamma(&signed, 0.1, 0.1).is_err());
    }

    #[test]
    fn phi_dictator_and_degenerate_cases() {
        for eps in [0.05, 0.2, 0.4] {
            let r = gauge_phi(&dictator(4), eps).unwrap();
            assert!((r.phi - (0.5 - eps)).abs() < 1e-12);
        }
        let constant = BooleanFunction::indicator_from_fn(3, |_| true).unwrap();
        assert_eq!(gauge_phi(&constant, 0.1).unwrap().phi, 0.0);
        let maj = BooleanFunction::indicator_from_fn(3, |b| b.count_ones() >= 2).unwrap();
        assert_eq!(gauge_phi(&maj, 0.5).unwrap().phi, 0.0);
    }

    #[test]
    fn z_general_extremes_and_bernoulli_preset() {
        let f = BooleanFunction::indicator_from_fn(4, |b| b % 5 == 0).unwrap();
        let sp = Spectrum::transform(&f).unwrap();
        let reveal_all = VarianceVector::new(vec![0.25; 4]).unwrap();
        assert!((z_general(&sp, &reveal_all).unwrap() - sp.energy()).abs() < 1e-14);
        let reveal_none = VarianceVector::new(vec![0.0; 4]).unwrap();
        assert!((z_general(&sp, &reveal_none).unwrap() - sp.mean() * sp.mean()).abs() < 1e-14);
        for eps in [0.0, 0.1, 0.35, 0.5] {
            let z = z_general(&sp, &VarianceVector::bernoulli(4, eps).unwrap()).unwrap();
            let v = var_noise(&sp, eps).unwrap();
            assert!((z - sp.mean() * sp.mean() - v).abs() < 1e-12);
        }
        assert!(VarianceVector::new(vec![0.3]).is_err());
    }

    #[test]
    fn preset_variances_match_their_distributions() {
        // Each preset's zeta is E[q^2] - 1/4 of the defining two- or
        // three-point law; check against a direct mass-point evaluation.
        let eps = 0.17;
        let z = VarianceVector::bernoulli(1, eps).unwrap().zetas()[0];
        let direct = 0.5 * (1.0 - eps - 0.5f64).powi(2) + 0.5 * (eps - 0.5f64).powi(2);
        assert!((z - direct).abs() < 1e-15);

        let z = VarianceVector::asymmetric(1, eps).unwrap().zetas()[0];
        let lo = eps / (0.5 + eps);
        let direct = (0.5 - eps) * (1.0f64 - 0.5).powi(2) + (0.5 + eps) * (lo - 0.5f64).powi(2);
        assert!((z - direct).abs() < 1e-15);
        // Mean stays 1/2 by construction.
        assert!(((0.5 - eps) + (0.5 + eps) * lo - 0.5).abs() < 1e-15);

        let z = VarianceVector::three_point(1, eps).unwrap().zetas()[0];
        let direct = (1.0 - eps) / 2.0 * (0.25 + 0.25) + eps * 0.0;
        assert!((z - direct).abs() < 1e-15);
    }

    #[test]
    fn bonami_equality_cases() {
        let f = BooleanFunction::indicator_from_fn(4, |b| b % 3 == 1).unwrap();
        let (lhs, rhs) = bonami_margin(&f, 1.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
        let (lhs, rhs) = bonami_margin(&f, 0.0).unwrap();
        assert!((lhs - f.mean().abs()).abs() < 1e-12);
        assert!(lhs <= rhs + 1e-12);
    }
}
