//! Random-walk invariants: the spectral evolution against a dense
//! transition-matrix oracle, total-variation monotonicity, and the L2
//! mixing-time chain.

mod common;

use common::*;
use cubesense_core::influence::influence_profile;
use cubesense_core::spectrum::Spectrum;
use cubesense_core::walk::*;

/// Dense one-step transition matrix of the lazy walk applied to a density
/// vector: stay with probability 1/2, move across each coordinate with
/// probability 1/(2n).
fn matrix_step(density: &[f64], n: usize) -> Vec<f64> {
    let mut next = vec![0.0; density.len()];
    for (x, slot) in next.iter_mut().enumerate() {
        let mut acc = 0.5 * density[x];
        for j in 0..n {
            acc += density[x ^ (1 << j)] / (2 * n) as f64;
        }
        *slot = acc;
    }
    next
}

#[test]
fn spectral_evolution_matches_transition_matrix() {
    for n in 1..=8usize {
        let f = random_indicator(n, 0xAA, n as u64);
        if f.mean() == 0.0 {
            continue;
        }
        let start = walk_start(&f).unwrap();
        let mut oracle = start.density().to_vec();
        for t in 1..=50u64 {
            oracle = matrix_step(&oracle, n);
            let spectral = walk_evolve(&start, t);
            assert!(
                max_abs_diff(spectral.density(), &oracle) <= 1e-10,
                "n={n} t={t}"
            );
        }
    }
}

#[test]
fn spectral_evolution_matches_direct_averaging() {
    for n in [3usize, 6, 10] {
        let f = random_indicator(n, 0xAB, n as u64);
        if f.mean() == 0.0 {
            continue;
        }
        let start = walk_start(&f).unwrap();
        for t in [1u64, 7, 25, 50] {
            let direct = walk_evolve_direct(&start, t);
            let spectral = walk_evolve(&start, t);
            assert!(
                max_abs_diff(spectral.density(), direct.density()) <= 1e-10,
                "n={n} t={t}"
            );
        }
    }
}

#[test]
fn tv_distance_never_increases() {
    for n in 2..=10usize {
        let f = random_indicator(n, 0xAC, n as u64);
        if f.mean() == 0.0 {
            continue;
        }
        let start = walk_start(&f).unwrap();
        let mut previous = tv_distance(&start);
        for t in 1..=40u64 {
            let tv = tv_distance(&walk_evolve(&start, t));
            assert!(tv <= previous + 1e-12, "tv rose at n={n} t={t}");
            previous = tv;
        }
    }
}

#[test]
fn mixing_time_matches_matrix_oracle() {
    for n in 2..=8usize {
        let f = random_indicator(n, 0xAD, n as u64);
        if f.mean() == 0.0 {
            continue;
        }
        // eps values chosen off the rational TV plateaus so float rounding
        // cannot flip the strict comparison at an exact tie.
        for eps in [0.93, 0.47, 0.11] {
            let got = mixing_time(&f, eps).unwrap().steps;
            // Oracle: evolve the dense matrix until the total-mass distance
            // drops strictly below eps.
            let start = walk_start(&f).unwrap();
            let mut density = start.density().to_vec();
            let mut t = 0u64;
            while density.iter().map(|d| (d - 1.0).abs()).sum::<f64>() / density.len() as f64
                >= eps
            {
                density = matrix_step(&density, n);
                t += 1;
                assert!(t < 100_000);
            }
            assert_eq!(got, t, "n={n} eps={eps}");
        }
    }
}

#[test]
fn l2_chain_bounds_tv_squared() {
    // Cauchy-Schwarz direction: tv(t)^2 <= P[A]^{-2} sum_{s != 0}
    // lambda_{|s|}^{2t} coeff(s)^2 (the squared L2 norm of the density
    // difference), checked pointwise in t.
    for n in 2..=9usize {
        let f = random_indicator(n, 0xAE, n as u64);
        let p = f.mean();
        if p == 0.0 {
            continue;
        }
        let start = walk_start(&f).unwrap();
        let weights = Spectrum::transform(&f).unwrap().level_weights();
        for t in [0u64, 1, 3, 7, 15, 40] {
            let tv = tv_distance(&walk_evolve(&start, t));
            let l2_sq: f64 = weights
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, w)| {
                    let lambda = 1.0 - k as f64 / n as f64;
                    lambda.powi(2 * t as i32) * w
                })
                .sum::<f64>()
                / (p * p);
            assert!(
                tv * tv <= l2_sq + 1e-12,
                "L2 chain violated at n={n} t={t}: tv^2 {} vs {l2_sq}",
                tv * tv
            );
        }
    }
}

#[test]
fn l2_bound_step_count_dominates_true_mixing_time() {
    for n in 3..=9usize {
        let f = random_indicator(n, 0xAF, n as u64);
        if f.mean() == 0.0 || f.variance() == 0.0 {
            continue;
        }
        for eps in [0.5, 0.1] {
            let r = mixing_time(&f, eps).unwrap();
            assert!(
                r.l2_bound_steps >= r.steps,
                "n={n} eps={eps}: bound {} below true {}",
                r.l2_bound_steps,
                r.steps
            );
        }
    }
}

#[test]
fn mixing_time_bounded_by_low_weight_budget() {
    // The quantitative side of the spectral chain: for every k,
    // tv(t)^2 <= P^{-2} (lambda_k^{2t} sum_j W_j + sum_{0<j<k} W_j), so with
    // k* = argmin over k of the implied step count,
    // W(A, eps) <= ceil(n/k* ln(2 var / (P^2 eps^2 ...)))-type budgets. Here
    // the concrete certified form is asserted: the reported l2_bound_steps
    // never exceeds the budget derived from any single truncation level.
    let eps = 0.1f64;
    for (label, f) in [
        (
            "tribes16",
            cubesense_core::families::make_family(&cubesense_core::FamilySpec::Tribes {
                tribe_count: 5,
                tribe_size: 3,
            })
            .unwrap(),
        ),
        (
            "majority9",
            cubesense_core::families::make_family(&cubesense_core::FamilySpec::Majority { n: 9 })
                .unwrap(),
        ),
    ] {
        let n = f.n();
        let p = f.mean();
        let profile = influence_profile(&f).unwrap();
        let r = mixing_time(&f, eps).unwrap();
        // Truncation at k = 1 is always valid: every nonempty level decays
        // at least as fast as lambda_1 = 1 - 1/n, so
        // t >= n ln(var / (P eps)^2) certifies the bound.
        let var: f64 = profile.level_weights.iter().skip(1).sum();
        let budget = ((n as f64) * (var / (p * eps).powi(2)).ln()).ceil() as u64 + 1;
        assert!(
            r.l2_bound_steps <= budget,
            "{label}: l2 bound {} above single-level budget {budget}",
            r.l2_bound_steps
        );
        assert!(r.steps <= r.l2_bound_steps);
    }
}

#[test]
fn beta_exponent_diagnostic_is_reported_not_asserted() {
    // The asymptotic bound W(A, eps) <= n^{1 - beta - o(1)} hides factors
    // like eps^{-2} ln(1/(P eps^2)) inside the o(1); at n <= 20 those
    // dominate and n^{1 - beta + 0.2} sits far below the true mixing time
    // (about 4 vs 25 at n = 16, eps = 0.1). The certified desk-scale form
    // is the per-level L2 bound, asserted here; the power-law ratio is
    // printed for the record, not asserted.
    let eps = 0.1f64;
    for n in [12usize, 16, 20] {
        let f = cubesense_core::families::make_tribes_sized(n).unwrap();
        let profile = influence_profile(&f).unwrap();
        let beta = profile.beta.unwrap();
        let r = mixing_time(&f, eps).unwrap();
        assert!(r.steps <= r.l2_bound_steps);
        let literal = (n as f64).powf(1.0 - beta + 0.2);
        println!(
            "beta diagnostic n={n}: W={} l2_bound={} n^(1-beta+0.2)={literal:.2} ratio={:.2}",
            r.steps,
            r.l2_bound_steps,
            r.steps as f64 / literal
        );
    }
}
