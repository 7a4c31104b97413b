//! Noise-operator properties: the gauge sandwich, sampling consistency,
//! fixed-size brute force, and hypercontractivity margins.

mod common;

use common::*;
use cubesense_core::fixed_noise::{fixed_noise_operator, var_fixed};
use cubesense_core::function::BooleanFunction;
use cubesense_core::noise::{
    bonami_margin, gamma, gauge_phi, noise_operator, sample_noise, var_noise, NoiseModel,
};
use cubesense_core::rng::stream_rng;
use cubesense_core::spectrum::Spectrum;

/// Bisection oracle for phi: gamma is nonincreasing, so the predicate
/// `gamma(delta) < delta` is upward closed and the infimum is found to any
/// resolution by plain interval halving.
fn phi_scan_oracle(f: &BooleanFunction, eps: f64, resolution: f64) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if gamma(f, eps, mid).unwrap() < mid {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[test]
fn phi_matches_grid_scan_oracle() {
    for n in 2..=8usize {
        for stream in 0..6u64 {
            let f = random_indicator(n, 0xF1, (n as u64) << 8 | stream);
            for eps in [0.05, 0.2, 0.35] {
                let exact = gauge_phi(&f, eps).unwrap().phi;
                let scanned = phi_scan_oracle(&f, eps, 1e-9);
                assert!(
                    (exact - scanned).abs() <= 1e-9 + 1e-12,
                    "phi mismatch n={n} eps={eps}: exact {exact} vs scan {scanned}"
                );
            }
        }
    }
}

#[test]
fn phi_dictator_closed_form_via_oracle() {
    let f = BooleanFunction::indicator_from_fn(6, |b| b & 1 == 1).unwrap();
    for eps in [0.01, 0.1, 0.25, 0.4] {
        let r = gauge_phi(&f, eps).unwrap();
        assert_close(r.phi, 0.5 - eps, 1e-12, "dictator phi");
        assert_close(
            phi_scan_oracle(&f, eps, 1e-9),
            0.5 - eps,
            1e-8,
            "dictator phi scan",
        );
    }
}

#[test]
fn sandwich_half_var_below_phi_below_var_cube_root() {
    for n in 2..=10usize {
        for stream in 0..12u64 {
            let f = random_indicator(n, 0x5A, (n as u64) << 8 | stream);
            let sp = Spectrum::transform(&f).unwrap();
            for eps in [0.05, 0.1, 0.2, 0.3] {
                let r = gauge_phi(&f, eps).unwrap();
                let v = var_noise(&sp, eps).unwrap();
                assert!(0.5 * v <= r.phi + 1e-12, "lower sandwich n={n} eps={eps}");
                if v > 0.0 {
                    assert!(r.phi <= v.powf(1.0 / 3.0) + 1e-12, "upper sandwich");
                }
                assert!((0.0..=1.0).contains(&r.phi));
                assert_close(r.var_noise, v, 1e-14, "gauge carries var");
            }
        }
    }
}

#[test]
fn sampled_noise_matches_smoothed_prediction() {
    // Monte Carlo E[f(N_eps(x)) | x] against the exact Q_eps f(x).
    let draws = 120_000u64;
    for (stream, eps) in [(0u64, 0.07), (1, 0.2), (2, 0.43)] {
        let n = 7usize;
        let f = random_indicator(n, 0xAB, stream);
        let sp = Spectrum::transform(&f).unwrap();
        let smoothed = noise_operator(&sp, eps).unwrap().inverse();
        let mut rng = stream_rng(0xCD, stream);
        let x: u64 = rng.random_range(0..1u64 << n);
        let mut hits = 0u64;
        for i in 0..draws {
            let mut draw_rng = stream_rng(0xEF ^ stream, i);
            let y = sample_noise(x, n, NoiseModel::Bernoulli(eps), &mut draw_rng).unwrap();
            hits += u64::from(f.value(y) == 1.0);
        }
        let p_hat = hits as f64 / draws as f64;
        let sigma = (p_hat * (1.0 - p_hat) / draws as f64).sqrt();
        let exact = smoothed.value(x);
        assert!(
            (p_hat - exact).abs() <= 4.0 * sigma,
            "eps={eps}: sampled {p_hat} vs exact {exact} (sigma {sigma})"
        );
    }
}

#[test]
fn fixed_size_variance_equals_direct_enumeration() {
    // VAR~(f, q) against E_y[E_s f(y xor s)]^2 - (E f)^2 over all masks of
    // popcount q.
    for n in 1..=8usize {
        let f = random_indicator(n, 0x77AB, n as u64);
        let sp = Spectrum::transform(&f).unwrap();
        let size = 1u64 << n;
        for q in 0..=n {
            let masks: Vec<u64> = (0..size).filter(|s| s.count_ones() as usize == q).collect();
            let mut second_moment = 0.0;
            for y in 0..size {
                let mean_s: f64 =
                    masks.iter().map(|s| f.value(y ^ s)).sum::<f64>() / masks.len() as f64;
                second_moment += mean_s * mean_s;
            }
            second_moment /= size as f64;
            let expected = second_moment - f.mean() * f.mean();
            assert_close(
                var_fixed(&sp, q).unwrap(),
                expected,
                1e-9,
                &format!("var_fixed n={n} q={q}"),
            );
        }
    }
}

#[test]
fn fixed_noise_operator_smooths_toward_mean_prediction() {
    // T~_q applied to the spectrum reproduces y -> E_s f(y xor s) pointwise.
    let n = 6usize;
    let f = random_indicator(n, 0x9A, 1);
    let sp = Spectrum::transform(&f).unwrap();
    let q = 2usize;
    let smoothed = fixed_noise_operator(&sp, q).unwrap().inverse();
    let size = 1u64 << n;
    let masks: Vec<u64> = (0..size).filter(|s| s.count_ones() as usize == q).collect();
    for y in 0..size {
        let direct: f64 = masks.iter().map(|s| f.value(y ^ s)).sum::<f64>() / masks.len() as f64;
        assert_close(smoothed.value(y), direct, 1e-10, "T~_q pointwise");
    }
}

#[test]
fn noise_variance_monotone_on_low_noise_side() {
    for n in 2..=8usize {
        let f = random_indicator(n, 0xB0, n as u64);
        let sp = Spectrum::transform(&f).unwrap();
        let grid = [0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5];
        for w in grid.windows(2) {
            let hi = var_noise(&sp, w[0]).unwrap();
            let lo = var_noise(&sp, w[1]).unwrap();
            assert!(hi >= lo - 1e-15, "VAR not monotone at eps={}..{}", w[0], w[1]);
        }
    }
}

#[test]
fn bonami_margin_nonnegative_over_eta_grid() {
    for stream in 0..60u64 {
        let n = 2 + (stream % 7) as usize;
        let f = if stream % 2 == 0 {
            random_real(n, 0xBB, stream)
        } else {
            random_indicator(n, 0xBC, stream)
        };
        for eta in [0.2, 0.4, 0.6, 0.8, 1.0] {
            let (lhs, rhs) = bonami_margin(&f, eta).unwrap();
            assert!(
                lhs <= rhs + 1e-12,
                "hypercontractivity violated: n={n} eta={eta} lhs={lhs} rhs={rhs}"
            );
        }
    }
}

#[test]
fn low_level_weight_vanishes_along_tribes() {
    // As II -> 0 along the tribes family, the cumulative weight
    // W_1 + W_2 + W_3 decreases. The grid starts at n = 12 where the sized
    // tribe width settles at s = 3; across the s = 2 -> 3 transition the
    // event's measure jumps and the low-level weight is not monotone.
    let mut previous = f64::INFINITY;
    for n in [12usize, 16, 20, 24] {
        let f = cubesense_core::families::make_tribes_sized(n).unwrap();
        let w = Spectrum::transform(&f).unwrap().level_weights();
        let low: f64 = w[1..=3].iter().sum();
        assert!(
            low < previous,
            "low-level weight did not decrease at n={n}: {low} vs {previous}"
        );
        previous = low;
    }
}

use rand::Rng;

#[test]
fn gauge_shrinks_along_tribes() {
    // Desk-scale direction check: along the sized tribes family (II -> 0)
    // the exact noise variance
    // decreases at every tested eps, and the gauge itself decreases at
    // eps = 0.3. At smaller eps the gauge, being an infimum over a discrete
    // deviation distribution, jitters inside its variance sandwich window
    // while the variance still falls.
    for eps in [0.1f64, 0.2, 0.3] {
        let mut previous_var = f64::INFINITY;
        let mut previous_phi = f64::INFINITY;
        for n in [12usize, 16, 20] {
            let f = cubesense_core::families::make_tribes_sized(n).unwrap();
            let g = gauge_phi(&f, eps).unwrap();
            assert!(
                g.var_noise < previous_var,
                "variance did not fall at n={n} eps={eps}"
            );
            previous_var = g.var_noise;
            if eps == 0.3 {
                assert!(g.phi < previous_phi, "gauge did not fall at n={n}");
                previous_phi = g.phi;
            }
        }
    }
}
