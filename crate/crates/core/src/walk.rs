//! The lazy hypercube random walk started uniformly on an event: exact
//! spectral evolution, total-variation distance to uniform, and the mixing
//! functional.

use crate::function::BooleanFunction;
use crate::spectrum::Spectrum;
use crate::{Error, Result, MAX_N};

/// The walk's distribution after `t` steps, stored as the density relative
/// to uniform (`2^n` times the point probabilities).
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    n: usize,
    density: Vec<f64>,
    t: u64,
}

impl WalkState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn t(&self) -> u64 {
        self.t
    }
}

/// Start state: uniform on the event, so the density is `chi_A / P[A]`.
pub fn walk_start(a: &BooleanFunction) -> Result<WalkState> {
    if !a.is_indicator() {
        return Err(Error::contract("walk must start on an indicator event"));
    }
    crate::check_table_n(a.n(), MAX_N - 1)?;
    let p = a.mean();
    if p == 0.0 {
        return Err(Error::contract("walk cannot start on an empty event"));
    }
    let density = a.table().iter().map(|v| v / p).collect();
    Ok(WalkState {
        n: a.n(),
        density,
        t: 0,
    })
}

/// The walk eigenvalue on spectral level `k`. The one-step operator is
/// `(1/2) I + (2n)^{-1} sum_j sigma_j`, and `sigma_j u_S = -u_S` exactly for
/// `j in S`, so level `k` contracts by `1/2 + (n - 2k)/(2n) = 1 - k/n`.
fn eigenvalue(n: usize, k: u32) -> f64 {
    1.0 - k as f64 / n as f64
}

/// Evolves the state by the closed-form spectral update: the coefficient at
/// `S` is multiplied by `((2n - |S|) / 2n)^steps`. This is the canonical
/// path; [`walk_evolve_direct`] implements the same step by averaging.
pub fn walk_evolve(state: &WalkState, steps: u64) -> WalkState {
    if steps == 0 {
        return state.clone();
    }
    let n = state.n;
    let f = BooleanFunction::new(n, crate::FunctionKind::Real, state.density.clone())
        .expect("density is a valid table");
    let sp = Spectrum::transform(&f).expect("n within cap");
    let evolved = sp.scale_by_level(|k| eigenvalue(n, k).powi(steps.min(i32::MAX as u64) as i32));
    WalkState {
        n,
        density: evolved.inverse().table().to_vec(),
        t: state.t + steps,
    }
}

/// One-step averaging route: `f_{t+1} = f_t / 2 + (2n)^{-1} sum_j sigma_j f_t`,
/// applied `steps` times.
pub fn walk_evolve_direct(state: &WalkState, steps: u64) -> WalkState {
    let n = state.n;
    let mut density = state.density.clone();
    let mut next = vec![0.0f64; density.len()];
    for _ in 0..steps {
        for (x, slot) in next.iter_mut().enumerate() {
            let mut acc = density[x] * 0.5;
            for j in 0..n {
                acc += density[x ^ (1 << j)] / (2 * n) as f64;
            }
            *slot = acc;
        }
        std::mem::swap(&mut density, &mut next);
    }
    WalkState {
        n,
        density,
        t: state.t + steps,
    }
}

/// Total mass of the signed difference to uniform,
/// `2^{-n} sum_x |f_t(x) - 1|` (twice the standard total-variation
/// distance); this is the convention used consistently here.
pub fn tv_distance(state: &WalkState) -> f64 {
    state.density.iter().map(|d| (d - 1.0).abs()).sum::<f64>() / state.density.len() as f64
}

/// Output of [`mixing_time`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixingReport {
    /// `W(A, eps) = inf { t : tv < eps }`, strict.
    pub steps: u64,
    /// The step count certified by the spectral L2 bound
    /// `tv(t)^2 <= P[A]^{-2} sum_{s != 0} lambda_{|s|}^{2t} coeff(S)^2`;
    /// always at least `steps`.
    pub l2_bound_steps: u64,
}

/// Finds the smallest `t` with `tv_distance < eps` (strict) by doubling plus
/// binary search on the closed-form spectral evolution; each candidate costs
/// one `O(n 2^n)` pass.
pub fn mixing_time(a: &BooleanFunction, eps: f64) -> Result<MixingReport> {
    if eps <= 0.0 {
        return Err(Error::contract("eps must be positive"));
    }
    let start = walk_start(a)?;
    let n = start.n;
    let sp = Spectrum::transform(
        &BooleanFunction::new(n, crate::FunctionKind::Real, start.density.clone()).unwrap(),
    )?;

    let tv_at = |t: u64| -> f64 {
        let evolved = sp.scale_by_level(|k| eigenvalue(n, k).powi(t.min(i32::MAX as u64) as i32));
        evolved
            .inverse()
            .table()
            .iter()
            .map(|d| (d - 1.0).abs())
            .sum::<f64>()
            / (1u64 << n) as f64
    };

    let steps = if tv_at(0) < eps {
        0
    } else {
        let mut hi = 1u64;
        while tv_at(hi) >= eps {
            hi *= 2;
            if hi > 1 << 40 {
                return Err(Error::contract(
                    "mixing time search exceeded 2^40 steps; eps too small",
                ));
            }
        }
        // Invariant: tv(lo) >= eps > tv(hi); tv is nonincreasing in t.
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if tv_at(mid) < eps {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };

    // L2 chain on the indicator's level weights: one O(n) evaluation per
    // candidate t.
    let chi = Spectrum::transform(a)?;
    let weights = chi.level_weights();
    let p = a.mean();
    let l2_sq_at = |t: u64| -> f64 {
        weights
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, w)| eigenvalue(n, k as u32).powi(2 * t.min(i32::MAX as u64 / 2) as i32) * w)
            .sum::<f64>()
            / (p * p)
    };
    let l2_bound_steps = if l2_sq_at(0) < eps * eps {
        0
    } else {
        let mut hi = 1u64;
        while l2_sq_at(hi) >= eps * eps {
            hi *= 2;
            if hi > 1 << 40 {
                break;
            }
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if l2_sq_at(mid) < eps * eps {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };

    Ok(MixingReport {
        steps,
        l2_bound_steps,
    })
}
