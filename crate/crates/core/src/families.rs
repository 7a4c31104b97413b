//! Generators for the named Boolean function families.

use crate::function::BooleanFunction;
use crate::majority::{weighted_event, WeightedMajority};
use crate::{Error, Result};

/// A parameterized family member. `n` is derived from the parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    /// `{x : x_0 = 1}`.
    Dictator { n: usize },
    /// `{x : |x| odd}`.
    Parity { n: usize },
    /// `{x : sum_j x_j >= n/2}`.
    Majority { n: usize },
    /// 1 iff some tribe (a consecutive block of `tribe_size` variables) is
    /// all ones; `n = tribe_count * tribe_size`.
    Tribes {
        tribe_count: usize,
        tribe_size: usize,
    },
    /// Leaves of a ternary tree in index order, each internal node the
    /// majority of its three children; `n = 3^depth`.
    RecursiveMajority3 { depth: u32 },
    /// `{x : R(x) > threshold}` where `R` is one plus the number of adjacent
    /// disagreements. `None` picks the median threshold.
    Runs { n: usize, threshold: Option<u32> },
    /// A weighted majority event.
    Weighted(WeightedMajority),
}

impl FamilySpec {
    pub fn n(&self) -> usize {
        match self {
            FamilySpec::Dictator { n }
            | FamilySpec::Parity { n }
            | FamilySpec::Majority { n }
            | FamilySpec::Runs { n, .. } => *n,
            FamilySpec::Tribes {
                tribe_count,
                tribe_size,
            } => tribe_count * tribe_size,
            FamilySpec::RecursiveMajority3 { depth } => 3usize.pow(*depth),
            FamilySpec::Weighted(wm) => wm.n(),
        }
    }
}

/// `R(x) = 1 + #{i < n-1 : x_i != x_{i+1}}`.
pub fn runs_count(x: u64, n: usize) -> u32 {
    let boundaries = (x ^ (x >> 1)) & ((1u64 << (n - 1)) - 1);
    1 + boundaries.count_ones()
}

/// The median threshold for the runs event: the smallest `r` such that
/// `P[R > r] <= 1/2`, which also gives `P[R >= r] > 1/2`.
///
/// `R - 1` counts the `n - 1` independent boundary bits, a Binomial(n-1, 1/2)
/// variable `B`, and `P[R > r] = P[B >= r]`. Binomial symmetry pins the
/// answer at `floor((n-1)/2) + 1` for both parities: for odd `n - 1` the tail
/// at `(n-1+1)/2` is exactly 1/2, for even `n - 1` the tie mass pushes the
/// tail at `(n-1)/2` strictly above 1/2.
pub fn runs_median_threshold(n: usize) -> Result<u32> {
    if n < 2 {
        return Err(Error::contract("runs event needs n >= 2"));
    }
    Ok(((n - 1) / 2 + 1) as u32)
}

/// Materializes the indicator table of the family member.
pub fn make_family(spec: &FamilySpec) -> Result<BooleanFunction> {
    match spec {
        FamilySpec::Dictator { n } => BooleanFunction::indicator_from_fn(*n, |b| b & 1 == 1),
        FamilySpec::Parity { n } => {
            BooleanFunction::indicator_from_fn(*n, |b| b.count_ones() % 2 == 1)
        }
        FamilySpec::Majority { n } => {
            let n = *n;
            BooleanFunction::indicator_from_fn(n, move |b| 2 * b.count_ones() as usize >= n)
        }
        FamilySpec::Tribes {
            tribe_count,
            tribe_size,
        } => {
            let (t, s) = (*tribe_count, *tribe_size);
            if t == 0 || s == 0 {
                return Err(Error::contract("tribes needs positive count and size"));
            }
            BooleanFunction::indicator_from_fn(t * s, move |b| {
                (0..t).any(|tribe| {
                    let mask = ((1u64 << s) - 1) << (tribe * s);
                    b & mask == mask
                })
            })
        }
        FamilySpec::RecursiveMajority3 { depth } => {
            let depth = *depth;
            if depth == 0 {
                return Err(Error::contract("recursive majority needs depth >= 1"));
            }
            let n = 3usize.pow(depth);
            BooleanFunction::indicator_from_fn(n, move |b| recursive_majority_eval(b, depth))
        }
        FamilySpec::Runs { n, threshold } => {
            let n = *n;
            let thr = match threshold {
                Some(t) => *t,
                None => runs_median_threshold(n)?,
            };
            BooleanFunction::indicator_from_fn(n, move |b| runs_count(b, n) > thr)
        }
        FamilySpec::Weighted(wm) => weighted_event(wm),
    }
}

fn recursive_majority_eval(bits: u64, depth: u32) -> bool {
    if depth == 1 {
        return (bits & 0b111).count_ones() >= 2;
    }
    let block = 3usize.pow(depth - 1);
    let mask = (1u64 << block) - 1;
    let a = recursive_majority_eval(bits & mask, depth - 1) as u32;
    let b = recursive_majority_eval((bits >> block) & mask, depth - 1) as u32;
    let c = recursive_majority_eval((bits >> (2 * block)) & mask, depth - 1) as u32;
    a + b + c >= 2
}

/// Influence of each leaf of the depth-`d` recursive ternary majority, by the
/// per-level recursion: a leaf is pivotal iff at every node on its path the
/// other two subtrees split, and each split has probability 1/2
/// independently across levels.
pub fn recursive_majority_influence(depth: u32) -> f64 {
    let mut inf = 1.0f64;
    for _ in 0..depth {
        inf *= 0.5;
    }
    inf
}

/// The tribe size and count used for `n` variables: the real-valued size
/// `sigma = log2 n - log2 log2 n + log2 log2 e` (the balance point of
/// `P[f = 1]`) rounded to whichever of its two integer neighbors puts
/// `P[f = 1]` closest to 1/2. Leftover variables beyond `t * s` are dummies.
pub fn tribes_params(n: usize) -> Result<(usize, usize)> {
    if n < 4 {
        return Err(Error::contract("tribes sizing needs n >= 4"));
    }
    let nf = n as f64;
    let sigma = nf.log2() - nf.log2().log2() + (1.0f64 / 2.0f64.ln()).log2();
    let lo = (sigma.floor() as usize).max(1);
    let candidates = [lo, lo + 1];
    let balance = |s: usize| -> f64 {
        let t = n / s;
        if t == 0 {
            return f64::INFINITY;
        }
        (tribes_success_prob(t, s) - 0.5).abs()
    };
    let s = if balance(candidates[0]) <= balance(candidates[1]) {
        candidates[0]
    } else {
        candidates[1]
    };
    Ok((n / s, s))
}

/// The sized tribes event on exactly `n` variables: [`tribes_params`] picks
/// `(t, s)` and the `n - t s` leftover variables are dummies.
pub fn make_tribes_sized(n: usize) -> Result<BooleanFunction> {
    let (t, s) = tribes_params(n)?;
    BooleanFunction::indicator_from_fn(n, move |b| {
        (0..t).any(|tribe| {
            let mask = ((1u64 << s) - 1) << (tribe * s);
            b & mask == mask
        })
    })
}

/// `P[f = 1] = 1 - (1 - 2^{-s})^t`.
pub fn tribes_success_prob(tribe_count: usize, tribe_size: usize) -> f64 {
    let miss = 1.0 - 0.5f64.powi(tribe_size as i32);
    1.0 - miss.powi(tribe_count as i32)
}

/// Influence of any in-tribe variable: `2^{-(s-1)} (1 - 2^{-s})^{t-1}`.
pub fn tribes_influence(tribe_count: usize, tribe_size: usize) -> f64 {
    let miss = 1.0 - 0.5f64.powi(tribe_size as i32);
    0.5f64.powi(tribe_size as i32 - 1) * miss.powi(tribe_count as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::influence::influence_profile;

    #[test]
    fn tribes_two_by_two_table() {
        let f = make_family(&FamilySpec::Tribes {
            tribe_count: 2,
            tribe_size: 2,
        })
        .unwrap();
        assert_eq!(f.value(0b0011), 1.0);
        assert_eq!(f.value(0b1100), 1.0);
        assert_eq!(f.value(0b1010), 0.0);
        let p = influence_profile(&f).unwrap();
        for i in &p.per_var {
            assert!((i - 0.375).abs() < 1e-15);
        }
        assert!((tribes_influence(2, 2) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn recursive_majority_depth_one_is_majority_of_three() {
        let f = make_family(&FamilySpec::RecursiveMajority3 { depth: 1 }).unwrap();
        let maj3 = make_family(&FamilySpec::Majority { n: 3 }).unwrap();
        assert_eq!(f, maj3);
    }

    #[test]
    fn runs_counting() {
        assert_eq!(runs_count(0b000, 3), 1);
        assert_eq!(runs_count(0b010, 3), 3);
        assert_eq!(runs_count(0b110, 3), 2);
        assert_eq!(runs_count(0b1, 1), 1);
    }

    #[test]
    fn runs_median_threshold_small_cases() {
        // n = 3: R - 1 ~ Binomial(2, 1/2); P[R > 2] = 1/4 <= 1/2 < P[R > 1].
        assert_eq!(runs_median_threshold(3).unwrap(), 2);
        // n = 4: R - 1 ~ Binomial(3, 1/2); P[R > 2] = 1/2.
        assert_eq!(runs_median_threshold(4).unwrap(), 2);
        assert!(runs_median_threshold(1).is_err());
    }

    #[test]
    fn runs_event_is_majority_of_boundary_bits() {
        for n in 2..=10usize {
            let f = make_family(&FamilySpec::Runs { n, threshold: None }).unwrap();
            for x in 0..1u64 << n {
                let y = (x ^ (x >> 1)) & ((1 << (n - 1)) - 1);
                let m = crate::majority::majority_sign(y, (1 << (n - 1)) - 1);
                assert_eq!(f.value(x) == 1.0, m == 1, "n={n} x={x:b}");
            }
        }
    }

    #[test]
    fn tribes_params_balance() {
        for n in [4, 8, 12, 16, 20, 32, 64, 100, 1024] {
            let (t, s) = tribes_params(n).unwrap();
            assert_eq!(t, n / s);
            let here = (tribes_success_prob(t, s) - 0.5).abs();
            // Better balanced than either neighboring integer size.
            for other in [s.saturating_sub(1), s + 1] {
                if other >= 1 && n / other >= 1 {
                    let there = (tribes_success_prob(n / other, other) - 0.5).abs();
                    assert!(here <= there + 1e-15, "n={n}: s={s} loses to {other}");
                }
            }
        }
        assert!(tribes_params(3).is_err());
    }

    #[test]
    fn tribes_closed_forms_match_table() {
        for n in [4usize, 8, 12, 16, 20] {
            let (t, s) = tribes_params(n).unwrap();
            let f = make_family(&FamilySpec::Tribes {
                tribe_count: t,
                tribe_size: s,
            })
            .unwrap();
            assert!((f.mean() - tribes_success_prob(t, s)).abs() < 1e-12);
            let p = influence_profile(&f).unwrap();
            let expected = tribes_influence(t, s);
            for i in &p.per_var {
                assert!((i - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn recursive_majority_influence_matches_depth_two_table() {
        let f = make_family(&FamilySpec::RecursiveMajority3 { depth: 2 }).unwrap();
        let p = influence_profile(&f).unwrap();
        let expected = recursive_majority_influence(2);
        for i in &p.per_var {
            assert!((i - expected).abs() < 1e-15);
        }
        assert_eq!(expected, 0.25);
    }
}
