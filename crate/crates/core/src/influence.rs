//! Influences of variables and the derived aggregates.

use crate::function::BooleanFunction;
use crate::spectrum::Spectrum;
use crate::Result;

/// Per-variable influences plus the aggregates `I`, `II`, `J`, `alpha`,
/// `beta` and the spectral level weights.
///
/// `alpha = ln I / ln n` and `beta = -ln J / ln n` are reported as `None`
/// for `n = 1` or when the corresponding aggregate is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceProfile {
    pub per_var: Vec<f64>,
    pub total_i: f64,
    pub total_ii: f64,
    pub j_weight: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub level_weights: Vec<f64>,
}

/// Influence of one variable by direct table traversal: the mean of
/// `|f(x) - f(sigma_j x)|` over the cube.
pub fn influence_of(f: &BooleanFunction, var: usize) -> f64 {
    let bit = 1u64 << var;
    let table = f.table();
    let mut sum = 0.0;
    for x in 0..table.len() as u64 {
        if x & bit == 0 {
            sum += (table[x as usize] - table[(x | bit) as usize]).abs();
        }
    }
    // Each unordered pair contributes the same change at both of its points.
    sum / (table.len() as f64 / 2.0)
}

/// Full influence profile. The per-variable influences come from direct
/// traversal; the level weights from the spectrum, so the two routes stay
/// independent for the cross identities.
pub fn influence_profile(f: &BooleanFunction) -> Result<InfluenceProfile> {
    let n = f.n();
    let per_var: Vec<f64> = (0..n).map(|j| influence_of(f, j)).collect();
    let total_i: f64 = per_var.iter().sum();
    let total_ii: f64 = per_var.iter().map(|i| i * i).sum();

    let sp = Spectrum::transform(f)?;
    let level_weights = sp.level_weights();
    let j_weight: f64 = level_weights
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, w)| w / k as f64)
        .sum();

    let alpha = if n > 1 && total_i > 0.0 {
        Some(total_i.ln() / (n as f64).ln())
    } else {
        None
    };
    let beta = if n > 1 && j_weight > 0.0 {
        Some(-j_weight.ln() / (n as f64).ln())
    } else {
        None
    };

    Ok(InfluenceProfile {
        per_var,
        total_i,
        total_ii,
        j_weight,
        alpha,
        beta,
        level_weights,
    })
}
