//! The Fourier-Walsh transform and its spectrum type.

use crate::function::{BooleanFunction, FunctionKind};
use crate::{check_table_n, Result, MAX_N};

/// The `2^n` Fourier-Walsh coefficients of a function, indexed by subset
/// bitmask: `coeff(S) = 2^{-n} sum_x f(x) (-1)^{|S ∩ x|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    coeffs: Vec<f64>,
}

/// In-place Walsh-Hadamard butterfly (unnormalized). Applying it twice
/// multiplies the input by `2^n`.
pub fn wht_in_place(data: &mut [f64]) {
    debug_assert!(data.len().is_power_of_two());
    let n = data.len();
    let mut h = 1;
    while h < n {
        let step = h * 2;
        let mut i = 0;
        while i < n {
            for j in i..i + h {
                let a = data[j];
                let b = data[j + h];
                data[j] = a + b;
                data[j + h] = a - b;
            }
            i += step;
        }
        h = step;
    }
}

impl Spectrum {
    /// Forward transform. Carries the `2^{-n}` factor so that the empty-set
    /// coefficient is the mean of the table. Runs in `O(n 2^n)`.
    pub fn transform(f: &BooleanFunction) -> Result<Spectrum> {
        check_table_n(f.n(), MAX_N)?;
        let mut coeffs = f.table().to_vec();
        wht_in_place(&mut coeffs);
        let scale = 1.0 / coeffs.len() as f64;
        for c in coeffs.iter_mut() {
            *c *= scale;
        }
        Ok(Spectrum { n: f.n(), coeffs })
    }

    /// Builds a spectrum directly from coefficients.
    pub fn from_coeffs(n: usize, coeffs: Vec<f64>) -> Result<Spectrum> {
        check_table_n(n, MAX_N)?;
        if coeffs.len() != 1usize << n {
            return Err(crate::Error::contract(format!(
                "coefficient count {} does not match 2^{n}",
                coeffs.len()
            )));
        }
        Ok(Spectrum { n, coeffs })
    }

    /// Inverse transform: the unnormalized butterfly reconstructs the table
    /// exactly (the transform is an involution up to the `2^{-n}` scale).
    /// The result carries the `Real` kind.
    pub fn inverse(&self) -> BooleanFunction {
        let mut table = self.coeffs.clone();
        wht_in_place(&mut table);
        BooleanFunction::new(self.n, FunctionKind::Real, table).expect("valid table")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: u64) -> f64 {
        self.coeffs[mask as usize]
    }

    /// The mean of the underlying function.
    pub fn mean(&self) -> f64 {
        self.coeffs[0]
    }

    /// `sum_S coeff(S)^2`, equal to `E f^2` by Parseval.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// `sum_{S != empty} coeff(S)^2 = var f`.
    pub fn variance(&self) -> f64 {
        self.energy() - self.coeffs[0] * self.coeffs[0]
    }

    /// Level weights `W_k = sum_{|S| = k} coeff(S)^2` for `k = 0..=n`.
    pub fn level_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n + 1];
        for (mask, c) in self.coeffs.iter().enumerate() {
            w[mask.count_ones() as usize] += c * c;
        }
        w
    }

    /// Maps every coefficient through `factor(|S|)`.
    pub fn scale_by_level(&self, factor: impl Fn(u32) -> f64) -> Spectrum {
        let per_level: Vec<f64> = (0..=self.n as u32).map(factor).collect();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(mask, c)| c * per_level[mask.count_ones() as usize])
            .collect();
        Spectrum {
            n: self.n,
            coeffs,
        }
    }
}
