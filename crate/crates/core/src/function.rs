//! Dense truth-table representation of real-valued functions on the cube.

use crate::{check_table_n, Error, Result, MAX_N};

/// Which class of values the table claims to hold. Validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    /// Every entry in {0, 1}; the indicator of an event.
    Indicator,
    /// Every entry in {-1, 0, 1}.
    Signed,
    /// Unrestricted finite reals.
    Real,
}

impl FunctionKind {
    fn admits(self, v: f64) -> bool {
        match self {
            FunctionKind::Indicator => v == 0.0 || v == 1.0,
            FunctionKind::Signed => v == -1.0 || v == 0.0 || v == 1.0,
            FunctionKind::Real => v.is_finite(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FunctionKind::Indicator => "indicator",
            FunctionKind::Signed => "signed",
            FunctionKind::Real => "real",
        }
    }
}

impl std::str::FromStr for FunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "indicator" => Ok(FunctionKind::Indicator),
            "signed" => Ok(FunctionKind::Signed),
            "real" => Ok(FunctionKind::Real),
            other => Err(Error::parse(format!("unknown function kind `{other}`"))),
        }
    }
}

/// A function on `{0,1}^n` stored as a dense table of `2^n` reals.
///
/// The entry at index `b` is the value at the point whose variable `j` equals
/// bit `j` of `b`. Values are immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BooleanFunction {
    n: usize,
    kind: FunctionKind,
    table: Vec<f64>,
}

impl BooleanFunction {
    pub fn new(n: usize, kind: FunctionKind, table: Vec<f64>) -> Result<Self> {
        check_table_n(n, MAX_N)?;
        if table.len() != 1usize << n {
            return Err(Error::contract(format!(
                "table length {} does not match 2^{n}",
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|v| !kind.admits(**v)) {
            return Err(Error::contract(format!(
                "value {bad} not admitted by kind {}",
                kind.as_str()
            )));
        }
        Ok(BooleanFunction { n, kind, table })
    }

    /// Indicator of the event `{x : pred(x)}`.
    pub fn indicator_from_fn(n: usize, pred: impl Fn(u64) -> bool) -> Result<Self> {
        check_table_n(n, MAX_N)?;
        let table = (0..1u64 << n)
            .map(|b| if pred(b) { 1.0 } else { 0.0 })
            .collect();
        Ok(BooleanFunction {
            n,
            kind: FunctionKind::Indicator,
            table,
        })
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(n, FunctionKind::Real, vec![value; 1usize << n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn value(&self, x: u64) -> f64 {
        self.table[x as usize]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mean(&self) -> f64 {
        self.table.iter().sum::<f64>() / self.len() as f64
    }

    /// `E f^2 - (E f)^2`.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.table.iter().map(|v| v * v).sum::<f64>() / self.len() as f64 - m * m
    }

    pub fn is_indicator(&self) -> bool {
        self.kind == FunctionKind::Indicator
    }

    /// True iff `f(x) <= f(y)` whenever `x <= y` in the lattice order,
    /// checked over all `n * 2^{n-1}` covering pairs.
    pub fn is_monotone(&self) -> bool {
        for j in 0..self.n {
            let bit = 1u64 << j;
            for x in 0..self.table.len() as u64 {
                if x & bit == 0 && self.table[x as usize] > self.table[(x | bit) as usize] {
                    return false;
                }
            }
        }
        true
    }

    /// The j-shift: at points with `x_j = 1` the max of the pair
    /// `{f(x), f(sigma_j x)}`, at points with `x_j = 0` the min. Preserves the
    /// kind tag and the mean (values are only permuted within pairs).
    pub fn shift(&self, var: usize) -> Result<Self> {
        if var >= self.n {
            return Err(Error::contract(format!(
                "variable index {var} out of range for n={}",
                self.n
            )));
        }
        let bit = 1u64 << var;
        let mut table = self.table.clone();
        for x in 0..self.table.len() as u64 {
            if x & bit == 0 {
                let lo = self.table[x as usize];
                let hi = self.table[(x | bit) as usize];
                table[x as usize] = lo.min(hi);
                table[(x | bit) as usize] = lo.max(hi);
            }
        }
        Ok(BooleanFunction {
            n: self.n,
            kind: self.kind,
            table,
        })
    }

    /// Shift in every variable, applying the highest-indexed shift first and
    /// the shift in variable 0 last. The result is monotone; for indicators
    /// the mean is preserved.
    pub fn monotonize(&self) -> Self {
        let mut g = self.clone();
        for var in (0..self.n).rev() {
            g = g.shift(var).expect("index in range");
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_validation() {
        assert!(BooleanFunction::new(1, FunctionKind::Indicator, vec![0.0, 1.0]).is_ok());
        assert!(BooleanFunction::new(1, FunctionKind::Indicator, vec![0.0, 0.5]).is_err());
        assert!(BooleanFunction::new(1, FunctionKind::Signed, vec![-1.0, 1.0]).is_ok());
        assert!(BooleanFunction::new(1, FunctionKind::Real, vec![f64::NAN, 0.0]).is_err());
        assert!(BooleanFunction::new(2, FunctionKind::Real, vec![0.0; 3]).is_err());
        assert!(BooleanFunction::new(0, FunctionKind::Real, vec![1.0]).is_err());
    }

    #[test]
    fn n_above_cap_is_resource_error() {
        let err = BooleanFunction::indicator_from_fn(29, |_| false).unwrap_err();
        assert!(matches!(err, Error::Resource { cap: 28, .. }));
    }

    #[test]
    fn monotonicity_check() {
        let maj3 = BooleanFunction::indicator_from_fn(3, |b| b.count_ones() >= 2).unwrap();
        assert!(maj3.is_monotone());
        let parity = BooleanFunction::indicator_from_fn(2, |b| b.count_ones() % 2 == 1).unwrap();
        assert!(!parity.is_monotone());
    }

    #[test]
    fn shift_anti_dictator_becomes_dictator() {
        let anti = BooleanFunction::indicator_from_fn(1, |b| b & 1 == 0).unwrap();
        let shifted = anti.shift(0).unwrap();
        assert_eq!(shifted.table(), &[0.0, 1.0]);
        assert_eq!(shifted.kind(), FunctionKind::Indicator);
    }

    #[test]
    fn shift_parity_gives_dictator_on_shifted_variable() {
        // Four-entry enumeration: parity table (0,1,1,0) shifted in variable 0
        // becomes 1 exactly on {x_0 = 1}.
        let parity = BooleanFunction::indicator_from_fn(2, |b| b.count_ones() % 2 == 1).unwrap();
        let shifted = parity.shift(0).unwrap();
        assert_eq!(shifted.table(), &[0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn shift_monotone_input_unchanged() {
        let maj3 = BooleanFunction::indicator_from_fn(3, |b| b.count_ones() >= 2).unwrap();
        for var in 0..3 {
            assert_eq!(maj3.shift(var).unwrap(), maj3);
        }
    }

    #[test]
    fn shift_index_out_of_range() {
        let f = BooleanFunction::constant(2, 0.0).unwrap();
        assert!(f.shift(2).is_err());
    }

    #[test]
    fn monotonize_parity_two_vars() {
        // The shift in variable 1 runs first and already produces the
        // dictator on that variable; the final shift leaves it unchanged.
        let parity = BooleanFunction::indicator_from_fn(2, |b| b.count_ones() % 2 == 1).unwrap();
        let mono = parity.monotonize();
        assert_eq!(mono.table(), &[0.0, 0.0, 1.0, 1.0]);
        assert!(mono.is_monotone());
        assert_eq!(mono.mean(), parity.mean());
    }
}
