//! Python bindings: the main types and operations of the core crate.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use cubesense_core::families::make_family;
use cubesense_core::fixed_noise::var_fixed;
use cubesense_core::function::FunctionKind;
use cubesense_core::influence::influence_profile;
use cubesense_core::majority::{
    correlation_with_majority, lambda, stability_deficit, LambdaMode,
};
use cubesense_core::noise::{gauge_phi, var_noise};
use cubesense_core::percolation::{build_grid, dynamical_replicas, estimate_crossing};
use cubesense_core::walk::mixing_time;

fn err(e: cubesense_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A real-valued function on the cube held as a dense truth table.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct BooleanFunction(cubesense_core::BooleanFunction);

#[pymethods]
impl BooleanFunction {
    /// Builds from an explicit table; kind is "indicator", "signed" or
    /// "real".
    #[new]
    #[pyo3(signature = (n, table, kind = "real"))]
    fn new(n: usize, table: Vec<f64>, kind: &str) -> PyResult<Self> {
        let kind: FunctionKind = kind.parse().map_err(err)?;
        cubesense_core::BooleanFunction::new(n, kind, table)
            .map(BooleanFunction)
            .map_err(err)
    }

    /// Builds a named family member from a spec string such as
    /// "dictator:4", "majority:5", "tribes:2x3", "parity:6", "recmaj:2"
    /// or "runs:9".
    #[staticmethod]
    fn family(spec: &str) -> PyResult<Self> {
        if let Some(arg) = spec.strip_prefix("tribes:") {
            if !arg.contains('x') {
                let n: usize = arg
                    .parse()
                    .map_err(|_| PyValueError::new_err(format!("family `{spec}`: bad n")))?;
                return cubesense_core::families::make_tribes_sized(n)
                    .map(BooleanFunction)
                    .map_err(err);
            }
        }
        let spec = parse_family_str(spec)?;
        make_family(&spec).map(BooleanFunction).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn table(&self) -> Vec<f64> {
        self.0.table().to_vec()
    }

    fn value(&self, x: u64) -> f64 {
        self.0.value(x)
    }

    fn mean(&self) -> f64 {
        self.0.mean()
    }

    fn is_monotone(&self) -> bool {
        self.0.is_monotone()
    }

    fn monotonize(&self) -> BooleanFunction {
        BooleanFunction(self.0.monotonize())
    }

    fn shift(&self, var: usize) -> PyResult<BooleanFunction> {
        self.0.shift(var).map(BooleanFunction).map_err(err)
    }

    /// Fourier-Walsh coefficients indexed by subset mask.
    fn spectrum(&self) -> PyResult<Spectrum> {
        cubesense_core::Spectrum::transform(&self.0)
            .map(Spectrum)
            .map_err(err)
    }

    /// Influences, aggregates and level weights as a dict.
    fn influence_profile<'py>(
        &self,
        py: Python<'py>,
    ) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
        let p = influence_profile(&self.0).map_err(err)?;
        let dict = pyo3::types::PyDict::new(py);
        dict.set_item("per_var", p.per_var)?;
        dict.set_item("total_i", p.total_i)?;
        dict.set_item("total_ii", p.total_ii)?;
        dict.set_item("j_weight", p.j_weight)?;
        dict.set_item("alpha", p.alpha)?;
        dict.set_item("beta", p.beta)?;
        dict.set_item("level_weights", p.level_weights)?;
        Ok(dict)
    }

    /// Exact noise variance VAR(f, eps).
    fn var_noise(&self, eps: f64) -> PyResult<f64> {
        let sp = cubesense_core::Spectrum::transform(&self.0).map_err(err)?;
        var_noise(&sp, eps).map_err(err)
    }

    /// Exact fixed-size noise variance VAR~(f, q).
    fn var_fixed(&self, q: usize) -> PyResult<f64> {
        let sp = cubesense_core::Spectrum::transform(&self.0).map_err(err)?;
        var_fixed(&sp, q).map_err(err)
    }

    /// The sensitivity gauge phi(f, eps) next to VAR(f, eps).
    fn gauge(&self, eps: f64) -> PyResult<(f64, f64)> {
        let g = gauge_phi(&self.0, eps).map_err(err)?;
        Ok((g.phi, g.var_noise))
    }

    /// E[f M_K] for the unweighted majority on the mask K.
    fn majority_correlation(&self, k_mask: u64) -> PyResult<f64> {
        Ok(correlation_with_majority(&self.0, k_mask).map_err(err)?.value)
    }

    /// Maximal majority correlation; exact for n <= 12, else a certified
    /// lower bound from the heuristic candidate set.
    #[pyo3(signature = (exact = true))]
    fn lambda_max(&self, exact: bool) -> PyResult<f64> {
        let mode = if exact {
            LambdaMode::Exact
        } else {
            LambdaMode::Heuristic
        };
        lambda(&self.0, mode).map_err(err)
    }

    /// Lazy-walk mixing time: (W(A, eps), certified L2 bound).
    fn mixing_time(&self, eps: f64) -> PyResult<(u64, u64)> {
        let r = mixing_time(&self.0, eps).map_err(err)?;
        Ok((r.steps, r.l2_bound_steps))
    }

    fn __repr__(&self) -> String {
        format!(
            "BooleanFunction(n={}, kind={}, mean={})",
            self.0.n(),
            self.0.kind().as_str(),
            self.0.mean()
        )
    }
}

/// Fourier-Walsh coefficients of a function.
#[pyclass]
struct Spectrum(cubesense_core::Spectrum);

#[pymethods]
impl Spectrum {
    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn coeffs(&self) -> Vec<f64> {
        self.0.coeffs().to_vec()
    }

    fn coeff(&self, mask: u64) -> f64 {
        self.0.coeff(mask)
    }

    fn level_weights(&self) -> Vec<f64> {
        self.0.level_weights()
    }

    fn __repr__(&self) -> String {
        format!("Spectrum(n={})", self.0.n())
    }
}

fn parse_family_str(spec: &str) -> PyResult<cubesense_core::FamilySpec> {
    use cubesense_core::families::runs_median_threshold;
    use cubesense_core::FamilySpec;
    let mut parts = spec.split(':');
    let kind = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    let bad = |msg: &str| PyValueError::new_err(format!("family `{spec}`: {msg}"));
    let num = |idx: usize| -> PyResult<usize> {
        args.get(idx)
            .ok_or_else(|| bad("missing parameter"))?
            .parse()
            .map_err(|_| bad("bad integer"))
    };
    match kind {
        "dictator" => Ok(FamilySpec::Dictator { n: num(0)? }),
        "parity" => Ok(FamilySpec::Parity { n: num(0)? }),
        "majority" => Ok(FamilySpec::Majority { n: num(0)? }),
        "recmaj" => Ok(FamilySpec::RecursiveMajority3 {
            depth: num(0)? as u32,
        }),
        "runs" => {
            let n = num(0)?;
            let threshold = runs_median_threshold(n).map_err(err)?;
            Ok(FamilySpec::Runs {
                n,
                threshold: Some(threshold),
            })
        }
        "tribes" => {
            let arg = args.first().ok_or_else(|| bad("missing size"))?;
            let (t, s) = arg.split_once('x').ok_or_else(|| bad("expected TxS"))?;
            Ok(FamilySpec::Tribes {
                tribe_count: t.parse().map_err(|_| bad("bad tribe count"))?,
                tribe_size: s.parse().map_err(|_| bad("bad tribe size"))?,
            })
        }
        _ => Err(bad("unknown kind")),
    }
}

/// Stability deficit of the uniform-weight majority on n bits under
/// eps-noise; exact for n <= 12, Monte Carlo above.
#[pyfunction]
#[pyo3(signature = (n, eps, samples = 100_000, seed = 24301))]
fn majority_stability(n: usize, eps: f64, samples: u64, seed: u64) -> PyResult<(f64, f64)> {
    let wm = cubesense_core::WeightedMajority::uniform(n).map_err(err)?;
    let est = stability_deficit(&wm, eps, samples, seed).map_err(err)?;
    Ok((est.value, est.std_error))
}

/// Monte Carlo crossing probability of the (m+1) x m rectangle.
#[pyfunction]
#[pyo3(signature = (m, samples = 10_000, seed = 24301))]
fn crossing_probability(m: usize, samples: u64, seed: u64) -> PyResult<(f64, f64)> {
    let grid = build_grid(m).map_err(err)?;
    let est = estimate_crossing(&grid, samples, seed).map_err(err)?;
    Ok((est.value, est.std_error))
}

/// Mean dynamical-percolation switch count over [0, duration].
#[pyfunction]
#[pyo3(signature = (m, duration = 1.0, rate = 1.0, replicas = 200, seed = 24301))]
fn dynamical_switch_mean(
    m: usize,
    duration: f64,
    rate: f64,
    replicas: u64,
    seed: u64,
) -> PyResult<f64> {
    let grid = build_grid(m).map_err(err)?;
    let records = dynamical_replicas(&grid, duration, rate, replicas, seed).map_err(err)?;
    Ok(records.iter().map(|r| r.switch_times.len() as f64).sum::<f64>() / replicas as f64)
}

#[pymodule]
fn cubesense(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<BooleanFunction>()?;
    m.add_class::<Spectrum>()?;
    m.add_function(wrap_pyfunction!(majority_stability, m)?)?;
    m.add_function(wrap_pyfunction!(crossing_probability, m)?)?;
    m.add_function(wrap_pyfunction!(dynamical_switch_mean, m)?)?;
    Ok(())
}
