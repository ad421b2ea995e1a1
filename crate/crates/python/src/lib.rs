//! Python bindings: `import ranklq_py`.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ranklq::calib::{self, CalibrationRecord, McSettings};
use ranklq::exact::{fmt_ratio, to_f64};
use ranklq::kernels::{compute_ranks, pair_statistic as rank_pair, pearson, Algorithm, DataMatrix, TiePolicy};
use ranklq::moments::{bruteforce_moment, kendall_moment, pearson_gaussian_moment, spearman_moment_partition};
use ranklq::patternenum::{moment_from_omega, omega as omega_value, OmegaKey};
use ranklq::rng::DEFAULT_SEED;
use ranklq::stats::{self, parse_norms, TestOptions};
use ranklq::{BigRational, CoefficientKind, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(_) | Error::NotPositiveDefinite(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn kind_of(name: &str) -> PyResult<CoefficientKind> {
    name.parse().map_err(py_err)
}

fn exact_pair(v: &BigRational) -> (String, f64) {
    (fmt_ratio(v), to_f64(v))
}

/// Stored standardizing constants for one coefficient and sample size.
#[pyclass(name = "Calibration", frozen, from_py_object)]
#[derive(Clone)]
struct PyCalibration {
    inner: CalibrationRecord,
}

#[pymethods]
impl PyCalibration {
    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.short_name()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn sigma2(&self) -> f64 {
        self.inner.sigma2
    }

    /// {q: (mu, v)}
    fn entries(&self) -> BTreeMap<u32, (f64, f64)> {
        self.inner.entries.iter().map(|e| (e.q, (e.mu, e.v))).collect()
    }

    fn to_json(&self) -> String {
        calib::record_to_json(&self.inner)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        calib::record_from_json(text)
            .map(|inner| PyCalibration { inner })
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Calibration(kind={}, n={}, sigma2={:e})", self.kind(), self.inner.n, self.inner.sigma2)
    }
}

/// Exact (or, for D/R/tau* beyond the closed routes, Monte Carlo) calibration.
#[pyfunction]
#[pyo3(signature = (kind, n, replicates = 100_000, seed = DEFAULT_SEED))]
fn calibrate(py: Python<'_>, kind: &str, n: usize, replicates: usize, seed: u64) -> PyResult<PyCalibration> {
    let kind = kind_of(kind)?;
    let rec = py
        .detach(|| calib::calibrate(kind, n, Some(McSettings { replicates, seed })))
        .map_err(py_err)?;
    Ok(PyCalibration { inner: rec })
}

/// One coefficient between two samples.
#[pyfunction]
fn pair_statistic(kind: &str, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    let kind = kind_of(kind)?;
    if kind == CoefficientKind::Pearson {
        return pearson(&x, &y).map_err(py_err);
    }
    let data = DataMatrix::from_columns(vec![x, y]).map_err(py_err)?;
    let ranks = compute_ranks(&data, TiePolicy::Reject).map_err(py_err)?;
    rank_pair(kind, ranks.column(0), ranks.column(1), Algorithm::Fast).map_err(py_err)
}

/// Exact E[T^r] of one pair under independence, as ("a/b", float).
#[pyfunction]
#[pyo3(signature = (kind, r, n, brute_force = false))]
fn exact_moment(kind: &str, r: usize, n: usize, brute_force: bool) -> PyResult<(String, f64)> {
    let kind = kind_of(kind)?;
    let v = if brute_force {
        bruteforce_moment(kind, r, n)
    } else {
        match kind {
            CoefficientKind::Spearman => spearman_moment_partition(r, n),
            CoefficientKind::Kendall => kendall_moment(r, n),
            CoefficientKind::Pearson => Ok(pearson_gaussian_moment(r, n)),
            other => moment_from_omega(other, r, n),
        }
    }
    .map_err(py_err)?;
    Ok(exact_pair(&v))
}

/// Binomial-basis coefficient Omega_{T,r,b} as ("a/b", float).
#[pyfunction]
fn omega(kind: &str, r: usize, b: usize) -> PyResult<(String, f64)> {
    let key = OmegaKey::new(kind_of(kind)?, r, b).map_err(py_err)?;
    omega_value(key).map(|v| exact_pair(&v)).map_err(py_err)
}

/// Cauchy combination of p-values (equal weights when omitted).
#[pyfunction]
#[pyo3(signature = (pvalues, weights = None))]
fn cauchy_combine(pvalues: Vec<f64>, weights: Option<Vec<f64>>) -> PyResult<f64> {
    let w = weights.unwrap_or_else(|| vec![1.0 / pvalues.len().max(1) as f64; pvalues.len()]);
    stats::cauchy_combine(&pvalues, &w).map_err(py_err)
}

/// Independence test on an n x p array given as a list of rows.
/// Returns the report as a JSON string.
#[pyfunction]
#[pyo3(signature = (rows, kind, norms = "2,4,6,inf", calibration = None, replicates = 100_000, seed = DEFAULT_SEED))]
fn independence_test(
    py: Python<'_>,
    rows: Vec<Vec<f64>>,
    kind: &str,
    norms: &str,
    calibration: Option<PyCalibration>,
    replicates: usize,
    seed: u64,
) -> PyResult<String> {
    let kind = kind_of(kind)?;
    let data = DataMatrix::from_rows(&rows).map_err(py_err)?;
    let opts = TestOptions {
        norms: parse_norms(norms).map_err(py_err)?,
        seed: Some(seed),
        ..TestOptions::default()
    };
    let report = py
        .detach(|| {
            let cal = match calibration {
                Some(c) => c.inner,
                None => calib::calibrate(kind, data.n(), Some(McSettings { replicates, seed }))?,
            };
            stats::run_test(&data, kind, &cal, &opts)
        })
        .map_err(py_err)?;
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

#[pymodule]
fn ranklq_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCalibration>()?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(pair_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(exact_moment, m)?)?;
    m.add_function(wrap_pyfunction!(omega, m)?)?;
    m.add_function(wrap_pyfunction!(cauchy_combine, m)?)?;
    m.add_function(wrap_pyfunction!(independence_test, m)?)?;
    Ok(())
}
