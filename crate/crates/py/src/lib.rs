//! Python module `entest`: estimators, exact oracles, Monte Carlo and MI.
//!
//! Domain errors raise `ValueError`, overflow of `G_n(a)` raises
//! `OverflowError`, other numerical failures raise `ArithmeticError`.

use pyo3::exceptions::{PyArithmeticError, PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use entest_core::estimators::{CountVector, EstimatorConfig, LeadingTerm, ParamVector, Regime};
use entest_core::exact_oracle::{self as oracle, Distribution};
use entest_core::experiments;
use entest_core::mi::{self, SynthConfig, SynthProfile, Thresholds};
use entest_core::sampling::SeedSpec;
use entest_core::special_fn;

fn to_py(e: entest_core::Error) -> PyErr {
    if e.is_overflow() {
        PyOverflowError::new_err(e.to_string())
    } else if matches!(e, entest_core::Error::Numerical(_)) {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for entest_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

#[pyfunction]
fn digamma(n: u64) -> PyResult<f64> {
    special_fn::digamma(n).py()
}

#[pyfunction]
fn exp_integral_e1(x: f64) -> PyResult<f64> {
    special_fn::exp_integral_e1(x).py()
}

/// `g_n(a) = (−1)^n ∫_0^a x^(n−1)/(1+x) dx`.
#[pyfunction]
fn g_signed(n: u64, a: f64) -> PyResult<f64> {
    special_fn::g_signed(n, a).py()
}

/// `G_n(a) = ψ(n) + g_n(a)`.
#[pyfunction]
#[pyo3(signature = (n, a = 1.0))]
fn big_g(n: u64, a: f64) -> PyResult<f64> {
    special_fn::big_g_a(n, a).py()
}

#[pyfunction]
#[pyo3(signature = (n, a, tolerance = 1e-12))]
fn quadrature_g(n: u64, a: f64, tolerance: f64) -> PyResult<f64> {
    let cfg = special_fn::SpecialFnConfig {
        quadrature_abs_tol: tolerance,
        ..Default::default()
    };
    special_fn::quadrature_g(n, a, &cfg).py()
}

#[pyclass(frozen, get_all, name = "EntropyEstimate")]
#[derive(Clone)]
struct PyEstimate {
    value_nats: f64,
    value_bits: f64,
    estimator_id: String,
    leading_term: String,
}

#[pymethods]
impl PyEstimate {
    fn __repr__(&self) -> String {
        format!(
            "EntropyEstimate(value_bits={}, estimator_id='{}', leading_term='{}')",
            self.value_bits, self.estimator_id, self.leading_term
        )
    }
}

fn regime(name: &str) -> PyResult<Regime> {
    match name {
        "binomial" => Ok(Regime::Binomial),
        "poisson" => Ok(Regime::Poisson),
        other => Err(PyValueError::new_err(format!("unknown regime {other:?}"))),
    }
}

fn estimator_config(
    estimator: &str,
    a: Option<Vec<f64>>,
    boxes: usize,
    regime_name: &str,
    leading_term: &str,
) -> PyResult<EstimatorConfig> {
    Ok(match estimator {
        "naive" => EstimatorConfig::Naive,
        "grassberger" => EstimatorConfig::Grassberger {
            leading_term: match leading_term {
                "psi_N" => LeadingTerm::PsiN,
                "log_N" => LeadingTerm::LogN,
                other => {
                    return Err(PyValueError::new_err(format!(
                        "unknown leading term {other:?}"
                    )))
                }
            },
        },
        "schuermann" => EstimatorConfig::Schuermann {
            a: match a {
                Some(v) => ParamVector::new(v).py()?,
                None => ParamVector::uniform(boxes, 1.0).py()?,
            },
            regime: regime(regime_name)?,
        },
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown estimator {other:?}"
            )))
        }
    })
}

/// Entropy estimate from one count vector. `a` defaults to all ones.
#[pyfunction]
#[pyo3(signature = (counts, estimator = "schuermann", a = None, regime = "binomial", leading_term = "psi_N"))]
fn estimate(
    counts: Vec<u64>,
    estimator: &str,
    a: Option<Vec<f64>>,
    regime: &str,
    leading_term: &str,
) -> PyResult<PyEstimate> {
    let c = CountVector::new(counts).py()?;
    let cfg = estimator_config(estimator, a, c.len(), regime, leading_term)?;
    let e = cfg.evaluate(&c).py()?;
    Ok(PyEstimate {
        value_nats: e.value_nats,
        value_bits: e.value_bits,
        estimator_id: e.estimator_id.as_str().into(),
        leading_term: e.leading_term.as_str().into(),
    })
}

#[pyfunction]
fn exact_entropy(p: Vec<f64>) -> PyResult<f64> {
    Ok(oracle::exact_entropy(&Distribution::new(p).py()?))
}

/// Bias-optimal parameters `(1 − p_i)/p_i`.
#[pyfunction]
fn optimal_params(p: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(oracle::optimal_params(&Distribution::new(p).py()?)
        .values()
        .to_vec())
}

/// Closed-form bias in nats of the binomial-regime estimator.
#[pyfunction]
fn exact_bias(p: Vec<f64>, n: u64, a: Vec<f64>) -> PyResult<f64> {
    let d = Distribution::new(p).py()?;
    oracle::exact_estimator_bias(&d, n, &ParamVector::new(a).py()?).py()
}

/// Exact mean, variance and bias (nats) by enumerating every outcome.
#[pyfunction]
#[pyo3(signature = (p, n, estimator = "schuermann", a = None, regime = "binomial", leading_term = "psi_N"))]
fn enumerate_moments<'py>(
    py: Python<'py>,
    p: Vec<f64>,
    n: u64,
    estimator: &str,
    a: Option<Vec<f64>>,
    regime: &str,
    leading_term: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let d = Distribution::new(p).py()?;
    let cfg = estimator_config(estimator, a, d.len(), regime, leading_term)?;
    let r = py
        .allow_threads(|| oracle::enumerate_moments(&d, n, &cfg))
        .py()?;
    let out = PyDict::new(py);
    out.set_item("mean_nats", r.mean_nats)?;
    out.set_item("variance_nats2", r.variance_nats2)?;
    out.set_item("bias_nats", r.bias_nats)?;
    out.set_item("outcome_count", r.outcome_count)?;
    Ok(out)
}

#[pyclass(frozen, get_all, name = "EstimateSummary")]
#[derive(Clone)]
struct PySummary {
    mean_bits: f64,
    std_error_bits: f64,
    variance_bits2: f64,
    replicates: u64,
    overflow_count: u64,
}

#[pymethods]
impl PySummary {
    fn __repr__(&self) -> String {
        format!(
            "EstimateSummary(mean_bits={}, std_error_bits={}, replicates={}, overflow_count={})",
            self.mean_bits, self.std_error_bits, self.replicates, self.overflow_count
        )
    }
}

/// Monte Carlo mean and spread over `replicates` seeded multinomial draws.
#[pyfunction]
#[pyo3(signature = (p, n, replicates, seed = 0, stream = 0, estimator = "schuermann", a = None, regime = "binomial", leading_term = "psi_N"))]
#[allow(clippy::too_many_arguments)]
fn mc_estimate(
    py: Python<'_>,
    p: Vec<f64>,
    n: u64,
    replicates: u64,
    seed: u64,
    stream: u64,
    estimator: &str,
    a: Option<Vec<f64>>,
    regime: &str,
    leading_term: &str,
) -> PyResult<PySummary> {
    let d = Distribution::new(p).py()?;
    let cfg = estimator_config(estimator, a, d.len(), regime, leading_term)?;
    let s = py
        .allow_threads(|| {
            experiments::mc_estimate(&d, n, &cfg, replicates, SeedSpec::new(seed, stream))
        })
        .py()?;
    Ok(PySummary {
        mean_bits: s.mean_bits,
        std_error_bits: s.std_error_bits,
        variance_bits2: s.variance_bits2,
        replicates: s.replicates,
        overflow_count: s.overflow_count,
    })
}

/// Indices of boxes with `a_i^{n_i} > threshold`.
#[pyfunction]
#[pyo3(signature = (a, counts, threshold = 10.0))]
fn safety_check(a: Vec<f64>, counts: Vec<u64>, threshold: f64) -> PyResult<Vec<usize>> {
    let r = experiments::safety_check(
        &ParamVector::new(a).py()?,
        &CountVector::new(counts).py()?,
        threshold,
    )
    .py()?;
    Ok(r.flags.iter().map(|f| f.box_index).collect())
}

#[pyclass(frozen, name = "PairDataset")]
struct PyPairDataset {
    inner: mi::PairDataset,
}

#[pymethods]
impl PyPairDataset {
    #[new]
    fn new(pairs: Vec<(u32, u8)>) -> PyResult<Self> {
        Ok(PyPairDataset {
            inner: mi::PairDataset::from_pairs(pairs).py()?,
        })
    }

    /// Parse two-column delimited text.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        mi::PairDataset::parse(text.as_bytes())
            .map(|inner| PyPairDataset { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn x_arity(&self) -> u32 {
        self.inner.x_arity()
    }

    fn pairs(&self) -> Vec<(u32, u8)> {
        self.inner.pairs().to_vec()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }
}

fn thresholds(t_moderate: f64, t_heavy: f64) -> PyResult<Thresholds> {
    let t = Thresholds {
        moderate: t_moderate,
        heavy: t_heavy,
    };
    t.validate().py()?;
    Ok(t)
}

/// Synthetic dataset and its exact MI: `(dataset, truth)` where `truth`
/// holds `true_mi_bits`, `marginal_y1`, `p_x` and `q`.
#[pyfunction]
#[pyo3(signature = (profile = "pym_like", size = 250_000, seed = 0))]
fn synth_dataset<'py>(
    py: Python<'py>,
    profile: &str,
    size: usize,
    seed: u64,
) -> PyResult<(PyPairDataset, Bound<'py, PyDict>)> {
    let profile = match profile {
        "pym_like" => SynthProfile::PymLike,
        "spherical_like" => SynthProfile::SphericalLike,
        other => return Err(PyValueError::new_err(format!("unknown profile {other:?}"))),
    };
    let cfg = SynthConfig::for_profile(profile);
    let (ds, truth) = mi::synth_dataset(profile, size, SeedSpec::new(seed, 0), &cfg).py()?;
    let out = PyDict::new(py);
    out.set_item("true_mi_bits", truth.true_mi_bits())?;
    out.set_item("marginal_y1", truth.marginal_y1())?;
    out.set_item("p_x", truth.p_x.clone())?;
    out.set_item("q", truth.q.clone())?;
    Ok((PyPairDataset { inner: ds }, out))
}

/// MI estimate in bits of a whole dataset, classes taken from itself.
#[pyfunction]
#[pyo3(signature = (dataset, t_moderate = 0.65, t_heavy = 0.85))]
fn mi_estimate<'py>(
    py: Python<'py>,
    dataset: &PyPairDataset,
    t_moderate: f64,
    t_heavy: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let classes = mi::classify_x(&dataset.inner, thresholds(t_moderate, t_heavy)?).py()?;
    let e = mi::mi_estimate(&dataset.inner, &classes).py()?;
    let out = PyDict::new(py);
    out.set_item("mi_bits", e.mi_bits)?;
    out.set_item("mi_unclipped_bits", e.mi_unclipped_bits)?;
    out.set_item("h_y_bits", e.h_y_bits)?;
    Ok(out)
}

/// Subsampling curve: one dict per N with mean and standard error.
#[pyfunction]
#[pyo3(signature = (dataset, n_grid, replicates = 100, seed = 0, replacement = false, t_moderate = 0.65, t_heavy = 0.85))]
#[allow(clippy::too_many_arguments)]
fn mi_curve<'py>(
    py: Python<'py>,
    dataset: &PyPairDataset,
    n_grid: Vec<usize>,
    replicates: usize,
    seed: u64,
    replacement: bool,
    t_moderate: f64,
    t_heavy: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let classes = mi::classify_x(&dataset.inner, thresholds(t_moderate, t_heavy)?).py()?;
    let rows = py
        .allow_threads(|| {
            mi::mi_subsample_curve(
                &dataset.inner,
                &classes,
                &n_grid,
                replicates,
                SeedSpec::new(seed, 0),
                replacement,
            )
        })
        .py()?;
    rows.into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("N", r.n)?;
            d.set_item("mean_mi_bits", r.mean_mi_bits)?;
            d.set_item("std_error", r.std_error_bits)?;
            d.set_item("mean_mi_unclipped_bits", r.mean_mi_unclipped_bits)?;
            d.set_item("std_error_unclipped", r.std_error_unclipped_bits)?;
            d.set_item("error", r.error)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
pub fn entest(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(digamma, m)?)?;
    m.add_function(wrap_pyfunction!(exp_integral_e1, m)?)?;
    m.add_function(wrap_pyfunction!(g_signed, m)?)?;
    m.add_function(wrap_pyfunction!(big_g, m)?)?;
    m.add_function(wrap_pyfunction!(quadrature_g, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(exact_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_params, m)?)?;
    m.add_function(wrap_pyfunction!(exact_bias, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_moments, m)?)?;
    m.add_function(wrap_pyfunction!(mc_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(safety_check, m)?)?;
    m.add_function(wrap_pyfunction!(synth_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(mi_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(mi_curve, m)?)?;
    m.add_class::<PyEstimate>()?;
    m.add_class::<PySummary>()?;
    m.add_class::<PyPairDataset>()?;
    Ok(())
}
