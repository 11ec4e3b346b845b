//! Python bindings for `wpnoma`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use wpnoma::examples::try_example_instance;
use wpnoma::io::{instance_from_json, instance_to_json, SchemeRecord};
use wpnoma::model::{rates_fixed_order, region_boundary, region_membership, sum_throughput};
use wpnoma::numerics::SubgradientConfig;
use wpnoma::schedulers::{optimal_transmit_fraction, solve_scheme};
use wpnoma::sim::{run_experiment_with_workers, sample_instance, trial_rng, write_aggregate_csv, ExperimentConfig};
use wpnoma::timeshare::{greedy_timeshare, solve_minrate_full};
use wpnoma::{Error, Scheme, TimeShareMode};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::InvalidInstance(_) | Error::Schema(_) | Error::Size { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(text: &str) -> PyResult<T> {
    text.parse().map_err(to_py)
}

/// A network instance: base-station constants plus users sorted by
/// effective gain, strongest first.
#[pyclass(name = "NetworkInstance", module = "wpnoma_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyNetworkInstance {
    inner: wpnoma::NetworkInstance,
}

#[pymethods]
impl PyNetworkInstance {
    /// Parses an instance JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: instance_from_json(text).map_err(to_py)? })
    }

    /// Built-in example 1 or 2.
    #[staticmethod]
    fn example(id: u8) -> PyResult<Self> {
        Ok(Self { inner: try_example_instance(id).map_err(to_py)? })
    }

    /// Random ring deployment with the Monte Carlo defaults.
    #[staticmethod]
    #[pyo3(signature = (n_users, p0_dbm, seed=0, trial=0))]
    fn sample(n_users: usize, p0_dbm: f64, seed: u64, trial: usize) -> PyResult<Self> {
        let config = ExperimentConfig::new(vec![n_users], vec![p0_dbm], 1, seed);
        config.validate().map_err(to_py)?;
        let inner = sample_instance(&config, n_users, p0_dbm, &mut trial_rng(seed, n_users, trial)).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        instance_to_json(&self.inner).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Effective gains, strongest first.
    #[getter]
    fn gains(&self) -> Vec<f64> {
        self.inner.gains().as_slice().to_vec()
    }

    /// Per-user SNR weights `eta rho g_n`.
    #[getter]
    fn snr_weights(&self) -> Vec<f64> {
        self.inner.snr_weights()
    }

    fn optimal_transmit_fraction(&self) -> PyResult<f64> {
        optimal_transmit_fraction(&self.inner).map_err(to_py)
    }

    fn sum_throughput(&self, t: f64) -> PyResult<f64> {
        sum_throughput(&self.inner, t).map_err(to_py)
    }

    /// Rates with the strongest user decoded first.
    fn fixed_order_rates(&self, t: f64) -> PyResult<Vec<f64>> {
        Ok(rates_fixed_order(&self.inner, t).map_err(to_py)?.rates)
    }

    fn in_region(&self, t: f64, rates: Vec<f64>) -> PyResult<bool> {
        region_membership(&self.inner, t, &rates).map_err(to_py)
    }

    #[pyo3(signature = (t, samples=11))]
    fn region_boundary(&self, t: f64, samples: usize) -> PyResult<Vec<Vec<f64>>> {
        region_boundary(&self.inner, t, samples).map_err(to_py)
    }

    /// Runs a scheme: "a", "b", "c", "d", "tdma_sum" or "tdma_common".
    #[pyo3(signature = (scheme, mode="full"))]
    fn solve(&self, scheme: &str, mode: &str) -> PyResult<PySchemeResult> {
        let scheme: Scheme = parse(scheme)?;
        let mode: TimeShareMode = parse(mode)?;
        let result = solve_scheme(&self.inner, scheme, mode, &SubgradientConfig::default()).map_err(to_py)?;
        Ok(PySchemeResult::from(SchemeRecord::from(&result)))
    }

    /// Max-min rate over every decoding order at T.
    fn max_min_rate(&self, t: f64) -> PyResult<PySchemeResult> {
        let lp = solve_minrate_full(&self.inner, t).map_err(to_py)?;
        Ok(PySchemeResult {
            scheme: "b".into(),
            transmit_fraction: t,
            rates: lp.per_user_rates,
            objective: lp.min_rate,
            iterations: 0,
            permutations: Some(lp.schedule.permutations),
            fractions: Some(lp.schedule.fractions),
        })
    }

    /// Greedy time sharing at T; returns the result and the min-rate trace.
    #[pyo3(signature = (t, max_iterations=None))]
    fn greedy(&self, t: f64, max_iterations: Option<usize>) -> PyResult<(PySchemeResult, Vec<f64>)> {
        let limit = max_iterations.unwrap_or(self.inner.len() + 1);
        let out = greedy_timeshare(&self.inner, t, limit).map_err(to_py)?;
        let result = PySchemeResult {
            scheme: "b".into(),
            transmit_fraction: t,
            rates: out.result.per_user_rates,
            objective: out.result.min_rate,
            iterations: out.iterations,
            permutations: Some(out.result.schedule.permutations),
            fractions: Some(out.result.schedule.fractions),
        };
        Ok((result, out.min_rate_trace))
    }

    fn __repr__(&self) -> String {
        format!("NetworkInstance(n_users={}, total_snr={:.6e})", self.inner.len(), self.inner.total_snr())
    }
}

/// Outcome of one scheme. Schedule rows are 1-based user positions in
/// decoding order.
#[pyclass(name = "SchemeResult", module = "wpnoma_py", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PySchemeResult {
    scheme: String,
    #[pyo3(name = "T")]
    transmit_fraction: f64,
    rates: Vec<f64>,
    objective: f64,
    iterations: usize,
    permutations: Option<Vec<Vec<usize>>>,
    fractions: Option<Vec<f64>>,
}

impl From<SchemeRecord> for PySchemeResult {
    fn from(r: SchemeRecord) -> Self {
        let (permutations, fractions) = match r.schedule {
            Some(s) => (Some(s.permutations), Some(s.fractions)),
            None => (None, None),
        };
        Self {
            scheme: r.scheme,
            transmit_fraction: r.transmit_fraction,
            rates: r.rates,
            objective: r.objective,
            iterations: r.iterations,
            permutations,
            fractions,
        }
    }
}

#[pymethods]
impl PySchemeResult {
    fn __repr__(&self) -> String {
        format!("SchemeResult(scheme={:?}, T={:.6}, objective={:.6})", self.scheme, self.transmit_fraction, self.objective)
    }
}

/// Runs a Monte Carlo experiment from a JSON config and returns the
/// aggregate CSV text.
#[pyfunction]
#[pyo3(signature = (config_json, workers=None))]
fn run_experiment(py: Python<'_>, config_json: &str, workers: Option<usize>) -> PyResult<String> {
    let config: ExperimentConfig = serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let output = py.detach(|| run_experiment_with_workers(&config, workers)).map_err(to_py)?;
    let mut buf = Vec::new();
    write_aggregate_csv(&mut buf, &output.aggregates).map_err(to_py)?;
    String::from_utf8(buf).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn wpnoma_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetworkInstance>()?;
    m.add_class::<PySchemeResult>()?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
