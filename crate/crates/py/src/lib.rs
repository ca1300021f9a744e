//! Python bindings. States and reports cross the boundary as JSON strings.

use gaussopt::harness::{self, VerifyParams};
use gaussopt::spectra::{g_func, g_inv, shannon_entropy, spectrum};
use gaussopt::{DensityMatrix, GlobalConfig, ProbVector};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn state_from_json(state: &str, cfg: &GlobalConfig) -> PyResult<DensityMatrix> {
    let json = serde_json::from_str(state).map_err(err)?;
    DensityMatrix::from_json(&json, cfg).map_err(err)
}

/// Thermal entropy g(E).
#[pyfunction]
fn g(energy: f64) -> PyResult<f64> {
    g_func(energy).map_err(err)
}

#[pyfunction]
fn g_inverse(entropy: f64) -> PyResult<f64> {
    g_inv(entropy).map_err(err)
}

/// Von Neumann entropy of a state given as `{"mode_dims": [...], "matrix": [[[re, im], ...]]}`,
/// or the Renyi entropy of order `renyi`.
#[pyfunction]
#[pyo3(signature = (state, renyi=None))]
fn entropy(state: &str, renyi: Option<f64>) -> PyResult<f64> {
    let cfg = GlobalConfig::default();
    let sp = spectrum(&state_from_json(state, &cfg)?, &cfg).map_err(err)?;
    Ok(renyi.map_or_else(|| sp.entropy(), |p| sp.renyi(p)))
}

#[pyfunction]
fn thin(dist: Vec<f64>, lambda: f64) -> PyResult<Vec<f64>> {
    let p = ProbVector::new(dist, &GlobalConfig::default()).map_err(err)?;
    Ok(gaussopt::thinning::thin(&p, lambda).map_err(err)?.weights().to_vec())
}

#[pyfunction]
fn shannon(dist: Vec<f64>) -> PyResult<f64> {
    Ok(shannon_entropy(&ProbVector::new(dist, &GlobalConfig::default()).map_err(err)?))
}

/// `(id, description)` for every verifier.
#[pyfunction]
fn verifiers() -> Vec<(&'static str, &'static str)> {
    harness::VERIFIERS.to_vec()
}

/// Runs a verifier and returns its JSON report. `params` is a JSON object with the
/// same fields as the CLI config file's `params`.
#[pyfunction]
#[pyo3(signature = (id, params=None, seed=0))]
fn verify(py: Python<'_>, id: &str, params: Option<&str>, seed: u64) -> PyResult<String> {
    let mut p: VerifyParams = match params {
        Some(text) => serde_json::from_str(text).map_err(err)?,
        None => VerifyParams::default(),
    };
    p.seed = seed;
    let id = id.to_string();
    let report = py.detach(move || harness::run(&id, &p, &GlobalConfig::default())).map_err(err)?;
    Ok(report.to_json_string())
}

#[pymodule]
fn gaussopt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(g, m)?)?;
    m.add_function(wrap_pyfunction!(g_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(thin, m)?)?;
    m.add_function(wrap_pyfunction!(shannon, m)?)?;
    m.add_function(wrap_pyfunction!(verifiers, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
