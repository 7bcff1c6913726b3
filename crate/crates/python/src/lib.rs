//! Python bindings. Scalars cross the boundary as strings (`"3/8"`,
//! `"0.125"`) so exact values survive; reports come back as JSON text.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use nicety::density::{kernel_vector, min_singular_oracle, span_is_dense, PerturbationPair};
use nicety::lab::{check_fge1, random_module, vanishing_characters};
use nicety::lemmas::{balanced_mass, boundary_bump, BumpSpec, LemmaError};
use nicety::pipeline::{
    build_tower, default_test_functions, nonniceness_certificate, norm_bound_suite, CertificateOptions, TowerMode,
};
use nicety::pw::svc_set as build_svc;
use nicety::scalar::parse_rational;
use nicety::{Scalar, Q};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse(s: &str) -> PyResult<Q> {
    parse_rational(s).map_err(value_err)
}

fn to_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

/// Components (as `[lo, hi]` string pairs) and measure of the stage-`depth` fat Cantor set, as JSON.
#[pyfunction]
fn svc_set(depth: u32) -> PyResult<String> {
    let k = build_svc(depth).map_err(value_err)?;
    Ok(to_json(&k.to_json_value()))
}

/// `(verdict, pairing, sigma_min, kernel_vector or None)` for exact rational inputs.
#[pyfunction]
fn span_is_dense_exact(gamma: Vec<String>, delta: Vec<String>) -> PyResult<(String, String, f64, Option<Vec<String>>)> {
    let gamma = gamma.iter().map(|s| parse(s)).collect::<PyResult<Vec<_>>>()?;
    let delta = delta.iter().map(|s| parse(s)).collect::<PyResult<Vec<_>>>()?;
    let pair = PerturbationPair::new(gamma, delta).map_err(value_err)?;
    let report = span_is_dense(&pair);
    let kernel = kernel_vector(&pair).map(|v| v.iter().map(Scalar::to_decimal_string).collect());
    let verdict = serde_json::to_value(report.verdict).expect("enum serializes");
    Ok((verdict.as_str().unwrap_or_default().to_string(), report.sum.to_decimal_string(), min_singular_oracle(&pair), kernel))
}

/// Certificate of the boundary bump as JSON.
#[pyfunction]
fn bump_certificate(alpha: &str, beta: &str, a: &str, b: &str, eps: &str) -> PyResult<String> {
    let spec = BumpSpec::new(parse(alpha)?, parse(beta)?, parse(a)?, parse(b)?, parse(eps)?).map_err(value_err)?;
    let bump = boundary_bump(&spec).map_err(value_err)?;
    Ok(to_json(&bump.certificate()))
}

/// Residual norm `|B + chi|_2` of the balanced-mass construction; raises on infeasibility.
#[pyfunction]
fn balanced_mass_residual(depth: u32, eps: &str) -> PyResult<f64> {
    let k = build_svc(depth).map_err(value_err)?;
    match balanced_mass(&k, &parse(eps)?) {
        Ok(r) => Ok(r.residual_norm()),
        Err(e @ LemmaError::Infeasible { .. }) => Err(PyRuntimeError::new_err(e.to_string())),
        Err(e) => Err(value_err(e)),
    }
}

/// `(agrees, is_full, number of vanishing characters)` for a seeded finite module.
#[pyfunction]
fn fge1(seed: u64) -> (bool, bool, usize) {
    let m = random_module(seed);
    (check_fge1(&m), m.is_full(), vanishing_characters(&m).len())
}

/// The non-niceness certificate as JSON; `samples > 0` adds the float norm-bound suite.
#[pyfunction]
#[pyo3(signature = (depth, order, grid = 101, seed = 0, samples = 0))]
fn certify(py: Python<'_>, depth: u32, order: usize, grid: usize, seed: u64, samples: usize) -> PyResult<String> {
    py.detach(|| {
        let k = build_svc(depth).map_err(value_err)?;
        let tower = build_tower(&k, order, TowerMode::BestEffort).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        let opts = CertificateOptions { grid };
        let cert = nonniceness_certificate(&tower, &default_test_functions::<Q>(), &opts)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        let cert = if samples > 0 { cert.with_norm_bounds(norm_bound_suite(&tower.to_f64(), seed, samples)) } else { cert };
        Ok(cert.to_json())
    })
}

#[pymodule]
fn nicety_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(svc_set, m)?)?;
    m.add_function(wrap_pyfunction!(span_is_dense_exact, m)?)?;
    m.add_function(wrap_pyfunction!(bump_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(balanced_mass_residual, m)?)?;
    m.add_function(wrap_pyfunction!(fge1, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    Ok(())
}
