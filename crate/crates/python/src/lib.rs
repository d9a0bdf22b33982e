//! Python module `pysubdiff`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use subdiff::cli::{config::validate, execute, parse_config};
use subdiff::frackernel::{self as fk, L1Weights, TimeGrid};
use subdiff::{fode, mlf, spatial};

fn err(e: subdiff::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn grid(horizon: f64, steps: usize, graded: Option<f64>) -> PyResult<TimeGrid> {
    match graded {
        Some(alpha) => TimeGrid::graded_for_order(horizon, steps, alpha),
        None => TimeGrid::uniform(horizon, steps),
    }
    .map_err(err)
}

/// `t^{β−1}/Γ(β)`.
#[pyfunction]
fn rl_kernel(beta: f64, t: f64) -> PyResult<f64> {
    fk::rl_kernel(beta, t).map_err(err)
}

/// Returns `(value, method, error_estimate, flagged)`.
#[pyfunction]
fn mittag_leffler(alpha: f64, z: f64) -> PyResult<(f64, String, f64, bool)> {
    let e = mlf::mittag_leffler(alpha, z).map_err(err)?;
    Ok((e.value, format!("{:?}", e.method).to_lowercase(), e.error_estimate, e.flagged))
}

/// Time nodes; pass `alpha` for the graded mesh matched to that order.
#[pyfunction]
#[pyo3(signature = (horizon, steps, alpha=None))]
fn time_grid(horizon: f64, steps: usize, alpha: Option<f64>) -> PyResult<Vec<f64>> {
    Ok(grid(horizon, steps, alpha)?.nodes().to_vec())
}

/// Row `n` of the L1 weights, `[w_{n,1}, …, w_{n,n}]`.
#[pyfunction]
#[pyo3(signature = (alpha, horizon, steps, n, graded=false))]
fn l1_weights(alpha: f64, horizon: f64, steps: usize, n: usize, graded: bool) -> PyResult<Vec<f64>> {
    let g = grid(horizon, steps, graded.then_some(alpha))?;
    if n == 0 || n > steps {
        return Err(PyValueError::new_err(format!("row must lie in 1..={steps}")));
    }
    Ok(L1Weights::new(alpha, &g).map_err(err)?.row(n))
}

#[pyfunction]
fn relaxation_solution(alpha: f64, rate: f64, initial: f64, t: f64) -> PyResult<f64> {
    fode::relaxation_solution(alpha, rate, initial, t).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (alpha, rate, initial, horizon, steps, graded=true))]
fn solve_relaxation_l1(alpha: f64, rate: f64, initial: f64, horizon: f64, steps: usize, graded: bool) -> PyResult<Vec<f64>> {
    let g = grid(horizon, steps, graded.then_some(alpha))?;
    fode::solve_relaxation_l1(alpha, rate, initial, &g).map_err(err)
}

/// Returns `(holds, min_margin, margins)` for a scalar history on the given grid.
#[pyfunction]
#[pyo3(signature = (alpha, history, horizon, graded=false))]
fn check_convexity(alpha: f64, history: Vec<f64>, horizon: f64, graded: bool) -> PyResult<(bool, f64, Vec<f64>)> {
    if history.len() < 2 {
        return Err(PyValueError::new_err("history needs at least two values"));
    }
    let g = grid(horizon, history.len() - 1, graded.then_some(alpha))?;
    let w = L1Weights::new(alpha, &g).map_err(err)?;
    let r = fk::check_discrete_convexity(&w, &history).map_err(err)?;
    Ok((r.holds, r.min_margin, r.margins))
}

/// `(continuous, discrete)` first Dirichlet eigenvalue of the box.
#[pyfunction]
fn poincare(extents: Vec<(f64, f64)>, points: Vec<usize>) -> PyResult<(f64, f64)> {
    let g = spatial::build_grid(&extents, &points).map_err(err)?;
    let p = spatial::poincare_lambda1(&g).map_err(err)?;
    Ok((p.continuous, p.discrete))
}

/// Solves a TOML-configured problem without writing files. The result holds
/// `times`, `fields`, `shape` and `report` (the parsed run report).
#[pyfunction]
fn run<'py>(py: Python<'py>, config: &str) -> PyResult<Bound<'py, PyDict>> {
    let c = parse_config(config).map_err(err)?;
    let problems = validate(&c);
    if !problems.is_empty() {
        return Err(PyValueError::new_err(problems.join("\n")));
    }
    let (report, traj, spec) = execute(&c).map_err(err)?;
    let json = serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let out = PyDict::new(py);
    out.set_item("times", traj.times)?;
    out.set_item("fields", traj.fields)?;
    out.set_item("shape", spec.space.points().to_vec())?;
    out.set_item("report", py.import("json")?.call_method1("loads", (json,))?)?;
    Ok(out)
}

#[pymodule]
fn pysubdiff(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(rl_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(mittag_leffler, m)?)?;
    m.add_function(wrap_pyfunction!(time_grid, m)?)?;
    m.add_function(wrap_pyfunction!(l1_weights, m)?)?;
    m.add_function(wrap_pyfunction!(relaxation_solution, m)?)?;
    m.add_function(wrap_pyfunction!(solve_relaxation_l1, m)?)?;
    m.add_function(wrap_pyfunction!(check_convexity, m)?)?;
    m.add_function(wrap_pyfunction!(poincare, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
