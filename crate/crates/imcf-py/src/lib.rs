//! Python bindings for the flow solver: ambient-geometry probes, the exact
//! round solution, full time integrations with invariant checking, and the
//! randomized geometry audit.
//!
//! Build with `cargo build --release -p imcf-py`, rename the produced
//! `libimcf_py.so` to `imcf_py.so` (or `.pyd` on Windows), and import it.

// The #[pyfunction] expansion inserts identity conversions on PyErr.
#![allow(clippy::useless_conversion)]

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use imcf_core::config::FlowConfig;
use imcf_core::discretization::Grid;
use imcf_core::flow::{self, FlowMode};
use imcf_core::graph_geometry::{geometry_into, GeometryFields, GraphPointData, PointGuards};
use imcf_core::monitors;
use imcf_core::{base_geometry, geometry_checks, Error};

/// Configuration and input problems become `ValueError`; guard trips and
/// internal inconsistencies become `RuntimeError`.
fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Input(_) | Error::Io(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Lorentzian inner product x₁y₁ + … + xₙyₙ − x_{n+1}y_{n+1}.
#[pyfunction]
fn minkowski_inner(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    base_geometry::minkowski_inner(&x, &y).map_err(to_py)
}

/// Embed a chart point y ∈ ℝⁿ onto the unit hyperboloid: (y, √(1+|y|²)).
#[pyfunction]
fn chart_embed(y: Vec<f64>) -> Vec<f64> {
    base_geometry::chart_embed(&y)
}

/// Induced metric σ_ij, its inverse, and det σ at a chart point.
#[pyfunction]
fn metric_sigma<'py>(py: Python<'py>, y: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let m = base_geometry::metric_sigma(&y);
    let d = PyDict::new_bound(py);
    d.set_item("sigma", m.sigma.clone())?;
    d.set_item("sigma_inv", m.sigma_inv.clone())?;
    d.set_item("sqrt_det", m.sqrt_det)?;
    Ok(d)
}

/// Gauge factor Θ(t, c) = e^{−t/n + c} linking the raw and rescaled flows.
#[pyfunction]
fn theta(t: f64, c: f64, n: usize) -> f64 {
    flow::theta(t, c, n)
}

/// Exact round solution: returns (u, H) = (r₀e^{−t/n}, n/u).
#[pyfunction]
fn round_solution(r0: f64, n: usize, t: f64) -> (f64, f64) {
    let s = monitors::round_solution(r0, n, t);
    (s.u, s.h_mean)
}

/// Area of the geodesic cap of radius rho_max in the unit hyperboloid,
/// via the same quadrature the solver uses.
#[pyfunction]
#[pyo3(signature = (n, rho_max, cells = 256))]
fn cap_area(n: usize, rho_max: f64, cells: usize) -> PyResult<f64> {
    use imcf_core::discretization::GridMode;
    let g = Grid::build(GridMode::Radial, n, rho_max, cells, 1).map_err(to_py)?;
    Ok(g.cap_area())
}

/// Pointwise geometry of the graph u over the cap from analytic derivatives:
/// `y`, gradient `du`, and covariant Hessian `hess_u` (row-major n×n).
/// Returns v, H, |Dφ|², the support function w, the area element, the
/// past-directed unit normal, and the induced metric.
#[pyfunction]
fn graph_point<'py>(
    py: Python<'py>,
    y: Vec<f64>,
    u: f64,
    du: Vec<f64>,
    hess_u: Vec<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let n = y.len();
    if du.len() != n || hess_u.len() != n * n {
        return Err(PyValueError::new_err(format!(
            "expected du of length {n} and hess_u of length {}, got {} and {}",
            n * n,
            du.len(),
            hess_u.len()
        )));
    }
    let p = GraphPointData { y, u, du, hess_u };
    let mut gf = GeometryFields::new(n);
    geometry_into(p.view(), PointGuards::default(), &mut gf).map_err(to_py)?;
    let d = PyDict::new_bound(py);
    d.set_item("v", gf.v)?;
    d.set_item("H", gf.h_mean)?;
    d.set_item("grad_phi_sq", gf.grad_phi_sq)?;
    d.set_item("support_w", gf.support_w)?;
    d.set_item("area_element", gf.area_element)?;
    d.set_item("normal", gf.normal.clone())?;
    d.set_item("g", gf.g.clone())?;
    d.set_item("second_fundamental", gf.second_fundamental.clone())?;
    Ok(d)
}

fn checks_to_py<'py>(
    py: Python<'py>,
    rep: &monitors::InvariantReport,
) -> PyResult<Bound<'py, PyList>> {
    let list = PyList::empty_bound(py);
    for c in &rep.checks {
        let d = PyDict::new_bound(py);
        d.set_item("name", c.name)?;
        d.set_item("verdict", c.verdict.to_string())?;
        d.set_item("worst_violation", c.worst_violation)?;
        d.set_item("worst_t", c.worst_t)?;
        d.set_item("detail", &c.detail)?;
        list.append(d)?;
    }
    Ok(list)
}

/// Integrate the flow described by `config` (same `key = value` text the CLI
/// accepts; omitted keys take their defaults) and run the invariant monitors.
///
/// Returns a dict with the trajectory columns under their CSV names, the
/// final pointwise state under "final", the step count, the monitor results
/// under "checks", and "all_passed".
#[pyfunction]
#[pyo3(signature = (config = "", rescaled = false))]
fn run<'py>(py: Python<'py>, config: &str, rescaled: bool) -> PyResult<Bound<'py, PyDict>> {
    let cfg = FlowConfig::parse_str(config).map_err(to_py)?;
    let mode = if rescaled {
        FlowMode::Rescaled
    } else {
        FlowMode::Raw
    };
    let out = flow::evolve(&cfg, mode).map_err(to_py)?;

    let d = PyDict::new_bound(py);
    macro_rules! column {
        ($name:literal, $field:ident) => {
            d.set_item(
                $name,
                out.records.iter().map(|r| r.$field).collect::<Vec<f64>>(),
            )?;
        };
    }
    column!("t", t);
    column!("min_u", min_u);
    column!("max_u", max_u);
    column!("min_phi", min_phi);
    column!("max_phi", max_phi);
    column!("min_phidot", min_phidot);
    column!("max_phidot", max_phidot);
    column!("max_grad_phi", max_grad_phi);
    column!("min_H_theta", min_h_theta);
    column!("max_H_theta", max_h_theta);
    column!("area", area);
    column!("rescaled_area", rescaled_area);
    column!("osc_rescaled_u", osc_rescaled_u);
    column!("dt_used", dt_used);
    d.set_item("steps", out.steps)?;

    let rows = flow::snapshot_rows(&out.state).map_err(to_py)?;
    let fin = PyDict::new_bound(py);
    fin.set_item("t", out.state.t)?;
    fin.set_item("c", out.state.c)?;
    fin.set_item("mode", out.state.mode.to_string())?;
    fin.set_item(
        "coord1",
        rows.iter().map(|r| r.coord1).collect::<Vec<f64>>(),
    )?;
    if rows.first().is_some_and(|r| r.coord2.is_some()) {
        fin.set_item(
            "coord2",
            rows.iter()
                .map(|r| r.coord2.unwrap_or(f64::NAN))
                .collect::<Vec<f64>>(),
        )?;
    }
    fin.set_item("u", rows.iter().map(|r| r.u).collect::<Vec<f64>>())?;
    fin.set_item("v", rows.iter().map(|r| r.v).collect::<Vec<f64>>())?;
    fin.set_item("H", rows.iter().map(|r| r.h).collect::<Vec<f64>>())?;
    fin.set_item(
        "grad_phi",
        rows.iter().map(|r| r.grad_phi).collect::<Vec<f64>>(),
    )?;
    d.set_item("final", fin)?;

    let grid =
        Grid::build(cfg.mode, cfg.n, cfg.rho_max, cfg.cells, cfg.cells_theta).map_err(to_py)?;
    let ctx = cfg.monitor_context(mode, grid.cap_area(), grid.h);
    let rep = monitors::check_trajectory(&out.records, &ctx).map_err(to_py)?;
    d.set_item("checks", checks_to_py(py, &rep)?)?;
    d.set_item("all_passed", rep.all_passed())?;
    Ok(d)
}

/// Run the randomized self-audit of the base and graph geometry in dimension
/// `n`; returns a list of {name, worst, tol, pass} dicts.
#[pyfunction]
#[pyo3(signature = (n = 2))]
fn geometry_check<'py>(py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyList>> {
    let list = PyList::empty_bound(py);
    for c in geometry_checks::run_all(n) {
        let d = PyDict::new_bound(py);
        d.set_item("name", c.name)?;
        d.set_item("worst", c.worst)?;
        d.set_item("tol", c.tol)?;
        d.set_item("pass", c.pass)?;
        list.append(d)?;
    }
    Ok(list)
}

#[pymodule]
fn imcf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(minkowski_inner, m)?)?;
    m.add_function(wrap_pyfunction!(chart_embed, m)?)?;
    m.add_function(wrap_pyfunction!(metric_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    m.add_function(wrap_pyfunction!(round_solution, m)?)?;
    m.add_function(wrap_pyfunction!(cap_area, m)?)?;
    m.add_function(wrap_pyfunction!(graph_point, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(geometry_check, m)?)?;
    Ok(())
}
