//! Geometry of the base hyperbolic plane `H^n(1)` in its global graph chart,
//! plus the ambient Minkowski algebra.
//!
//! The chart is `x(y) = (y, sqrt(1 + |y|^2))`, `y` ranging over `R^n`; it
//! parameterizes the upper unit hyperboloid `<x, x>_L = -1`. All index
//! juggling below is with respect to this chart. Closed forms:
//!
//! ```text
//! sigma_ij   = delta_ij - y_i y_j / (1 + |y|^2)
//! sigma^ij   = delta_ij + y_i y_j
//! det sigma  = 1 / (1 + |y|^2)
//! Gamma^k_ij = -sigma_ij(y) * y_k
//! ```
//!
//! Each closed form is cross-checked against finite-difference oracles (the
//! pullback of the Minkowski inner product, FD Christoffel assembly, the
//! constant-curvature identity) in this module's tests and in
//! [`crate::geometry_checks`].

use crate::{Error, Result};

/// Ambient vectors are length `n + 1` slices; index `n` is the time
/// component. The Minkowski inner product is
/// `<a, b>_L = sum_i a_i b_i - a_n b_n`.
pub fn minkowski_inner(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Input(format!(
            "minkowski_inner: dimension mismatch ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 3 {
        return Err(Error::Input(format!(
            "minkowski_inner: ambient dimension must be at least 3, got {}",
            a.len()
        )));
    }
    let n = a.len() - 1;
    let mut s = 0.0;
    for i in 0..n {
        s += a[i] * b[i];
    }
    Ok(s - a[n] * b[n])
}

/// Embeds a chart point into the ambient space: `x(y) = (y, sqrt(1+|y|^2))`.
/// The result satisfies `<x, x>_L = -1` up to roundoff.
pub fn chart_embed(y: &[f64]) -> Vec<f64> {
    let mut x = Vec::with_capacity(y.len() + 1);
    x.extend_from_slice(y);
    x.push((1.0 + dot(y, y)).sqrt());
    x
}

/// The base metric and derived quantities at one chart point.
#[derive(Debug, Clone)]
pub struct MetricSample {
    pub n: usize,
    /// `sigma_ij`, row-major `n x n`.
    pub sigma: Vec<f64>,
    /// `sigma^ij`, row-major `n x n`.
    pub sigma_inv: Vec<f64>,
    /// `sqrt(det sigma) = 1 / sqrt(1 + |y|^2)`.
    pub sqrt_det: f64,
}

impl MetricSample {
    /// Zero-filled sample with buffers sized for chart dimension `n`.
    pub fn new(n: usize) -> Self {
        MetricSample {
            n,
            sigma: vec![0.0; n * n],
            sigma_inv: vec![0.0; n * n],
            sqrt_det: 0.0,
        }
    }
}

/// Evaluates the closed forms for `sigma`, `sigma^{-1}` and `sqrt(det sigma)`.
pub fn metric_sigma(y: &[f64]) -> MetricSample {
    let n = y.len();
    let mut sample = MetricSample {
        n,
        sigma: vec![0.0; n * n],
        sigma_inv: vec![0.0; n * n],
        sqrt_det: 0.0,
    };
    metric_sigma_into(y, &mut sample);
    sample
}

/// Allocation-free variant of [`metric_sigma`]; `sample` must be sized for
/// `y.len()`.
pub fn metric_sigma_into(y: &[f64], sample: &mut MetricSample) {
    let n = y.len();
    debug_assert!(sample.sigma.len() == n * n && sample.sigma_inv.len() == n * n);
    sample.n = n;
    let w = 1.0 + dot(y, y);
    for i in 0..n {
        for j in 0..n {
            let d = if i == j { 1.0 } else { 0.0 };
            sample.sigma[i * n + j] = d - y[i] * y[j] / w;
            sample.sigma_inv[i * n + j] = d + y[i] * y[j];
        }
    }
    sample.sqrt_det = 1.0 / w.sqrt();
}

/// Christoffel symbols of `sigma` in the graph chart, written into `out` as
/// `out[k*n*n + i*n + j] = Gamma^k_ij`. Closed form `Gamma^k_ij =
/// -sigma_ij * y_k` (validated against the FD assembly from metric
/// derivatives in the audit suite).
pub fn christoffel_sigma_into(y: &[f64], out: &mut [f64]) {
    let n = y.len();
    debug_assert_eq!(out.len(), n * n * n);
    let w = 1.0 + dot(y, y);
    for i in 0..n {
        for j in 0..n {
            let d = if i == j { 1.0 } else { 0.0 };
            let sij = d - y[i] * y[j] / w;
            for k in 0..n {
                out[k * n * n + i * n + j] = -sij * y[k];
            }
        }
    }
}

/// Allocating wrapper around [`christoffel_sigma_into`].
pub fn christoffel_sigma(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut out = vec![0.0; n * n * n];
    christoffel_sigma_into(y, &mut out);
    out
}

/// Maps geodesic polar coordinates `(rho, omega)` (with `omega` a Euclidean
/// unit vector in `R^n`) to the chart point `y = sinh(rho) * omega` and its
/// ambient embedding `(sinh(rho) * omega, cosh(rho))`.
///
/// `rho` is the geodesic distance from the chart origin (the hyperboloid
/// pole), which the distance oracle in the tests confirms.
pub fn polar_lift(rho: f64, omega: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if rho < 0.0 || !rho.is_finite() {
        return Err(Error::Input(format!(
            "polar_lift: rho must be finite and >= 0, got {rho}"
        )));
    }
    if omega.len() < 2 {
        return Err(Error::Input(
            "polar_lift: direction must have dimension >= 2".into(),
        ));
    }
    let norm = dot(omega, omega).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Input(format!(
            "polar_lift: |omega| must be 1 (got |omega| = {norm:.17e})"
        )));
    }
    let s = rho.sinh();
    let y: Vec<f64> = omega.iter().map(|w| s * w).collect();
    let mut ambient = y.clone();
    ambient.push(rho.cosh());
    Ok((y, ambient))
}

/// Geodesic distance between two points of `H^n(1)` given by their ambient
/// embeddings: `acosh(-<x1, x2>_L)`.
pub fn geodesic_distance(x1: &[f64], x2: &[f64]) -> Result<f64> {
    let ip = minkowski_inner(x1, x2)?;
    // Roundoff can push -ip slightly below 1 for near-identical points.
    Ok((-ip).max(1.0).acosh())
}

///// Surface area of the unit sphere `S^{n-1}` in `R^n` (`n >= 1`):
/// `A(1) = 2`, `A(2) = 2 pi`, `A(n) = 2 pi A(n-2) / (n-2)`.
pub fn unit_sphere_area(n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI * unit_sphere_area(n - 2) / (n - 2) as f64,
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
