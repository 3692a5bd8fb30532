//! Pointwise extrinsic geometry of a spacelike radial graph.
//!
//! A positive scalar field `u` over the unit-hyperboloid cap defines the
//! hypersurface `X(y) = u(y) x(y)`, where `x(y)` is the chart embedding from
//! [`crate::base_geometry`].  Given the point data `(y, u, Du, D²u)` — with
//! `D²u` the covariant Hessian with respect to the cap metric — this module
//! produces every derived quantity the evolution and its invariant checks
//! need: the spacelike factor `v`, induced metric, past-directed unit normal,
//! second fundamental form, shape operator, mean curvature, support function
//! and area element.
//!
//! The mean curvature is computed along two independent algebraic routes
//! (trace of the shape operator, and the quotient form in `phi = ln u` that
//! the evolution equation is written in).  The two must agree to near machine
//! precision; a mismatch aborts the computation because it means the kernel's
//! own algebra is inconsistent for that input.

use crate::base_geometry::{self, MetricSample};
use crate::discretization::{self, Field, GridMode};
use crate::tolerances;
use crate::{Error, GuardKind, Result};

/// Thresholds below which a point is rejected as leaving the admissible
/// class (strictly spacelike, strictly mean-convex, positive radius).
#[derive(Clone, Copy, Debug)]
pub struct PointGuards {
    /// Reject when `v² = 1 - |D ln u|²` falls to or below this.
    pub eps_spacelike: f64,
    /// Reject when the mean curvature falls to or below this.
    pub eps_mean_convex: f64,
}

impl Default for PointGuards {
    fn default() -> Self {
        Self {
            eps_spacelike: tolerances::EPS_SPACELIKE,
            eps_mean_convex: tolerances::EPS_MEAN_CONVEX,
        }
    }
}

/// Borrowed view of the data defining the graph at one point.
///
/// * `y` — chart coordinates (length `n`),
/// * `u` — graph radius (must be positive),
/// * `du` — chart gradient `∂u/∂y_i` (length `n`),
/// * `hess_u` — covariant Hessian `u_{;ij}` (row-major, length `n²`).
#[derive(Clone, Copy, Debug)]
pub struct GraphPointView<'a> {
    pub y: &'a [f64],
    pub u: f64,
    pub du: &'a [f64],
    pub hess_u: &'a [f64],
}

/// Owned variant of [`GraphPointView`], convenient for tests and bindings.
#[derive(Clone, Debug)]
pub struct GraphPointData {
    pub y: Vec<f64>,
    pub u: f64,
    pub du: Vec<f64>,
    pub hess_u: Vec<f64>,
}

impl GraphPointData {
    pub fn view(&self) -> GraphPointView<'_> {
        GraphPointView {
            y: &self.y,
            u: self.u,
            du: &self.du,
            hess_u: &self.hess_u,
        }
    }
}

/// Full set of derived pointwise quantities, with reusable buffers so the
/// hot loop never allocates.  Create once per thread with [`GeometryFields::new`]
/// and refill with [`geometry_into`].
#[derive(Clone, Debug)]
pub struct GeometryFields {
    pub n: usize,
    /// Spacelike factor `v = sqrt(1 - |D ln u|²_σ)`.
    pub v: f64,
    /// Squared cap-metric gradient of `phi = ln u`.
    pub grad_phi_sq: f64,
    /// Mean curvature `H = g^{ij} h_{ij}` (quotient form; cross-checked).
    pub h_mean: f64,
    /// Squared norm of the second fundamental form, `|A|² = h^i_j h^j_i`.
    pub a_norm_sq: f64,
    /// Support function `w = <X, ν> = u / v` (Lorentzian inner product).
    pub support_w: f64,
    /// Area element `u^n v sqrt(det σ)` relative to the chart volume `dy`.
    pub area_element: f64,
    /// Induced metric `g_{ij} = u² σ_ij - u_i u_j` (row-major `n×n`).
    pub g: Vec<f64>,
    /// Inverse induced metric (row-major `n×n`).
    pub g_inv: Vec<f64>,
    /// Second fundamental form `h_{ij}` w.r.t. the past-directed normal.
    pub second_fundamental: Vec<f64>,
    /// Shape operator `h^i_j = g^{ik} h_{kj}` (row-major `n×n`).
    pub shape: Vec<f64>,
    /// Past-directed timelike unit normal in ambient coordinates
    /// (length `n+1`, last slot is the time component).
    pub normal: Vec<f64>,
    metric: MetricSample,
    du_up: Vec<f64>,
}

impl GeometryFields {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            v: 0.0,
            grad_phi_sq: 0.0,
            h_mean: 0.0,
            a_norm_sq: 0.0,
            support_w: 0.0,
            area_element: 0.0,
            g: vec![0.0; n * n],
            g_inv: vec![0.0; n * n],
            second_fundamental: vec![0.0; n * n],
            shape: vec![0.0; n * n],
            normal: vec![0.0; n + 1],
            metric: MetricSample::new(n),
            du_up: vec![0.0; n],
        }
    }
}

/// Compute every derived quantity for one point into `out`.
///
/// Errors:
/// * [`Error::Input`] for malformed dimensions or non-finite / non-positive `u`;
/// * [`Error::Guard`] (spacelike) when `v²` falls to `eps_spacelike` or below;
/// * [`Error::Guard`] (mean-convexity) when `H` falls to `eps_mean_convex` or below;
/// * [`Error::Internal`] when the two mean-curvature routes disagree.
pub fn geometry_into(
    p: GraphPointView<'_>,
    guards: PointGuards,
    out: &mut GeometryFields,
) -> Result<()> {
    let n = out.n;
    if p.y.len() != n || p.du.len() != n || p.hess_u.len() != n * n {
        return Err(Error::Input(format!(
            "graph point dimensions ({}, {}, {}) do not match kernel dimension n = {}",
            p.y.len(),
            p.du.len(),
            p.hess_u.len(),
            n
        )));
    }
    let u = p.u;
    if !u.is_finite() || u <= 0.0 {
        return Err(Error::Guard {
            kind: GuardKind::Positivity,
            detail: format!("graph radius u = {u:.6e} is not a positive finite number"),
        });
    }

    base_geometry::metric_sigma_into(p.y, &mut out.metric);
    let m = &out.metric;

    // Raised gradient and the spacelike factor.
    let mut grad_u_sq = 0.0;
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            s += m.sigma_inv[i * n + j] * p.du[j];
        }
        out.du_up[i] = s;
        grad_u_sq += s * p.du[i];
    }
    let grad_phi_sq = grad_u_sq / (u * u);
    let v_sq = 1.0 - grad_phi_sq;
    if v_sq <= guards.eps_spacelike {
        return Err(Error::Guard {
            kind: GuardKind::Spacelike,
            detail: format!(
                "v^2 = 1 - |D ln u|^2 = {v_sq:.6e} <= eps_spacelike = {:.1e}",
                guards.eps_spacelike
            ),
        });
    }
    let v = v_sq.sqrt();
    out.v = v;
    out.grad_phi_sq = grad_phi_sq;

    // Induced metric, its inverse, and the second fundamental form.
    for i in 0..n {
        for j in 0..n {
            let sij = m.sigma[i * n + j];
            out.g[i * n + j] = u * u * sij - p.du[i] * p.du[j];
            out.g_inv[i * n + j] =
                (m.sigma_inv[i * n + j] + out.du_up[i] * out.du_up[j] / (u * u * v_sq)) / (u * u);
            out.second_fundamental[i * n + j] =
                -(2.0 * p.du[i] * p.du[j] / u - p.hess_u[i * n + j] - u * sij) / v;
        }
    }

    // Shape operator, trace route for H, and |A|².
    crate::linalg::matmul(n, &out.g_inv, &out.second_fundamental, &mut out.shape);
    let h_trace = crate::linalg::trace(n, &out.shape);
    let mut a_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            a_sq += out.shape[i * n + j] * out.shape[j * n + i];
        }
    }
    out.a_norm_sq = a_sq;

    // Quotient route for H, written in phi = ln u:
    //   H = (n + (σ^{ij} + φ^i φ^j / v²) φ_{;ij}) / (u v).
    let mut contraction = 0.0;
    for i in 0..n {
        for j in 0..n {
            let phi_ij = p.hess_u[i * n + j] / u - p.du[i] * p.du[j] / (u * u);
            let phi_up_i = out.du_up[i] / u;
            let phi_up_j = out.du_up[j] / u;
            contraction += (m.sigma_inv[i * n + j] + phi_up_i * phi_up_j / v_sq) * phi_ij;
        }
    }
    let h_quotient = (n as f64 + contraction) / (u * v);

    let route_gap = (h_trace - h_quotient).abs();
    if route_gap > tolerances::KERNEL_ROUTE_TOL * h_quotient.abs().max(1.0) {
        return Err(Error::Internal(format!(
            "mean-curvature routes disagree: trace = {h_trace:.16e}, quotient = {h_quotient:.16e}"
        )));
    }
    let h = h_quotient;
    if h <= guards.eps_mean_convex {
        return Err(Error::Guard {
            kind: GuardKind::MeanConvexity,
            detail: format!(
                "H = {h:.6e} <= eps_mean_convex = {:.1e}",
                guards.eps_mean_convex
            ),
        });
    }
    out.h_mean = h;

    // Support function and area element.
    out.support_w = u / v;
    out.area_element = u.powi(n as i32) * v * m.sqrt_det;

    // Past-directed unit normal: ν = -(x + u^{-1} u^j x_j) / v in ambient
    // coordinates, with x_j = (e_j, y_j / x_{n+1}).
    let time = 1.0 / m.sqrt_det; // x_{n+1} = sqrt(1 + |y|²)
    let mut time_comp = time;
    for i in 0..n {
        out.normal[i] = -(p.y[i] + out.du_up[i] / u) / v;
        time_comp += out.du_up[i] * p.y[i] / (u * time);
    }
    out.normal[n] = -time_comp / v;

    Ok(())
}

/// Spacelike factor `v` at one point (allocating convenience wrapper).
pub fn spacelike_factor(p: GraphPointView<'_>, guards: PointGuards) -> Result<f64> {
    let n = p.y.len();
    if p.du.len() != n {
        return Err(Error::Input(format!(
            "gradient length {} does not match chart dimension {}",
            p.du.len(),
            n
        )));
    }
    if !p.u.is_finite() || p.u <= 0.0 {
        return Err(Error::Guard {
            kind: GuardKind::Positivity,
            detail: format!(
                "graph radius u = {:.6e} is not a positive finite number",
                p.u
            ),
        });
    }
    let m = base_geometry::metric_sigma(p.y);
    let mut grad_u_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            grad_u_sq += m.sigma_inv[i * n + j] * p.du[i] * p.du[j];
        }
    }
    let v_sq = 1.0 - grad_u_sq / (p.u * p.u);
    if v_sq <= guards.eps_spacelike {
        return Err(Error::Guard {
            kind: GuardKind::Spacelike,
            detail: format!(
                "v^2 = 1 - |D ln u|^2 = {v_sq:.6e} <= eps_spacelike = {:.1e}",
                guards.eps_spacelike
            ),
        });
    }
    Ok(v_sq.sqrt())
}

/// Induced metric data at one point.
pub struct InducedMetric {
    pub g: Vec<f64>,
    pub g_inv: Vec<f64>,
    pub area_element: f64,
}

pub fn induced_metric(p: GraphPointView<'_>, guards: PointGuards) -> Result<InducedMetric> {
    let mut gf = GeometryFields::new(p.y.len());
    geometry_into(p, guards, &mut gf)?;
    Ok(InducedMetric {
        g: gf.g,
        g_inv: gf.g_inv,
        area_element: gf.area_element,
    })
}

/// Past-directed timelike unit normal in ambient coordinates (length `n+1`).
pub fn graph_normal(p: GraphPointView<'_>, guards: PointGuards) -> Result<Vec<f64>> {
    let mut gf = GeometryFields::new(p.y.len());
    geometry_into(p, guards, &mut gf)?;
    Ok(gf.normal)
}

/// Second fundamental form `h_{ij}` w.r.t. the past-directed normal.
pub fn second_fundamental(p: GraphPointView<'_>, guards: PointGuards) -> Result<Vec<f64>> {
    let mut gf = GeometryFields::new(p.y.len());
    geometry_into(p, guards, &mut gf)?;
    Ok(gf.second_fundamental)
}

/// Mean curvature together with the shape operator and `|A|²`.
pub struct MeanCurvatureData {
    pub h_mean: f64,
    pub shape: Vec<f64>,
    pub a_norm_sq: f64,
}

pub fn mean_curvature(p: GraphPointView<'_>, guards: PointGuards) -> Result<MeanCurvatureData> {
    let mut gf = GeometryFields::new(p.y.len());
    geometry_into(p, guards, &mut gf)?;
    Ok(MeanCurvatureData {
        h_mean: gf.h_mean,
        shape: gf.shape,
        a_norm_sq: gf.a_norm_sq,
    })
}

/// Support function `w = <X, ν> = u / v`.
pub fn support_function(p: GraphPointView<'_>, guards: PointGuards) -> Result<f64> {
    let v = spacelike_factor(p, guards)?;
    Ok(p.u / v)
}

/// Pointwise quantities for a rotationally symmetric profile `u(ρ)`:
/// the full kernel reduced to the geodesic polar radius.
#[derive(Clone, Copy, Debug)]
pub struct RadialPoint {
    pub v: f64,
    pub h_mean: f64,
    pub phi_rho: f64,
    pub grad_phi_sq: f64,
}

/// Reduction of the kernel to rotationally symmetric data.
///
/// `u_rho` and `u_rhorho` are plain radial derivatives of the profile;
/// `coth_rho` is `coth(ρ)` at the evaluation radius.  The same two-route
/// consistency check as in [`geometry_into`] is applied:
/// the quotient form `H = (n + φ'' / v² + (n-1) coth(ρ) φ') / (u v)` must
/// match the trace form `g^{ρρ} h_{ρρ} + (n-1)(coth(ρ) u' + u) / (u² v)`.
pub fn radial_reduction(
    n: usize,
    u: f64,
    u_rho: f64,
    u_rhorho: f64,
    coth_rho: f64,
    guards: PointGuards,
) -> Result<RadialPoint> {
    if !u.is_finite() || u <= 0.0 {
        return Err(Error::Guard {
            kind: GuardKind::Positivity,
            detail: format!("graph radius u = {u:.6e} is not a positive finite number"),
        });
    }
    let phi_r = u_rho / u;
    let v_sq = 1.0 - phi_r * phi_r;
    if v_sq <= guards.eps_spacelike {
        return Err(Error::Guard {
            kind: GuardKind::Spacelike,
            detail: format!(
                "v^2 = 1 - (phi')^2 = {v_sq:.6e} <= eps_spacelike = {:.1e}",
                guards.eps_spacelike
            ),
        });
    }
    let v = v_sq.sqrt();
    let phi_rr = u_rhorho / u - phi_r * phi_r;
    let h_quotient = (n as f64 + phi_rr / v_sq + (n as f64 - 1.0) * coth_rho * phi_r) / (u * v);

    let h_rr = -(2.0 * u_rho * u_rho / u - u_rhorho - u) / v;
    let h_trace = h_rr / (u * u * v_sq) + (n as f64 - 1.0) * (coth_rho * u_rho + u) / (u * u * v);
    if (h_trace - h_quotient).abs() > tolerances::KERNEL_ROUTE_TOL * h_quotient.abs().max(1.0) {
        return Err(Error::Internal(format!(
            "radial mean-curvature routes disagree: trace = {h_trace:.16e}, quotient = {h_quotient:.16e}"
        )));
    }
    if h_quotient <= guards.eps_mean_convex {
        return Err(Error::Guard {
            kind: GuardKind::MeanConvexity,
            detail: format!(
                "H = {h_quotient:.6e} <= eps_mean_convex = {:.1e}",
                guards.eps_mean_convex
            ),
        });
    }
    Ok(RadialPoint {
        v,
        h_mean: h_quotient,
        phi_rho: phi_r,
        grad_phi_sq: phi_r * phi_r,
    })
}

/// Total area of the graph hypersurface defined by `field`:
/// the quadrature sum of `u^n v` against the cap volume weights.
pub fn total_area(field: &Field) -> Result<f64> {
    let grid = field.grid();
    let mut work = field.clone();
    work.fill_ghosts();
    let n = grid.n;
    let guards = PointGuards::default();
    let mut area = 0.0;
    match grid.mode {
        GridMode::Radial => {
            let len = grid.interior_len();
            let mut d1 = vec![0.0; len];
            let mut d2 = vec![0.0; len];
            discretization::radial_d1_d2(&mut work, &mut d1, &mut d2);
            let interior = work.interior();
            for k in 0..len {
                let u = interior[k];
                let p = radial_reduction(n, u, d1[k], d2[k], grid.coth(k), guards)?;
                area += grid.quad_w(k) * u.powi(n as i32) * p.v;
            }
        }
        GridMode::Disk => {
            let len = grid.interior_len();
            let mut parts = discretization::DiskPartials::new(len);
            discretization::disk_partials(&mut work, &mut parts);
            let interior = work.interior();
            for k in 0..len {
                let u = interior[k];
                if !u.is_finite() || u <= 0.0 {
                    return Err(Error::Guard {
                        kind: GuardKind::Positivity,
                        detail: format!("graph radius u = {u:.6e} at node {k} is not positive"),
                    });
                }
                let y1 = grid.node_y1(k);
                let y2 = grid.node_y2(k);
                // |Du|²_σ with σ^{ij} = δ_ij + y_i y_j.
                let du1 = parts.du1[k];
                let du2 = parts.du2[k];
                let s = du1 * du1 + du2 * du2 + (y1 * du1 + y2 * du2).powi(2);
                let v_sq = 1.0 - s / (u * u);
                if v_sq <= guards.eps_spacelike {
                    return Err(Error::Guard {
                        kind: GuardKind::Spacelike,
                        detail: format!("v^2 = {v_sq:.6e} at node {k}"),
                    });
                }
                area += grid.quad_w(k) * u.powi(n as i32) * v_sq.sqrt();
            }
        }
    }
    Ok(area)
}
