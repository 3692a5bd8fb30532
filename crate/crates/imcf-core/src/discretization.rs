//! Grids, gridded scalar fields, ghost cells, finite-difference stencils
//! and quadrature over the geodesic cap.
//!
//! Two discretizations are provided:
//!
//! * **radial** — rotationally symmetric profiles `u(ρ)` on a cell-centered
//!   1-D grid in the geodesic radius `ρ ∈ (0, ρ_max)`, valid for any cap
//!   dimension `n ≥ 2`;
//! * **disk** — general fields on the 2-D cap (`n = 2`), stored on a polar
//!   chart grid `(r, θ)` with `r = sinh ρ` the chart radius, periodic in `θ`.
//!
//! Both grids are cell-centered so no node sits on the coordinate center or
//! on the boundary.  Ghost layers implement the homogeneous Neumann boundary
//! condition at `ρ = ρ_max` (mirror reflection) and smoothness at the center
//! (even reflection for the radial grid, diametric continuation across the
//! pole for the disk grid, which is why the angular cell count must be even).
//!
//! Centered second-order stencils evaluated against these ghost layers are
//! uniformly second-order accurate for fields satisfying the Neumann
//! condition, including at the first and last cells.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::base_geometry::unit_sphere_area;
use crate::{Error, Result};

/// Which discretization a grid uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridMode {
    Radial,
    Disk,
}

impl fmt::Display for GridMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridMode::Radial => write!(f, "radial"),
            GridMode::Disk => write!(f, "disk"),
        }
    }
}

impl FromStr for GridMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radial" => Ok(GridMode::Radial),
            "disk" => Ok(GridMode::Disk),
            other => Err(Error::Config(format!(
                "unknown mode '{other}' (expected 'radial' or 'disk')"
            ))),
        }
    }
}

/// A fixed computational grid over the cap, with precomputed per-node
/// coordinate and quadrature tables.
#[derive(Debug)]
pub struct Grid {
    pub mode: GridMode,
    /// Cap dimension (the hypersurface is an `n`-dimensional graph).
    pub n: usize,
    /// Geodesic radius of the cap boundary.
    pub rho_max: f64,
    /// Number of cells in the radial direction.
    pub cells: usize,
    /// Number of angular cells (1 in radial mode).
    pub cells_theta: usize,
    /// Radial spacing: `Δρ` (radial mode) or `Δr` in the chart (disk mode).
    pub h: f64,
    /// Angular spacing `Δθ` (0 in radial mode).
    pub h_theta: f64,
    /// Chart radius of the cap boundary, `sinh(ρ_max)`.
    pub y_max: f64,
    rho_tab: Vec<f64>,
    coth_tab: Vec<f64>,
    r_tab: Vec<f64>,
    theta_tab: Vec<f64>,
    cos_tab: Vec<f64>,
    sin_tab: Vec<f64>,
    y1_tab: Vec<f64>,
    y2_tab: Vec<f64>,
    quad_tab: Vec<f64>,
}

impl Grid {
    /// Build and validate a grid.  `cells_theta` is ignored in radial mode.
    pub fn build(
        mode: GridMode,
        n: usize,
        rho_max: f64,
        cells: usize,
        cells_theta: usize,
    ) -> Result<Grid> {
        if n < 2 {
            return Err(Error::Config(format!("n must be at least 2 (got {n})")));
        }
        if !rho_max.is_finite() || rho_max <= 0.0 {
            return Err(Error::Config(format!(
                "rho_max must be positive and finite (got {rho_max})"
            )));
        }
        if cells < 16 {
            return Err(Error::Config(format!(
                "cells must be at least 16 (got {cells})"
            )));
        }
        match mode {
            GridMode::Radial => {
                let h = rho_max / cells as f64;
                let mut rho_tab = Vec::with_capacity(cells);
                let mut coth_tab = Vec::with_capacity(cells);
                let mut quad_tab = Vec::with_capacity(cells);
                let sphere = unit_sphere_area(n);
                for i in 0..cells {
                    let rho = (i as f64 + 0.5) * h;
                    rho_tab.push(rho);
                    coth_tab.push(1.0 / rho.tanh());
                    quad_tab.push(sphere * rho.sinh().powi(n as i32 - 1) * h);
                }
                Ok(Grid {
                    mode,
                    n,
                    rho_max,
                    cells,
                    cells_theta: 1,
                    h,
                    h_theta: 0.0,
                    y_max: rho_max.sinh(),
                    rho_tab,
                    coth_tab,
                    r_tab: Vec::new(),
                    theta_tab: Vec::new(),
                    cos_tab: Vec::new(),
                    sin_tab: Vec::new(),
                    y1_tab: Vec::new(),
                    y2_tab: Vec::new(),
                    quad_tab,
                })
            }
            GridMode::Disk => {
                if n != 2 {
                    return Err(Error::Config(format!("disk mode requires n = 2 (got {n})")));
                }
                if cells_theta < 16 || !cells_theta.is_multiple_of(2) {
                    return Err(Error::Config(format!(
                        "cells_theta must be an even number >= 16 (got {cells_theta})"
                    )));
                }
                let y_max = rho_max.sinh();
                let h = y_max / cells as f64;
                let h_theta = std::f64::consts::TAU / cells_theta as f64;
                let mut r_tab = Vec::with_capacity(cells);
                let mut rho_tab = Vec::with_capacity(cells);
                for i in 0..cells {
                    let r = (i as f64 + 0.5) * h;
                    r_tab.push(r);
                    rho_tab.push(r.asinh());
                }
                let mut theta_tab = Vec::with_capacity(cells_theta);
                let mut cos_tab = Vec::with_capacity(cells_theta);
                let mut sin_tab = Vec::with_capacity(cells_theta);
                for j in 0..cells_theta {
                    let th = j as f64 * h_theta;
                    theta_tab.push(th);
                    cos_tab.push(th.cos());
                    sin_tab.push(th.sin());
                }
                let mut y1_tab = Vec::with_capacity(cells * cells_theta);
                let mut y2_tab = Vec::with_capacity(cells * cells_theta);
                let mut quad_tab = Vec::with_capacity(cells * cells_theta);
                for i in 0..cells {
                    let r = r_tab[i];
                    // Chart volume element: sqrt(det σ) r dr dθ = r dr dθ / sqrt(1+r²).
                    let w = r * h * h_theta / (1.0 + r * r).sqrt();
                    for j in 0..cells_theta {
                        y1_tab.push(r * cos_tab[j]);
                        y2_tab.push(r * sin_tab[j]);
                        quad_tab.push(w);
                    }
                }
                Ok(Grid {
                    mode,
                    n,
                    rho_max,
                    cells,
                    cells_theta,
                    h,
                    h_theta,
                    y_max,
                    rho_tab,
                    coth_tab: Vec::new(),
                    r_tab,
                    theta_tab,
                    cos_tab,
                    sin_tab,
                    y1_tab,
                    y2_tab,
                    quad_tab,
                })
            }
        }
    }

    /// Number of interior nodes a field on this grid carries.
    pub fn interior_len(&self) -> usize {
        self.cells * self.cells_theta
    }

    /// Geodesic radius of interior node `k`.
    pub fn node_rho(&self, k: usize) -> f64 {
        match self.mode {
            GridMode::Radial => self.rho_tab[k],
            GridMode::Disk => self.rho_tab[k / self.cells_theta],
        }
    }

    /// `coth(ρ)` at radial node `k` (radial mode only).
    pub fn coth(&self, k: usize) -> f64 {
        self.coth_tab[k]
    }

    /// Chart radius of radial ring `i` (disk mode).
    pub fn ring_r(&self, i: usize) -> f64 {
        self.r_tab[i]
    }

    /// Polar chart coordinates `(r, θ)` of interior node `k` (disk mode).
    pub fn node_r_theta(&self, k: usize) -> (f64, f64) {
        let i = k / self.cells_theta;
        let j = k % self.cells_theta;
        (self.r_tab[i], self.theta_tab[j])
    }

    /// First Cartesian chart coordinate of interior node `k` (disk mode).
    pub fn node_y1(&self, k: usize) -> f64 {
        self.y1_tab[k]
    }

    /// Second Cartesian chart coordinate of interior node `k` (disk mode).
    pub fn node_y2(&self, k: usize) -> f64 {
        self.y2_tab[k]
    }

    /// Quadrature weight of interior node `k` (cap volume measure).
    pub fn quad_w(&self, k: usize) -> f64 {
        self.quad_tab[k]
    }

    /// Total cap volume as seen by the quadrature rule.
    pub fn cap_area(&self) -> f64 {
        self.quad_tab.iter().sum()
    }
}

/// A scalar field on a [`Grid`], stored with one ghost ring on each side of
/// the radial direction.  Interior nodes are stored contiguously in row-major
/// order (`k = i_radial * cells_theta + j_theta`).
#[derive(Clone, Debug)]
pub struct Field {
    grid: Arc<Grid>,
    data: Vec<f64>,
}

impl Field {
    pub fn constant(grid: &Arc<Grid>, value: f64) -> Field {
        let len = (grid.cells + 2) * grid.cells_theta;
        Field {
            grid: grid.clone(),
            data: vec![value; len],
        }
    }

    /// Build a field by evaluating `f` at every interior node index.
    pub fn from_fn(grid: &Arc<Grid>, mut f: impl FnMut(usize) -> f64) -> Field {
        let mut field = Field::constant(grid, 0.0);
        for (k, slot) in field.interior_mut().iter_mut().enumerate() {
            *slot = f(k);
        }
        field.fill_ghosts();
        field
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn interior(&self) -> &[f64] {
        let nt = self.grid.cells_theta;
        &self.data[nt..(self.grid.cells + 1) * nt]
    }

    pub fn interior_mut(&mut self) -> &mut [f64] {
        let nt = self.grid.cells_theta;
        let end = (self.grid.cells + 1) * nt;
        &mut self.data[nt..end]
    }

    pub(crate) fn raw(&self) -> &[f64] {
        &self.data
    }

    /// Refresh the ghost layers from the interior values.  Idempotent.
    ///
    /// * center: even reflection (radial) / diametric continuation (disk);
    /// * outer boundary: mirror reflection, which encodes the homogeneous
    ///   Neumann condition `∂u/∂ρ = 0` at `ρ = ρ_max` to second order.
    pub fn fill_ghosts(&mut self) {
        let nt = self.grid.cells_theta;
        let nr = self.grid.cells;
        match self.grid.mode {
            GridMode::Radial => {
                self.data[0] = self.data[1];
                self.data[nr + 1] = self.data[nr];
            }
            GridMode::Disk => {
                let half = nt / 2;
                for j in 0..nt {
                    let src = nt + (j + half) % nt; // first interior ring, opposite angle
                    self.data[j] = self.data[src];
                }
                let (outer_ghost, last_interior) = ((nr + 1) * nt, nr * nt);
                for j in 0..nt {
                    self.data[outer_ghost + j] = self.data[last_interior + j];
                }
            }
        }
    }
}

/// Centered first and second radial derivatives of a radial-mode field,
/// written into `d1` and `d2` (interior length).  Ghosts are refreshed first.
pub fn radial_d1_d2(f: &mut Field, d1: &mut [f64], d2: &mut [f64]) {
    f.fill_ghosts();
    let grid = f.grid().clone();
    debug_assert_eq!(grid.mode, GridMode::Radial);
    let h = grid.h;
    let data = f.raw();
    for k in 0..grid.cells {
        let l = data[k];
        let c = data[k + 1];
        let r = data[k + 2];
        d1[k] = (r - l) / (2.0 * h);
        d2[k] = (r - 2.0 * c + l) / (h * h);
    }
}

/// Second-order one-sided reconstruction of the radial derivative at the
/// outer boundary `ρ = ρ_max`, from the last three interior cells (quadratic
/// extrapolation; exact for polynomials of degree ≤ 2).
pub fn one_sided_boundary_derivative(f: &Field) -> Result<f64> {
    let grid = f.grid();
    if grid.mode != GridMode::Radial {
        return Err(Error::Input(
            "one-sided boundary reconstruction is defined for radial-mode fields".into(),
        ));
    }
    if grid.cells < 3 {
        return Err(Error::Input("need at least 3 cells".into()));
    }
    let u = f.interior();
    let nr = grid.cells;
    let (f1, f2, f3) = (u[nr - 1], u[nr - 2], u[nr - 3]);
    Ok((2.0 * f1 - 3.0 * f2 + f3) / grid.h)
}

/// All chart derivatives of a disk-mode field needed by the geometry kernel:
/// Cartesian chart gradient, covariant Hessian components, and the raw polar
/// derivatives (used by the time-step bound).
#[derive(Clone, Debug)]
pub struct DiskPartials {
    pub du1: Vec<f64>,
    pub du2: Vec<f64>,
    pub cov11: Vec<f64>,
    pub cov12: Vec<f64>,
    pub cov22: Vec<f64>,
    pub dr: Vec<f64>,
    pub dth: Vec<f64>,
}

impl DiskPartials {
    pub fn new(len: usize) -> Self {
        DiskPartials {
            du1: vec![0.0; len],
            du2: vec![0.0; len],
            cov11: vec![0.0; len],
            cov12: vec![0.0; len],
            cov22: vec![0.0; len],
            dr: vec![0.0; len],
            dth: vec![0.0; len],
        }
    }
}

/// Compute [`DiskPartials`] for a disk-mode field with centered stencils.
/// Ghosts are refreshed first.  The polar derivatives are converted to the
/// Cartesian chart, then the covariant correction `σ_ij (y·Du)` is added to
/// form the covariant Hessian.
pub fn disk_partials(f: &mut Field, out: &mut DiskPartials) {
    f.fill_ghosts();
    let grid = f.grid().clone();
    debug_assert_eq!(grid.mode, GridMode::Disk);
    let nt = grid.cells_theta;
    let nr = grid.cells;
    let hr = grid.h;
    let ht = grid.h_theta;
    let data = f.raw();
    for i in 1..=nr {
        let r = grid.ring_r(i - 1);
        let row = i * nt;
        let up = (i + 1) * nt;
        let dn = (i - 1) * nt;
        for j in 0..nt {
            let jm = (j + nt - 1) % nt;
            let jp = (j + 1) % nt;
            let c = data[row + j];
            let fr = (data[up + j] - data[dn + j]) / (2.0 * hr);
            let frr = (data[up + j] - 2.0 * c + data[dn + j]) / (hr * hr);
            let ft = (data[row + jp] - data[row + jm]) / (2.0 * ht);
            let ftt = (data[row + jp] - 2.0 * c + data[row + jm]) / (ht * ht);
            let frt =
                (data[up + jp] - data[up + jm] - data[dn + jp] + data[dn + jm]) / (4.0 * hr * ht);

            let (ct, st) = (grid.cos_tab[j], grid.sin_tab[j]);
            let fx = ct * fr - st / r * ft;
            let fy = st * fr + ct / r * ft;
            let cs = ct * st;
            let fxx = ct * ct * frr - 2.0 * cs / r * frt
                + st * st / (r * r) * ftt
                + st * st / r * fr
                + 2.0 * cs / (r * r) * ft;
            let fyy =
                st * st * frr + 2.0 * cs / r * frt + ct * ct / (r * r) * ftt + ct * ct / r * fr
                    - 2.0 * cs / (r * r) * ft;
            let fxy = cs * frr + (ct * ct - st * st) / r * frt
                - cs / (r * r) * ftt
                - cs / r * fr
                - (ct * ct - st * st) / (r * r) * ft;

            let k = (i - 1) * nt + j;
            let y1 = grid.y1_tab[k];
            let y2 = grid.y2_tab[k];
            let w = 1.0 + r * r;
            let ydf = y1 * fx + y2 * fy;
            out.du1[k] = fx;
            out.du2[k] = fy;
            out.dr[k] = fr;
            out.dth[k] = ft;
            out.cov11[k] = fxx + (1.0 - y1 * y1 / w) * ydf;
            out.cov12[k] = fxy + (-y1 * y2 / w) * ydf;
            out.cov22[k] = fyy + (1.0 - y2 * y2 / w) * ydf;
        }
    }
}

/// Covariant Hessian of a field with respect to the cap metric, returned in
/// the natural components of the field's discretization.
#[derive(Clone, Debug)]
pub enum CovariantHessian {
    /// `u_{;ρρ}` together with the coefficient `c` of the angular block
    /// `u_{;ab} = c σ_ab` (namely `c = coth(ρ) u_ρ`).
    Radial {
        rho_rho: Vec<f64>,
        angular: Vec<f64>,
    },
    /// Cartesian chart components `u_{;11}`, `u_{;12}`, `u_{;22}`.
    Disk {
        c11: Vec<f64>,
        c12: Vec<f64>,
        c22: Vec<f64>,
    },
}

/// Compute the covariant Hessian of `f` on its own grid.
pub fn covariant_hessian(f: &Field) -> CovariantHessian {
    let grid = f.grid().clone();
    let mut work = f.clone();
    match grid.mode {
        GridMode::Radial => {
            let len = grid.interior_len();
            let mut d1 = vec![0.0; len];
            let mut d2 = vec![0.0; len];
            radial_d1_d2(&mut work, &mut d1, &mut d2);
            let angular = (0..len).map(|k| grid.coth(k) * d1[k]).collect();
            CovariantHessian::Radial {
                rho_rho: d2,
                angular,
            }
        }
        GridMode::Disk => {
            let mut parts = DiskPartials::new(grid.interior_len());
            disk_partials(&mut work, &mut parts);
            CovariantHessian::Disk {
                c11: parts.cov11,
                c12: parts.cov12,
                c22: parts.cov22,
            }
        }
    }
}

/// Laplace–Beltrami operator of `f` with respect to the cap metric,
/// `Δf = σ^{ij} f_{;ij}`, evaluated at every interior node.
pub fn laplace_beltrami(f: &Field) -> Vec<f64> {
    let grid = f.grid().clone();
    match covariant_hessian(f) {
        CovariantHessian::Radial { rho_rho, angular } => {
            let nm1 = grid.n as f64 - 1.0;
            rho_rho
                .iter()
                .zip(angular.iter())
                .map(|(rr, ang)| rr + nm1 * ang)
                .collect()
        }
        CovariantHessian::Disk { c11, c12, c22 } => (0..grid.interior_len())
            .map(|k| {
                let y1 = grid.node_y1(k);
                let y2 = grid.node_y2(k);
                (1.0 + y1 * y1) * c11[k] + 2.0 * y1 * y2 * c12[k] + (1.0 + y2 * y2) * c22[k]
            })
            .collect(),
    }
}
