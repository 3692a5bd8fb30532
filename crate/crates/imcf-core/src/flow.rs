//! Time evolution of the graph under inverse-mean-curvature motion.
//!
//! Two formulations are integrated by the same machinery:
//!
//! * **raw** — `∂u/∂t = -v/H`: the hypersurface contracts toward the
//!   lightcone vertex, with `u → 0` as `t → ∞`;
//! * **rescaled** — `∂ũ/∂t = -ṽ/H̃ + ũ/n`, the autonomous normalization
//!   `ũ = u e^{t/n - c}` whose solutions converge to a constant.
//!
//! Spatial derivatives come from [`crate::discretization`] (second-order
//! centered stencils with Neumann/pole ghosts); pointwise geometry from
//! [`crate::graph_geometry`].  Time stepping is the three-stage,
//! third-order strong-stability-preserving Runge–Kutta scheme, written in
//! increment form so constant equilibria are preserved to machine precision.
//! The step size obeys a parabolic bound `dt = γ / max_k s_k`, where `s_k`
//! sums the per-direction diffusion coefficients of the linearized equation
//! divided by the squared grid spacings.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::config::{CConvention, FlowConfig};
use crate::discretization::{self, DiskPartials, Field, Grid, GridMode};
use crate::graph_geometry::{
    geometry_into, radial_reduction, GeometryFields, GraphPointView, PointGuards,
};
use crate::monitors::TrajectoryRecord;
use crate::{Error, GuardKind, Result};

/// Which formulation of the motion is being integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowMode {
    Raw,
    Rescaled,
}

impl fmt::Display for FlowMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowMode::Raw => write!(f, "raw"),
            FlowMode::Rescaled => write!(f, "rescaled"),
        }
    }
}

impl FromStr for FlowMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(FlowMode::Raw),
            "rescaled" => Ok(FlowMode::Rescaled),
            other => Err(Error::Config(format!(
                "unknown flow mode '{other}' (expected 'raw' or 'rescaled')"
            ))),
        }
    }
}

/// Scale factor `Θ(t, c) = e^{-t/n + c}` relating raw and rescaled radii:
/// `u_raw = ũ Θ`.
pub fn theta(t: f64, c: f64, n: usize) -> f64 {
    (-t / n as f64 + c).exp()
}

/// Initial graph radius profiles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialData {
    /// `u₀ ≡ r0` (a round cap piece).
    Constant { r0: f64 },
    /// `u₀(ρ) = r0 (1 + eps cos(π ρ / ρ_max))` — a rotationally symmetric
    /// bump that satisfies the Neumann condition at both ends.
    Bump { r0: f64, eps: f64 },
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InitialData::Constant { r0 } => {
                if !r0.is_finite() || r0 <= 0.0 {
                    return Err(Error::Config(format!(
                        "u0 constant radius must be positive and finite (got {r0})"
                    )));
                }
            }
            InitialData::Bump { r0, eps } => {
                if !r0.is_finite() || r0 <= 0.0 {
                    return Err(Error::Config(format!(
                        "u0 bump radius must be positive and finite (got {r0})"
                    )));
                }
                if !eps.is_finite() || eps.abs() >= 1.0 {
                    return Err(Error::Config(format!(
                        "u0 bump amplitude must satisfy |eps| < 1 (got {eps})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Evaluate the profile at geodesic radius `rho`.
    pub fn profile(&self, rho: f64, rho_max: f64) -> f64 {
        match *self {
            InitialData::Constant { r0 } => r0,
            InitialData::Bump { r0, eps } => {
                r0 * (1.0 + eps * (std::f64::consts::PI * rho / rho_max).cos())
            }
        }
    }
}

impl fmt::Display for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            InitialData::Constant { r0 } => write!(f, "constant:{r0}"),
            InitialData::Bump { r0, eps } => write!(f, "bump:{r0},{eps}"),
        }
    }
}

impl FromStr for InitialData {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = |detail: &str| {
            Error::Config(format!(
                "invalid u0 '{s}': {detail} (expected 'constant:R' or 'bump:R[,EPS]')"
            ))
        };
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        match kind {
            "constant" => {
                let r0: f64 = rest.parse().map_err(|_| bad("radius is not a number"))?;
                Ok(InitialData::Constant { r0 })
            }
            "bump" => {
                let (r_str, eps_str) = match rest.split_once(',') {
                    Some((a, b)) => (a, Some(b)),
                    None => (rest, None),
                };
                let r0: f64 = r_str.parse().map_err(|_| bad("radius is not a number"))?;
                let eps: f64 = match eps_str {
                    Some(e) => e.parse().map_err(|_| bad("amplitude is not a number"))?,
                    None => 0.05,
                };
                Ok(InitialData::Bump { r0, eps })
            }
            other => Err(bad(&format!("unknown profile kind '{other}'"))),
        }
    }
}

/// Build the initial raw radius field on a grid.
pub fn initial_field(grid: &Arc<Grid>, data: &InitialData) -> Field {
    Field::from_fn(grid, |k| data.profile(grid.node_rho(k), grid.rho_max))
}

/// A graph radius field together with its time, gauge constant and mode.
#[derive(Clone, Debug)]
pub struct GraphState {
    pub t: f64,
    /// Gauge constant of the rescaling `Θ(t, c) = e^{-t/n + c}`.
    pub c: f64,
    pub mode: FlowMode,
    pub u: Field,
}

impl GraphState {
    pub fn grid(&self) -> &Arc<Grid> {
        self.u.grid()
    }
}

/// Result of a completed evolution.
#[derive(Clone, Debug)]
pub struct FlowOutcome {
    pub records: Vec<TrajectoryRecord>,
    pub state: GraphState,
    pub steps: u64,
}

/// Result of an evolution that may have stopped early: `failure` holds the
/// error that interrupted the run (singularity guards, internal checks),
/// while `records` and `state` keep everything produced up to that point.
#[derive(Debug)]
pub struct EvolveReport {
    pub records: Vec<TrajectoryRecord>,
    pub state: GraphState,
    pub steps: u64,
    pub failure: Option<Error>,
}

/// Per-node derived fields plus the time-step bound, refreshed once per
/// Runge–Kutta stage.
struct Ws {
    v: Vec<f64>,
    h: Vec<f64>,
    grad_phi_sq: Vec<f64>,
    /// `max_k` of the summed diffusion-over-spacing² coefficients.
    s_max: f64,
    rhs: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    parts: DiskPartials,
    gf: GeometryFields,
}

impl Ws {
    fn new(grid: &Grid) -> Ws {
        let len = grid.interior_len();
        Ws {
            v: vec![0.0; len],
            h: vec![0.0; len],
            grad_phi_sq: vec![0.0; len],
            s_max: 0.0,
            rhs: vec![0.0; len],
            d1: vec![0.0; len],
            d2: vec![0.0; len],
            parts: DiskPartials::new(len),
            gf: GeometryFields::new(grid.n),
        }
    }
}

fn locate(err: Error, t: f64, node: usize) -> Error {
    match err {
        Error::Guard { kind, detail } => Error::Guard {
            kind,
            detail: format!("t = {t:.9e}, node {node}: {detail}"),
        },
        Error::Internal(detail) => Error::Internal(format!("t = {t:.9e}, node {node}: {detail}")),
        other => other,
    }
}

/// Fill `ws.v/h/grad_phi_sq/s_max` from the current field.
fn derived(grid: &Grid, guards: PointGuards, ws: &mut Ws, u: &mut Field, t: f64) -> Result<()> {
    let len = grid.interior_len();
    ws.s_max = 0.0;
    match grid.mode {
        GridMode::Radial => {
            discretization::radial_d1_d2(u, &mut ws.d1, &mut ws.d2);
            let interior = u.interior();
            let h_sq = grid.h * grid.h;
            for k in 0..len {
                let uk = interior[k];
                let p = radial_reduction(grid.n, uk, ws.d1[k], ws.d2[k], grid.coth(k), guards)
                    .map_err(|e| locate(e, t, k))?;
                ws.v[k] = p.v;
                ws.h[k] = p.h_mean;
                ws.grad_phi_sq[k] = p.grad_phi_sq;
                // Diffusion coefficient of the linearized equation in the
                // radial direction: D^ρρ = 1 / (u H v)².
                let uhv = uk * p.h_mean * p.v;
                let s = 1.0 / (uhv * uhv * h_sq);
                if s > ws.s_max {
                    ws.s_max = s;
                }
            }
        }
        GridMode::Disk => {
            discretization::disk_partials(u, &mut ws.parts);
            let interior = u.interior();
            let nt = grid.cells_theta;
            let hr_sq = grid.h * grid.h;
            let ht = grid.h_theta;
            for k in 0..len {
                let uk = interior[k];
                let y = [grid.node_y1(k), grid.node_y2(k)];
                let du = [ws.parts.du1[k], ws.parts.du2[k]];
                let hess = [
                    ws.parts.cov11[k],
                    ws.parts.cov12[k],
                    ws.parts.cov12[k],
                    ws.parts.cov22[k],
                ];
                let view = GraphPointView {
                    y: &y,
                    u: uk,
                    du: &du,
                    hess_u: &hess,
                };
                geometry_into(view, guards, &mut ws.gf).map_err(|e| locate(e, t, k))?;
                ws.v[k] = ws.gf.v;
                ws.h[k] = ws.gf.h_mean;
                ws.grad_phi_sq[k] = ws.gf.grad_phi_sq;

                // Diffusion coefficients in the polar stencil directions:
                // D^ab = (σ^ab + φ^a φ^b / v²) / (u H v)² with
                // σ^rr = 1 + r², σ^θθ = 1/r², σ^rθ = 0.
                let r = grid.ring_r(k / nt);
                let v_sq = ws.gf.v * ws.gf.v;
                let phi_r = ws.parts.dr[k] / uk;
                let phi_t = ws.parts.dth[k] / uk;
                let phi_r_up = (1.0 + r * r) * phi_r;
                let phi_t_up = phi_t / (r * r);
                let uhv = uk * ws.gf.h_mean * ws.gf.v;
                let scale = 1.0 / (uhv * uhv);
                let d_rr = (1.0 + r * r + phi_r_up * phi_r_up / v_sq) * scale;
                let d_tt = (1.0 / (r * r) + phi_t_up * phi_t_up / v_sq) * scale;
                let d_rt = (phi_r_up * phi_t_up / v_sq) * scale;
                let s = d_rr / hr_sq + 2.0 * d_rt.abs() / (grid.h * ht) + d_tt / (ht * ht);
                if s > ws.s_max {
                    ws.s_max = s;
                }
            }
        }
    }
    Ok(())
}

/// Fill `ws.rhs` from the derived fields: `-v/H`, plus `u/n` when rescaled.
fn fill_rhs(ws: &mut Ws, u: &Field, mode: FlowMode, n: usize) {
    let interior = u.interior();
    match mode {
        FlowMode::Raw => {
            for k in 0..interior.len() {
                ws.rhs[k] = -ws.v[k] / ws.h[k];
            }
        }
        FlowMode::Rescaled => {
            let n_inv = 1.0 / n as f64;
            for k in 0..interior.len() {
                ws.rhs[k] = -ws.v[k] / ws.h[k] + interior[k] * n_inv;
            }
        }
    }
}

/// Explicit integrator for one formulation of the motion on one grid.
/// All scratch buffers are allocated once and reused across steps.
pub struct Stepper {
    grid: Arc<Grid>,
    mode: FlowMode,
    guards: PointGuards,
    ws: Ws,
    u1: Field,
    u2: Field,
}

impl Stepper {
    pub fn new(grid: &Arc<Grid>, mode: FlowMode, guards: PointGuards) -> Stepper {
        Stepper {
            grid: grid.clone(),
            mode,
            guards,
            ws: Ws::new(grid),
            u1: Field::constant(grid, 0.0),
            u2: Field::constant(grid, 0.0),
        }
    }

    /// Run the derived-field pass only: errors are the singularity guards.
    pub fn validate(&mut self, u: &mut Field, t: f64) -> Result<()> {
        derived(&self.grid, self.guards, &mut self.ws, u, t)
    }

    /// Parabolic step bound `γ / max_k s_k` for the current state.
    pub fn cfl_dt(&mut self, u: &mut Field, t: f64, gamma: f64) -> Result<f64> {
        derived(&self.grid, self.guards, &mut self.ws, u, t)?;
        Ok(gamma / self.ws.s_max)
    }

    /// Advance one step of the given size.
    pub fn step_fixed(&mut self, u: &mut Field, t: f64, dt: f64) -> Result<()> {
        derived(&self.grid, self.guards, &mut self.ws, u, t)?;
        self.advance(u, t, dt)
    }

    /// Advance one step sized by the parabolic bound (capped by `dt_cap`);
    /// returns the step actually taken.
    pub fn step_auto(&mut self, u: &mut Field, t: f64, gamma: f64, dt_cap: f64) -> Result<f64> {
        derived(&self.grid, self.guards, &mut self.ws, u, t)?;
        let dt = (gamma / self.ws.s_max).min(dt_cap);
        self.advance(u, t, dt)?;
        Ok(dt)
    }

    /// Three-stage strong-stability-preserving Runge–Kutta step in increment
    /// form (`ws` must already hold the derived fields of `u`):
    ///   u1 = u + dt L(u)
    ///   u2 = u + ¼ (u1 + dt L(u1) - u)
    ///   u  = u + ⅔ (u2 + dt L(u2) - u)
    fn advance(&mut self, u: &mut Field, t: f64, dt: f64) -> Result<()> {
        let n = self.grid.n;
        fill_rhs(&mut self.ws, u, self.mode, n);
        {
            let src = u.interior();
            let dst = self.u1.interior_mut();
            for k in 0..src.len() {
                dst[k] = src[k] + dt * self.ws.rhs[k];
            }
        }
        derived(&self.grid, self.guards, &mut self.ws, &mut self.u1, t)?;
        fill_rhs(&mut self.ws, &self.u1, self.mode, n);
        {
            let src = u.interior();
            let s1 = self.u1.interior();
            let dst = self.u2.interior_mut();
            for k in 0..src.len() {
                dst[k] = src[k] + 0.25 * (s1[k] + dt * self.ws.rhs[k] - src[k]);
            }
        }
        derived(&self.grid, self.guards, &mut self.ws, &mut self.u2, t)?;
        fill_rhs(&mut self.ws, &self.u2, self.mode, n);
        {
            let s2 = self.u2.interior();
            let dst = u.interior_mut();
            for k in 0..dst.len() {
                dst[k] += (2.0 / 3.0) * (s2[k] + dt * self.ws.rhs[k] - dst[k]);
            }
        }
        // Positivity scan: cheap every-step guard against blow-through.
        let interior = u.interior();
        for (k, &val) in interior.iter().enumerate() {
            if !val.is_finite() || val <= 0.0 {
                return Err(Error::Guard {
                    kind: GuardKind::Positivity,
                    detail: format!(
                        "t = {:.9e}, node {k}: graph radius became {val:.6e} after a step of dt = {dt:.6e}",
                        t + dt
                    ),
                });
            }
        }
        Ok(())
    }

    /// Derive fields and reduce them to one trajectory record.
    pub fn observe(
        &mut self,
        u: &mut Field,
        t: f64,
        c: f64,
        dt_used: f64,
    ) -> Result<TrajectoryRecord> {
        derived(&self.grid, self.guards, &mut self.ws, u, t)?;
        let interior = u.interior();
        let n = self.grid.n;
        let mut min_u = f64::INFINITY;
        let mut max_u = f64::NEG_INFINITY;
        let mut area_state = 0.0;
        let mut max_grad_sq = 0.0f64;
        let mut min_hd = f64::INFINITY;
        let mut max_hd = f64::NEG_INFINITY;
        let mut min_pd = f64::INFINITY;
        let mut max_pd = f64::NEG_INFINITY;
        let n_inv = 1.0 / n as f64;
        for k in 0..interior.len() {
            let uk = interior[k];
            min_u = min_u.min(uk);
            max_u = max_u.max(uk);
            area_state += self.grid.quad_w(k) * uk.powi(n as i32) * self.ws.v[k];
            max_grad_sq = max_grad_sq.max(self.ws.grad_phi_sq[k]);
            let hk = self.ws.h[k];
            min_hd = min_hd.min(hk);
            max_hd = max_hd.max(hk);
            let pd = match self.mode {
                FlowMode::Raw => -self.ws.v[k] / (uk * hk),
                FlowMode::Rescaled => -self.ws.v[k] / (uk * hk) + n_inv,
            };
            min_pd = min_pd.min(pd);
            max_pd = max_pd.max(pd);
        }
        let th = theta(t, c, n);
        let th_n = th.powi(n as i32);
        let (area, rescaled_area, min_h_theta, max_h_theta, osc) = match self.mode {
            FlowMode::Raw => (
                area_state,
                area_state / th_n,
                min_hd * th,
                max_hd * th,
                (max_u - min_u) / th,
            ),
            FlowMode::Rescaled => (area_state * th_n, area_state, min_hd, max_hd, max_u - min_u),
        };
        Ok(TrajectoryRecord {
            t,
            min_u,
            max_u,
            min_phi: min_u.ln(),
            max_phi: max_u.ln(),
            min_phidot: min_pd,
            max_phidot: max_pd,
            max_grad_phi: max_grad_sq.sqrt(),
            min_h_theta,
            max_h_theta,
            area,
            rescaled_area,
            osc_rescaled_u: osc,
            dt_used,
        })
    }
}

/// One row of a state snapshot: node coordinates plus derived fields.
#[derive(Clone, Copy, Debug)]
pub struct SnapshotRow {
    pub coord1: f64,
    pub coord2: Option<f64>,
    pub u: f64,
    pub v: f64,
    pub h: f64,
    pub grad_phi: f64,
}

/// Evaluate the derived fields of a state for snapshot output.
pub fn snapshot_rows(state: &GraphState) -> Result<Vec<SnapshotRow>> {
    let grid = state.grid().clone();
    let mut u = state.u.clone();
    let mut ws = Ws::new(&grid);
    derived(&grid, PointGuards::default(), &mut ws, &mut u, state.t)?;
    let interior = u.interior();
    let mut rows = Vec::with_capacity(interior.len());
    for k in 0..interior.len() {
        let (coord1, coord2) = match grid.mode {
            GridMode::Radial => (grid.node_rho(k), None),
            GridMode::Disk => {
                let (r, th) = grid.node_r_theta(k);
                (r, Some(th))
            }
        };
        rows.push(SnapshotRow {
            coord1,
            coord2,
            u: interior[k],
            v: ws.v[k],
            h: ws.h[k],
            grad_phi: ws.grad_phi_sq[k].sqrt(),
        });
    }
    Ok(rows)
}

/// Gauge constant for an initial raw field under the given convention:
/// the midpoint convention takes `c = (min φ₀ + max φ₀) / 2`.
pub fn gauge_constant(u0: &Field, convention: CConvention) -> f64 {
    match convention {
        CConvention::Value(c) => c,
        CConvention::Midpoint => {
            let mut min_u = f64::INFINITY;
            let mut max_u = f64::NEG_INFINITY;
            for &v in u0.interior() {
                min_u = min_u.min(v);
                max_u = max_u.max(v);
            }
            (min_u.ln() + max_u.ln()) / 2.0
        }
    }
}

/// Evolve to the mode's end time, calling `sink(step, state)` at the
/// snapshot cadence (including step 0 when a cadence is set).  Setup
/// problems (grid, initial data) are returned as `Err`; runtime failures
/// (singularity guards) are stored in [`EvolveReport::failure`] so the
/// partial trajectory survives for diagnosis.
pub fn evolve_with(
    cfg: &FlowConfig,
    mode: FlowMode,
    mut sink: impl FnMut(u64, &GraphState) -> Result<()>,
) -> Result<EvolveReport> {
    let grid = Arc::new(Grid::build(
        cfg.mode,
        cfg.n,
        cfg.rho_max,
        cfg.cells,
        cfg.cells_theta,
    )?);
    cfg.u0.validate()?;
    let mut u = initial_field(&grid, &cfg.u0);
    let c = gauge_constant(&u, cfg.c_convention);
    if mode == FlowMode::Rescaled {
        let scale = (-c).exp();
        for v in u.interior_mut() {
            *v *= scale;
        }
        u.fill_ghosts();
    }
    let guards = PointGuards {
        eps_spacelike: cfg.eps_spacelike,
        eps_mean_convex: cfg.eps_mean_convex,
    };
    let mut stepper = Stepper::new(&grid, mode, guards);

    // Startup validation: initial data outside the admissible class is a
    // configuration error, not a runtime singularity.
    stepper
        .validate(&mut u, 0.0)
        .map_err(|e| Error::Config(format!("initial data rejected: {e}")))?;

    let t_end = match mode {
        FlowMode::Raw => cfg.t_end,
        FlowMode::Rescaled => cfg.t_end_rescaled,
    };
    let mut state = GraphState { t: 0.0, c, mode, u };
    let mut records = Vec::new();
    let mut steps: u64 = 0;

    // The stepping loop borrows `records`/`state`/`steps` mutably, so it
    // lives in its own scope; its error, if any, is inspected afterwards.
    let failure = {
        let mut run = || -> Result<()> {
            records.push(stepper.observe(&mut state.u, 0.0, c, 0.0)?);
            if cfg.snapshot_every > 0 {
                sink(0, &state)?;
            }
            let tiny = 1e-13 * t_end.abs().max(1.0);
            while state.t + tiny < t_end {
                let dt_cap = t_end - state.t;
                let dt = match cfg.dt {
                    Some(fixed) => {
                        let dt = fixed.min(dt_cap);
                        stepper.step_fixed(&mut state.u, state.t, dt)?;
                        dt
                    }
                    None => stepper.step_auto(&mut state.u, state.t, cfg.cfl_gamma, dt_cap)?,
                };
                state.t += dt;
                steps += 1;
                if cfg.csv_every > 0 && steps.is_multiple_of(cfg.csv_every) {
                    records.push(stepper.observe(&mut state.u, state.t, c, dt)?);
                }
                if cfg.snapshot_every > 0 && steps.is_multiple_of(cfg.snapshot_every) {
                    sink(steps, &state)?;
                }
            }
            Ok(())
        };
        run().err()
    };
    match failure {
        // I/O and configuration problems are real errors, not trajectory
        // diagnostics worth keeping a partial run for.
        Some(e @ (Error::Io(_) | Error::Config(_) | Error::Input(_))) => Err(e),
        failure => Ok(EvolveReport {
            records,
            state,
            steps,
            failure,
        }),
    }
}

/// Evolve to the end time; any runtime failure is promoted to `Err`.
pub fn evolve(cfg: &FlowConfig, mode: FlowMode) -> Result<FlowOutcome> {
    let report = evolve_with(cfg, mode, |_, _| Ok(()))?;
    match report.failure {
        Some(e) => Err(e),
        None => Ok(FlowOutcome {
            records: report.records,
            state: report.state,
            steps: report.steps,
        }),
    }
}
