//! End-to-end acceptance suite.
//!
//! Each test exercises one headline guarantee of the solver at its stated
//! tolerance and prints a single `[PASS]`/`[FAIL]` line with the measured
//! value.  Run with
//!
//! ```text
//! cargo test --test acceptance -- --nocapture
//! ```
//!
//! to see the lines; under plain `cargo test` the assertions alone decide.

// Run setups mutate a `Default` config one field at a time on purpose.
#![allow(clippy::field_reassign_with_default)]

use std::sync::Arc;
use std::time::Instant;

use imcf_core::config::FlowConfig;
use imcf_core::discretization::{Grid, GridMode};
use imcf_core::flow::{evolve, FlowMode, InitialData};
use imcf_core::geometry_checks;
use imcf_core::graph_geometry::{geometry_into, GeometryFields, GraphPointData, PointGuards};
use imcf_core::linalg;
use imcf_core::monitors::{check_trajectory, round_solution, Verdict};
use imcf_core::output::render_trajectory;

/// Print one verdict line and fail the test if `pass` is false.
fn report(name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {name}: {detail}");
    assert!(pass, "{name}: {detail}");
}

fn bump_config(cells: usize) -> FlowConfig {
    let mut cfg = FlowConfig::default();
    cfg.cells = cells;
    cfg.u0 = InitialData::Bump { r0: 1.5, eps: 0.05 };
    cfg
}

/// Linear interpolation of a radial profile at off-node radii.
fn interp_radial(grid: &Grid, values: &[f64], rho: f64) -> f64 {
    let s = rho / grid.h - 0.5;
    let i = (s.floor().max(0.0) as usize).min(grid.cells - 2);
    let w = (s - i as f64).clamp(0.0, 1.0);
    values[i] * (1.0 - w) + values[i + 1] * w
}

#[test]
fn exact_solution_reproduction() {
    // Constant initial data follows the closed-form shrinking solution
    // u(t) = r0·e^{-t/n}; the run must reproduce it to 1e-6 relative and
    // finish well inside a desktop time budget.
    let cfg = FlowConfig::default(); // constant:1.5, 256 cells, t_end = 2
    let clock = Instant::now();
    let out = evolve(&cfg, FlowMode::Raw).unwrap();
    let secs = clock.elapsed().as_secs_f64();

    let mut worst = 0.0f64;
    for r in &out.records {
        let exact = round_solution(1.5, cfg.n, r.t).u;
        worst = worst.max((r.min_u - exact).abs() / exact);
        worst = worst.max((r.max_u - exact).abs() / exact);
    }
    let exact_end = round_solution(1.5, cfg.n, out.state.t).u;
    for &u in out.state.u.interior() {
        worst = worst.max((u - exact_end).abs() / exact_end);
    }

    report(
        "exact-solution reproduction",
        worst < 1e-6 && secs < 10.0,
        &format!(
            "max rel err {worst:.3e} (tol 1e-6) over {} records; {secs:.2} s (budget 10 s)",
            out.records.len()
        ),
    );
}

#[test]
fn area_law_with_grid_refinement() {
    // The total area satisfies area(t) = area(0)·e^{-t} exactly in the
    // continuum; the discrete defect must stay under 5e-3 on the ratio and
    // shrink at second order when the grid is refined.
    let worst_at = |cells: usize| -> f64 {
        let out = evolve(&bump_config(cells), FlowMode::Raw).unwrap();
        let a0 = out.records[0].area;
        out.records
            .iter()
            .map(|r| (r.area / a0 - (-r.t).exp()).abs())
            .fold(0.0f64, f64::max)
    };
    let coarse = worst_at(256);
    let fine = worst_at(512);
    let ratio = coarse / fine;
    report(
        "area law",
        coarse < 5e-3 && (3.0..=5.0).contains(&ratio),
        &format!(
            "worst |area(t)/area(0) - e^(-t)| = {coarse:.3e} at 256 cells (tol 5e-3); \
             refinement ratio {ratio:.2} at 512 cells (expect ~4)"
        ),
    );
}

#[test]
fn rescaled_area_constancy() {
    // In the rescaled gauge the total area is a constant of the motion; the
    // relative drift out to t = 5 must stay under 0.5%.
    let mut cfg = bump_config(256);
    cfg.t_end_rescaled = 5.0;
    let out = evolve(&cfg, FlowMode::Rescaled).unwrap();
    let a0 = out.records[0].rescaled_area;
    let drift = out
        .records
        .iter()
        .map(|r| (r.rescaled_area / a0 - 1.0).abs())
        .fold(0.0f64, f64::max);
    report(
        "rescaled-area constancy",
        drift < 5e-3,
        &format!("relative drift {drift:.3e} out to t = 5 (tol 5e-3)"),
    );
}

#[test]
fn maximum_principle_monitors() {
    // The radius sandwich, log-speed bracket, and gradient bound must hold
    // along the bump run within the automatic 1e-6 + h² slack, the gradient
    // must stay strictly below 1, and corrupted trajectories must be caught.
    let cfg = bump_config(256);
    let out = evolve(&cfg, FlowMode::Raw).unwrap();
    let grid = Grid::build(cfg.mode, cfg.n, cfg.rho_max, cfg.cells, cfg.cells_theta).unwrap();
    let ctx = cfg.monitor_context(FlowMode::Raw, grid.cap_area(), grid.h);
    let rep = check_trajectory(&out.records, &ctx).unwrap();

    let mut ok = rep.all_passed();
    for name in ["radius-sandwich", "log-speed-bracket", "gradient-monotone"] {
        ok &= rep.get(name).map(|c| c.verdict == Verdict::Pass) == Some(true);
    }
    let grad_max = out
        .records
        .iter()
        .map(|r| r.max_grad_phi)
        .fold(0.0f64, f64::max);
    ok &= grad_max < 1.0;

    // Negative controls: each corruption must flip its own check to FAIL.
    let mid = out.records.len() / 2;
    let mut bad = out.records.clone();
    bad[mid].max_u = bad[0].max_u; // a radius that refuses to shrink
    let r = check_trajectory(&bad, &ctx).unwrap();
    ok &= r.get("radius-sandwich").unwrap().verdict == Verdict::Fail;

    let mut bad = out.records.clone();
    bad[mid].max_phidot = 0.5;
    let r = check_trajectory(&bad, &ctx).unwrap();
    ok &= r.get("log-speed-bracket").unwrap().verdict == Verdict::Fail;

    let mut bad = out.records.clone();
    bad[mid].max_grad_phi = bad[0].max_grad_phi * 2.0 + 0.1;
    let r = check_trajectory(&bad, &ctx).unwrap();
    ok &= r.get("gradient-monotone").unwrap().verdict == Verdict::Fail;

    report(
        "maximum-principle monitors",
        ok,
        &format!(
            "all invariant checks pass on the bump run (auto slack 1e-6 + h^2), \
             sup |grad phi| = {grad_max:.3e} < 1, and all three negative controls fail"
        ),
    );
}

#[test]
fn long_time_convergence_and_limit_radius() {
    // The rescaled flow flattens to a constant: oscillation < 1e-6 by t = 20,
    // the constant matches (area(0)/|cap|)^{1/n} to 1e-3 relative, and it
    // stays inside the initial bracket.  Constant data is itself the fixed
    // point, so its limit radius is 1 to 1e-9.
    let mut cfg = bump_config(128);
    cfg.t_end_rescaled = 20.0;
    let out = evolve(&cfg, FlowMode::Rescaled).unwrap();
    let grid = Grid::build(cfg.mode, cfg.n, cfg.rho_max, cfg.cells, cfg.cells_theta).unwrap();

    let first = &out.records[0];
    let last = out.records.last().unwrap();
    let osc = last.osc_rescaled_u;
    let r_inf = 0.5 * (last.min_u + last.max_u);
    let predicted = (first.rescaled_area / grid.cap_area()).powf(1.0 / cfg.n as f64);
    let rel = (r_inf / predicted - 1.0).abs();
    let bracketed = r_inf >= first.min_u - 1e-9 && r_inf <= first.max_u + 1e-9;

    let mut ccfg = FlowConfig::default();
    ccfg.cells = 128;
    ccfg.t_end_rescaled = 2.0;
    let cout = evolve(&ccfg, FlowMode::Rescaled).unwrap();
    let clast = cout.records.last().unwrap();
    let c_dev = (0.5 * (clast.min_u + clast.max_u) - 1.0).abs();

    report(
        "long-time convergence",
        osc < 1e-6 && rel < 1e-3 && bracketed && c_dev < 1e-9,
        &format!(
            "osc(u) = {osc:.3e} at t = 20 (tol 1e-6); limit radius {r_inf:.9} vs \
             (area0/|cap|)^(1/n) = {predicted:.9}, rel err {rel:.3e} (tol 1e-3), \
             inside [{:.6}, {:.6}]; constant data limit deviates {c_dev:.3e} (tol 1e-9)",
            first.min_u, first.max_u
        ),
    );
}

#[test]
fn curvature_kernel_fixture_and_convergence() {
    // u = 1.5 over the n = 2 cap has H = n/u · 1/v = 4/3 exactly; the kernel
    // must hit it to 1e-12 from analytic derivatives, converge at second
    // order when the derivatives come from stencils, and keep its two mean
    // curvature routes within 1e-10 of each other.
    let guards = PointGuards::default();
    let mut gf = GeometryFields::new(2);

    let p = GraphPointData {
        y: vec![0.3, -0.2],
        u: 1.5,
        du: vec![0.0, 0.0],
        hess_u: vec![0.0; 4],
    };
    geometry_into(p.view(), guards, &mut gf).unwrap();
    let fixture_err = (gf.h_mean - 4.0 / 3.0).abs();
    let route_err = (linalg::trace(2, &gf.shape) - gf.h_mean).abs();

    // Manufactured graph with known derivatives for the stencil-order probe.
    let eval = |z: &[f64]| 1.5 + 0.1 * (1.1 * z[0] - 0.7 * z[1] + 0.3).sin();
    let y = [0.25f64, -0.4];
    let exact = {
        let arg = 1.1 * y[0] - 0.7 * y[1] + 0.3;
        let du = vec![0.11 * arg.cos(), -0.07 * arg.cos()];
        let ddu = [
            -0.1 * 1.1 * 1.1 * arg.sin(),
            0.1 * 1.1 * 0.7 * arg.sin(),
            0.1 * 1.1 * 0.7 * arg.sin(),
            -0.1 * 0.7 * 0.7 * arg.sin(),
        ];
        let m = imcf_core::base_geometry::metric_sigma(&y);
        let ydu = y[0] * du[0] + y[1] * du[1];
        let hess: Vec<f64> = (0..4).map(|e| ddu[e] + m.sigma[e] * ydu).collect();
        let p = GraphPointData {
            y: y.to_vec(),
            u: eval(&y),
            du,
            hess_u: hess,
        };
        geometry_into(p.view(), guards, &mut gf).unwrap();
        gf.h_mean
    };
    let mut h_of = |h: f64| -> f64 {
        let pd = geometry_checks::fd::point_data_from_scalar_field(&eval, &y, h);
        geometry_into(pd.view(), guards, &mut gf).unwrap();
        gf.h_mean
    };
    let e1 = (h_of(4e-2) - exact).abs();
    let e2 = (h_of(2e-2) - exact).abs();
    let order = (e1 / e2).log2();

    report(
        "curvature kernel",
        fixture_err < 1e-12 && route_err < 1e-10 && (1.8..=2.2).contains(&order),
        &format!(
            "|H - 4/3| = {fixture_err:.3e} (tol 1e-12); route gap {route_err:.3e} \
             (tol 1e-10); stencil convergence order {order:.3} (expect 2)"
        ),
    );
}

#[test]
fn base_geometry_identities() {
    // Constant-curvature identity, Christoffel symbols against FD metric
    // derivatives, and metric compatibility, audited in dimensions 2 and 3.
    let mut ok = true;
    let mut details = Vec::new();
    for n in [2usize, 3] {
        let checks = geometry_checks::run_all(n);
        for name in [
            "curvature-identity",
            "christoffel-vs-metric",
            "metric-compatibility",
        ] {
            let c = checks
                .iter()
                .find(|c| c.name == name)
                .unwrap_or_else(|| panic!("audit '{name}' missing"));
            ok &= c.pass;
            details.push(format!("{name}(n={n}) {:.2e}<={:.0e}", c.worst, c.tol));
        }
    }
    report("base geometry identities", ok, &details.join(", "));
}

#[test]
fn cross_mode_agreement_at_unit_time() {
    // The same rotationally symmetric bump evolved on the 1-D radial grid and
    // on the 2-D disk grid must agree to 1e-3 in sup norm at t = 1.
    let mut rcfg = bump_config(256);
    rcfg.t_end = 1.0;
    let radial = evolve(&rcfg, FlowMode::Raw).unwrap();
    let rgrid = Arc::new(Grid::build(GridMode::Radial, 2, 1.0, 256, 1).unwrap());
    let rvals: Vec<f64> = radial.state.u.interior().to_vec();

    let mut dcfg = bump_config(48);
    dcfg.mode = GridMode::Disk;
    dcfg.cells_theta = 16;
    dcfg.t_end = 1.0;
    let disk = evolve(&dcfg, FlowMode::Raw).unwrap();
    let dgrid = Grid::build(GridMode::Disk, 2, 1.0, 48, 16).unwrap();

    let mut sup = 0.0f64;
    for (k, &u) in disk.state.u.interior().iter().enumerate() {
        let rho = dgrid.node_rho(k);
        sup = sup.max((u - interp_radial(&rgrid, &rvals, rho)).abs());
    }
    report(
        "cross-mode agreement",
        sup <= 1e-3,
        &format!("sup |u_disk - u_radial| = {sup:.3e} at t = 1 (tol 1e-3)"),
    );
}

#[test]
fn identical_configs_produce_identical_bytes() {
    // Bitwise determinism: the same config must yield byte-identical
    // trajectory files on repeated runs.
    let mut cfg = bump_config(64);
    cfg.t_end = 0.5;
    cfg.csv_every = 10;
    let a = render_trajectory(&evolve(&cfg, FlowMode::Raw).unwrap().records);
    let b = render_trajectory(&evolve(&cfg, FlowMode::Raw).unwrap().records);
    report(
        "determinism",
        a == b,
        &format!("two identical runs rendered {} identical bytes", a.len()),
    );
}
