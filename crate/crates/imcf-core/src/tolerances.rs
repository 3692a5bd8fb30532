//! Central numerical tolerances and guard thresholds.
//!
//! Everything here is dimensionless unless noted. Monitor tolerances that
//! depend on the grid resolution are resolved in [`crate::config`]; the
//! constants below are the fixed, resolution-independent ones.

/// The two internal mean-curvature routes (trace of the shape operator vs the
/// `log u` form) must agree to this relative tolerance at every evaluation.
pub const KERNEL_ROUTE_TOL: f64 = 1e-10;

/// Spacelike guard: a state is rejected when `1 - |D log u|^2 <=` this.
pub const EPS_SPACELIKE: f64 = 1e-10;

/// Mean-convexity guard: a state is rejected when `H <=` this.
pub const EPS_MEAN_CONVEX: f64 = 1e-8;

/// Default ceiling for the rescaled mean curvature monitor (`H * Theta` must
/// stay within `(0, h_theta_ceiling)`).
pub const H_THETA_CEILING: f64 = 1e3;

/// Default relative tolerance for the area law `area(t) = area(0) * exp(-t)`,
/// calibrated at 256 radial cells.
pub const TOL_AREA_LAW: f64 = 5e-3;

/// Default relative drift tolerance for rescaled-area constancy.
pub const TOL_RESCALED_AREA: f64 = 5e-3;

/// Default oscillation threshold below which a rescaled run counts as
/// converged to its limit constant.
pub const TOL_CONVERGENCE_OSC: f64 = 1e-6;

/// Default relative tolerance on the limit constant of a converged rescaled
/// run against `exp(-c) * (area(M_0) / area(cap))^(1/n)`.
pub const TOL_R_INFINITY: f64 = 1e-3;

/// Base term of the maximum-principle monitor tolerances; the resolved
/// tolerance adds an `O(h^2)` discretization slack on top (see
/// [`crate::config::Tolerances::resolve`]).
pub const TOL_MONITOR_BASE: f64 = 1e-6;

/// Relative tolerance for the oracle-compare subcommand (constant-data run
/// against the exact round solution).
pub const TOL_ORACLE_COMPARE: f64 = 1e-6;
