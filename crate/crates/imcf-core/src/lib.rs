//! Inverse mean curvature flow (IMCF) of spacelike graphic hypersurfaces in
//! Lorentz-Minkowski space `R^{n+1}_1`.
//!
//! The hypersurfaces are graphs `X = u(y) * x(y)` over a geodesic cap of the
//! unit hyperbolic plane `H^n(1)`, where `x(y) = (y, sqrt(1 + |y|^2))` is the
//! global graph chart of `H^n(1)` and `u > 0` is the radial graph function.
//! The flow moves each point with velocity `nu / H` (past-directed timelike
//! unit normal over mean curvature), which contracts the graph towards the
//! lightcone vertex; the zero Neumann condition `D_mu u = 0` holds on the cap
//! boundary throughout.
//!
//! Module map:
//! - [`base_geometry`]: the hyperbolic base metric in the graph chart
//!   (closed forms for `sigma`, its inverse, Christoffel symbols) plus
//!   Minkowski algebra and polar lifts.
//! - [`graph_geometry`]: pointwise geometry of the graph (spacelike factor,
//!   induced metric, normal, second fundamental form, mean curvature,
//!   support function) and total area.
//! - [`discretization`]: cell-centered grids (1D geodesic-radial, 2D polar
//!   disk), Neumann/pole ghost filling, central stencils, covariant Hessians
//!   and quadrature.
//! - [`flow`]: the explicit SSP-RK3 time stepper for the raw and rescaled
//!   flows with CFL control and singularity guards.
//! - [`monitors`]: trajectory records, a-priori bound checks, the exact
//!   round-solution oracle and report rendering.
//! - [`geometry_checks`]: randomized self-audit suites run by the
//!   `geometry-check` CLI subcommand.
//! - [`config`] / [`output`]: flat-file configuration, CSV trajectory and
//!   snapshot I/O.

// Stencil and field kernels index several parallel arrays by one node index;
// zip-iterator rewrites of those loops hide the math. Test setups mutate a
// `Default` config one field at a time on purpose.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::field_reassign_with_default)]

pub mod base_geometry;
pub mod config;
pub mod discretization;
pub mod flow;
pub mod geometry_checks;
pub mod graph_geometry;
pub mod linalg;
pub mod monitors;
pub mod output;
pub mod tolerances;

use std::fmt;

/// Which runtime guard tripped during a step or a state validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardKind {
    /// `1 - |D log u|^2` dropped to the spacelike guard threshold: the graph
    /// is about to stop being spacelike (tangent plane reaching the lightcone).
    Spacelike,
    /// Mean curvature dropped to the mean-convexity guard threshold.
    MeanConvexity,
    /// The graph function stopped being strictly positive/finite.
    Positivity,
}

impl fmt::Display for GuardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GuardKind::Spacelike => "spacelike",
            GuardKind::MeanConvexity => "mean-convexity",
            GuardKind::Positivity => "positivity",
        };
        f.write_str(s)
    }
}

/// Crate-wide error type. Each variant maps to a process exit code, see
/// [`Error::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration: bad file syntax, unknown key, invalid value, or
    /// initial data that violates the flow's standing assumptions at startup.
    #[error("config error: {0}")]
    Config(String),

    /// Invalid argument to a library operation (dimension mismatch, value out
    /// of the documented domain).
    #[error("input error: {0}")]
    Input(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A singularity guard tripped: the state left (or is about to leave) the
    /// class of strictly spacelike, strictly mean-convex positive graphs.
    #[error("{kind} guard tripped: {detail}")]
    Guard { kind: GuardKind, detail: String },

    /// One or more invariant monitors failed on a completed run.
    #[error("monitor failure: {0}")]
    Monitor(String),

    /// Internal consistency check failed (e.g. the two mean-curvature routes
    /// disagreed). Indicates a bug, not a user error.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code for this error: 2 monitor failure, 3 singularity
    /// guard, 4 configuration/input error. Success is 0.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Input(_) | Error::Io(_) => 4,
            Error::Guard { .. } => 3,
            Error::Monitor(_) => 2,
            Error::Internal(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
