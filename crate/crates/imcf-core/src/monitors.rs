//! Trajectory records, invariant monitors and the exact round solution.
//!
//! The continuous motion obeys a family of a-priori bounds: the radius stays
//! sandwiched between the initial extrema carried by the gauge factor, the
//! logarithmic speed `φ̇` and the gradient `|Dφ|` never leave their initial
//! ranges, `H Θ` stays positive and bounded, and the total area decays
//! exactly as `e^{-t}`.  The monitors replay those statements against a
//! recorded trajectory — either fresh from the integrator or parsed back
//! from a CSV file — and grade each one `Pass` / `Fail` / `Inconclusive`.

use std::fmt;

use crate::flow::FlowMode;
use crate::tolerances;
use crate::{Error, Result};

/// One reduced observation of the evolving state.  All columns are plain
/// numbers so a record round-trips losslessly through CSV.
///
/// Column semantics depend on the run mode (`u` is the state's own radius
/// variable: raw `u` or rescaled `ũ`):
///
/// * `area` — raw-flow area (computed directly in raw mode, mapped through
///   `Θⁿ` in rescaled mode);
/// * `rescaled_area` — `Θ^{-n}` × raw area (the constant of the motion);
/// * `min/max_h_theta` — extrema of `H Θ` (equal to the rescaled mean
///   curvature `H̃` of `ũ`);
/// * `osc_rescaled_u` — `max ũ - min ũ`, the quantity that contracts to 0;
/// * `min/max_phidot` — extrema of the state's own logarithmic speed;
/// * `dt_used` — the step that produced this record (0 for the initial one).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub min_phi: f64,
    pub max_phi: f64,
    pub min_phidot: f64,
    pub max_phidot: f64,
    pub max_grad_phi: f64,
    pub min_h_theta: f64,
    pub max_h_theta: f64,
    pub area: f64,
    pub rescaled_area: f64,
    pub osc_rescaled_u: f64,
    pub dt_used: f64,
}

/// Exact solution through round initial data `u₀ ≡ r0`.
#[derive(Clone, Copy, Debug)]
pub struct RoundSolution {
    pub u: f64,
    pub h_mean: f64,
}

/// The round cap piece shrinks homothetically: `u(t) = r0 e^{-t/n}`,
/// `H(t) = n / u(t)`.
pub fn round_solution(r0: f64, n: usize, t: f64) -> RoundSolution {
    let u = r0 * (-t / n as f64).exp();
    RoundSolution {
        u,
        h_mean: n as f64 / u,
    }
}

/// Grade of one monitor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The trajectory does not contain enough information to decide
    /// (e.g. the oscillation is still contracting when the run ends).
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "PASS"),
            Verdict::Fail => write!(f, "FAIL"),
            Verdict::Inconclusive => write!(f, "INCONCLUSIVE"),
        }
    }
}

/// Outcome of one monitor over a whole trajectory.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub verdict: Verdict,
    /// Signed worst excess over the allowed threshold: negative values are
    /// the remaining margin, positive values the size of the breach.
    pub worst_violation: f64,
    /// Time of the worst excess.
    pub worst_t: f64,
    pub detail: String,
}

/// All monitor outcomes for one trajectory.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub mode: FlowMode,
    pub checks: Vec<CheckResult>,
}

impl InvariantReport {
    /// True when no check failed (inconclusive checks do not fail a run).
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Deterministic plain-text rendering (used for `report.txt`).
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("invariant checks (mode: {})\n", self.mode));
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {}: worst excess {:+.6e} at t = {:.6e}; {}\n",
                c.verdict, c.name, c.worst_violation, c.worst_t, c.detail
            ));
        }
        let failed = self
            .checks
            .iter()
            .filter(|c| c.verdict == Verdict::Fail)
            .count();
        let inconclusive = self
            .checks
            .iter()
            .filter(|c| c.verdict == Verdict::Inconclusive)
            .count();
        if failed > 0 {
            out.push_str(&format!(
                "result: FAIL ({failed} of {} checks failed)\n",
                self.checks.len()
            ));
        } else if inconclusive > 0 {
            out.push_str(&format!(
                "result: PASS ({} checks, {inconclusive} inconclusive)\n",
                self.checks.len()
            ));
        } else {
            out.push_str(&format!("result: PASS ({} checks)\n", self.checks.len()));
        }
        out
    }
}

/// Everything the monitors need to know beyond the records themselves.
#[derive(Clone, Copy, Debug)]
pub struct MonitorContext {
    pub mode: FlowMode,
    pub n: usize,
    /// Area of the unit cap (`u ≡ 1`) on the same domain.
    pub cap_area: f64,
    /// Radial grid spacing, used for the automatic tolerance floor.
    pub grid_h: f64,
    /// Overrides for the discretization-aware tolerances; `None` means
    /// `1e-6 + h²`.
    pub tol_c0: Option<f64>,
    pub tol_phidot: Option<f64>,
    pub tol_gradient: Option<f64>,
    pub tol_area: f64,
    pub tol_rescaled_area: f64,
    pub tol_conv: f64,
    pub tol_r_inf: f64,
    pub h_theta_ceiling: f64,
}

impl MonitorContext {
    fn auto_tol(&self, choice: Option<f64>) -> f64 {
        choice.unwrap_or(tolerances::TOL_MONITOR_BASE + self.grid_h * self.grid_h)
    }
}

struct Worst {
    value: f64,
    t: f64,
}

impl Worst {
    fn new() -> Worst {
        Worst {
            value: f64::NEG_INFINITY,
            t: 0.0,
        }
    }
    fn update(&mut self, value: f64, t: f64) {
        if value > self.value {
            self.value = value;
            self.t = t;
        }
    }
    fn result(self, name: &'static str, detail: String) -> CheckResult {
        CheckResult {
            name,
            verdict: if self.value <= 0.0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            worst_violation: self.value,
            worst_t: self.t,
            detail,
        }
    }
}

/// Run every applicable monitor over a recorded trajectory.
///
/// The records must come from one run: monotone in `t`, starting at the
/// initial observation (whose extrema seed the comparison bounds).
pub fn check_trajectory(
    records: &[TrajectoryRecord],
    ctx: &MonitorContext,
) -> Result<InvariantReport> {
    if records.is_empty() {
        return Err(Error::Input("cannot check an empty trajectory".to_string()));
    }
    // Written as a negated `>` so NaN times are rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    for pair in records.windows(2) {
        if !(pair[1].t > pair[0].t) {
            return Err(Error::Input(format!(
                "trajectory times must increase strictly (t = {} then {})",
                pair[0].t, pair[1].t
            )));
        }
    }
    let first = &records[0];
    let n = ctx.n as f64;
    let mut checks = Vec::new();

    // Radius sandwich: the state's own radius stays inside the initial
    // extrema carried by the appropriate factor (raw: e^{-t/n}; rescaled:
    // constant bounds — the rescaled radius never leaves its initial range).
    {
        let tol = ctx.auto_tol(ctx.tol_c0);
        let mut worst = Worst::new();
        for r in records {
            let carry = match ctx.mode {
                FlowMode::Raw => (-r.t / n).exp(),
                FlowMode::Rescaled => 1.0,
            };
            let lower = first.min_u * carry;
            let upper = first.max_u * carry;
            let breach = ((lower - r.min_u) / lower).max((r.max_u - upper) / upper);
            worst.update(breach - tol, r.t);
        }
        checks.push(worst.result(
            "radius-sandwich",
            format!("radius extrema stay within the transported initial range (rel tol {tol:.3e})"),
        ));
    }

    // Logarithmic speed: φ̇ never leaves its initial range.
    {
        let tol = ctx.auto_tol(ctx.tol_phidot);
        let mut worst = Worst::new();
        for r in records {
            let breach = (first.min_phidot - r.min_phidot).max(r.max_phidot - first.max_phidot);
            worst.update(breach - tol, r.t);
        }
        checks.push(worst.result(
            "log-speed-bracket",
            format!("phidot extrema stay within the initial range (abs tol {tol:.3e})"),
        ));
    }

    // Gradient: max |Dφ| is non-increasing and stays below 1 (spacelike).
    {
        let tol = ctx.auto_tol(ctx.tol_gradient);
        let mut worst = Worst::new();
        for r in records {
            let breach = (r.max_grad_phi - first.max_grad_phi)
                .max(r.max_grad_phi - (1.0 - tolerances::EPS_SPACELIKE));
            worst.update(breach - tol, r.t);
        }
        checks.push(worst.result(
            "gradient-monotone",
            format!(
                "max |D log u| never exceeds its initial value and stays below 1 (abs tol {tol:.3e})"
            ),
        ));
    }

    // Scale-invariant curvature window: 0 < H Θ < ceiling throughout.
    {
        let mut worst = Worst::new();
        for r in records {
            let breach = (-r.min_h_theta).max(r.max_h_theta - ctx.h_theta_ceiling);
            worst.update(breach, r.t);
        }
        checks.push(worst.result(
            "curvature-window",
            format!(
                "H Θ stays positive and below the ceiling {:.3e}",
                ctx.h_theta_ceiling
            ),
        ));
    }

    // Exact area law: |area(t)/area(0) - e^{-t}| stays small.
    {
        let mut worst = Worst::new();
        for r in records {
            let drift = (r.area / first.area - (-r.t).exp()).abs();
            worst.update(drift - ctx.tol_area, r.t);
        }
        checks.push(worst.result(
            "area-law",
            format!(
                "total area decays as e^(-t) (tol {:.3e} on the area ratio)",
                ctx.tol_area
            ),
        ));
    }

    // The rescaled area is a constant of the motion.
    {
        let mut worst = Worst::new();
        for r in records {
            let drift = (r.rescaled_area / first.rescaled_area - 1.0).abs();
            worst.update(drift - ctx.tol_rescaled_area, r.t);
        }
        checks.push(worst.result(
            "rescaled-area-constant",
            format!(
                "rescaled area stays constant (rel tol {:.3e})",
                ctx.tol_rescaled_area
            ),
        ));
    }

    // Long-time statements: only a rescaled run can witness them.
    if ctx.mode == FlowMode::Rescaled {
        let last = records.last().unwrap();
        let osc_end = last.osc_rescaled_u;
        let osc_start = first.osc_rescaled_u;
        let converged = osc_end < ctx.tol_conv;
        {
            let verdict = if converged {
                Verdict::Pass
            } else if osc_end < 0.5 * osc_start {
                Verdict::Inconclusive
            } else {
                Verdict::Fail
            };
            checks.push(CheckResult {
                name: "convergence-oscillation",
                verdict,
                worst_violation: osc_end - ctx.tol_conv,
                worst_t: last.t,
                detail: match verdict {
                    Verdict::Inconclusive => format!(
                        "oscillation {osc_end:.3e} still contracting (started at {osc_start:.3e}); extend the run to decide"
                    ),
                    _ => format!(
                        "final radius oscillation {osc_end:.3e} against threshold {:.3e}",
                        ctx.tol_conv
                    ),
                },
            });
        }

        // Limit radius: midpoint of the final rescaled extrema.  The
        // prediction e^{-c} (area₀/cap_area)^{1/n} equals
        // (rescaled_area₀/cap_area)^{1/n}, which keeps the check free of any
        // externally supplied gauge constant when replaying a stored file.
        let r_inf = 0.5 * (last.min_u + last.max_u);
        let predicted = (first.rescaled_area / ctx.cap_area).powf(1.0 / n);
        {
            let excess = (r_inf / predicted - 1.0).abs() - ctx.tol_r_inf;
            let verdict = if !converged {
                Verdict::Inconclusive
            } else if excess <= 0.0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            checks.push(CheckResult {
                name: "limit-radius-identity",
                verdict,
                worst_violation: excess,
                worst_t: last.t,
                detail: if converged {
                    format!(
                        "limit radius {r_inf:.9e} vs e^(-c) (area0/cap_area)^(1/n) = {predicted:.9e} (rel tol {:.3e})",
                        ctx.tol_r_inf
                    )
                } else {
                    "not converged; identity cannot be evaluated yet".to_string()
                },
            });
        }

        // The limit radius inherits the initial rescaled radius bracket.
        {
            let tol = ctx.auto_tol(ctx.tol_c0);
            let lower = first.min_u;
            let upper = first.max_u;
            let excess = ((lower - r_inf) / lower).max((r_inf - upper) / upper) - tol;
            let verdict = if !converged {
                Verdict::Inconclusive
            } else if excess <= 0.0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            checks.push(CheckResult {
                name: "limit-radius-bracket",
                verdict,
                worst_violation: excess,
                worst_t: last.t,
                detail: format!(
                    "limit radius {r_inf:.9e} within the initial rescaled range [{lower:.9e}, {upper:.9e}] (rel tol {tol:.3e})"
                ),
            });
        }
    }

    Ok(InvariantReport {
        mode: ctx.mode,
        checks,
    })
}
