//! Independent cross-checks of the geometry kernel.
//!
//! Everything here validates the closed-form implementations in
//! [`crate::base_geometry`] and [`crate::graph_geometry`] against quantities
//! assembled by a *different* route — finite differences of the ambient
//! embedding, Christoffel symbols rebuilt from metric derivatives, curvature
//! contracted from finite-differenced connection coefficients, quadrature
//! against a composite Simpson rule.  The [`run_all`] suite drives a fixed,
//! seeded set of sample points and returns one outcome per check; it backs
//! the `geometry-check` command.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::base_geometry::{
    chart_embed, christoffel_sigma, metric_sigma, minkowski_inner, unit_sphere_area,
};
use crate::discretization::{Grid, GridMode};
use crate::graph_geometry::{geometry_into, GeometryFields, GraphPointData, PointGuards};
use crate::linalg;

/// Finite-difference oracles: every function here approximates a geometric
/// quantity without using the closed form under test.
pub mod fd {
    use super::*;

    /// Central-difference tangent `∂x/∂y_i` of the chart embedding.
    pub fn embed_tangent(y: &[f64], i: usize, h: f64) -> Vec<f64> {
        let mut yp = y.to_vec();
        let mut ym = y.to_vec();
        yp[i] += h;
        ym[i] -= h;
        let xp = chart_embed(&yp);
        let xm = chart_embed(&ym);
        xp.iter()
            .zip(&xm)
            .map(|(p, m)| (p - m) / (2.0 * h))
            .collect()
    }

    /// Pull back the ambient Minkowski product through FD tangents:
    /// `sigma_ij ≈ <∂_i x, ∂_j x>_L`.
    pub fn pullback_sigma(y: &[f64], h: f64) -> Vec<f64> {
        let n = y.len();
        let tangents: Vec<Vec<f64>> = (0..n).map(|i| embed_tangent(y, i, h)).collect();
        let mut sigma = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                sigma[i * n + j] = minkowski_inner(&tangents[i], &tangents[j]).unwrap();
            }
        }
        sigma
    }

    /// Christoffel symbols rebuilt from FD metric derivatives:
    /// `Γ^k_ij = ½ σ^{kl} (∂_i σ_lj + ∂_j σ_li - ∂_l σ_ij)`.
    pub fn christoffel_from_metric(y: &[f64], h: f64) -> Vec<f64> {
        let n = y.len();
        // dsigma[k][i][j] = ∂_k sigma_ij
        let mut dsigma = vec![0.0; n * n * n];
        for k in 0..n {
            let mut yp = y.to_vec();
            let mut ym = y.to_vec();
            yp[k] += h;
            ym[k] -= h;
            let sp = metric_sigma(&yp);
            let sm = metric_sigma(&ym);
            for e in 0..n * n {
                dsigma[k * n * n + e] = (sp.sigma[e] - sm.sigma[e]) / (2.0 * h);
            }
        }
        let m = metric_sigma(y);
        let mut gamma = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += m.sigma_inv[k * n + l]
                            * (dsigma[i * n * n + l * n + j] + dsigma[j * n * n + l * n + i]
                                - dsigma[l * n * n + i * n + j]);
                    }
                    gamma[k * n * n + i * n + j] = 0.5 * s;
                }
            }
        }
        gamma
    }

    /// Worst residual of metric compatibility,
    /// `∂_k σ_ij - Γ^l_ki σ_lj - Γ^l_kj σ_il = 0`,
    /// with FD metric derivatives against the closed-form symbols.
    pub fn metric_compatibility_residual(y: &[f64], h: f64) -> f64 {
        let n = y.len();
        let m = metric_sigma(y);
        let gamma = christoffel_sigma(y);
        let mut worst = 0.0f64;
        for k in 0..n {
            let mut yp = y.to_vec();
            let mut ym = y.to_vec();
            yp[k] += h;
            ym[k] -= h;
            let sp = metric_sigma(&yp);
            let sm = metric_sigma(&ym);
            for i in 0..n {
                for j in 0..n {
                    let dk = (sp.sigma[i * n + j] - sm.sigma[i * n + j]) / (2.0 * h);
                    let mut corr = 0.0;
                    for l in 0..n {
                        corr += gamma[l * n * n + k * n + i] * m.sigma[l * n + j]
                            + gamma[l * n * n + k * n + j] * m.sigma[i * n + l];
                    }
                    worst = worst.max((dk - corr).abs());
                }
            }
        }
        worst
    }

    /// Worst residual of the constant-curvature identity
    /// `R_ijml = σ_il σ_jm - σ_im σ_jl`, with the curvature tensor assembled
    /// from finite differences of the closed-form Christoffel symbols:
    /// `R^k_ijm = -∂_i Γ^k_jm - Γ^p_jm Γ^k_ip + ∂_j Γ^k_im + Γ^p_im Γ^k_jp`.
    pub fn curvature_identity_residual(y: &[f64], h: f64) -> f64 {
        let n = y.len();
        let gamma = christoffel_sigma(y);
        let m = metric_sigma(y);
        // dgamma[a][k][i][j] = ∂_a Γ^k_ij
        let mut dgamma = vec![0.0; n * n * n * n];
        for a in 0..n {
            let mut yp = y.to_vec();
            let mut ym = y.to_vec();
            yp[a] += h;
            ym[a] -= h;
            let gp = christoffel_sigma(&yp);
            let gm = christoffel_sigma(&ym);
            for e in 0..n * n * n {
                dgamma[a * n * n * n + e] = (gp[e] - gm[e]) / (2.0 * h);
            }
        }
        let g = |k: usize, i: usize, j: usize| gamma[k * n * n + i * n + j];
        let dg =
            |a: usize, k: usize, i: usize, j: usize| dgamma[a * n * n * n + k * n * n + i * n + j];
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for mm in 0..n {
                    for l in 0..n {
                        let mut r = 0.0;
                        for k in 0..n {
                            let mut rk = -dg(i, k, j, mm) + dg(j, k, i, mm);
                            for p in 0..n {
                                rk += -g(p, j, mm) * g(k, i, p) + g(p, i, mm) * g(k, j, p);
                            }
                            r += m.sigma[k * n + l] * rk;
                        }
                        let target = m.sigma[i * n + l] * m.sigma[j * n + mm]
                            - m.sigma[i * n + mm] * m.sigma[j * n + l];
                        worst = worst.max((r - target).abs());
                    }
                }
            }
        }
        worst
    }

    /// FD tangent of the graph embedding `X(y) = u(y) x(y)`.
    pub fn graph_tangent(u: &dyn Fn(&[f64]) -> f64, y: &[f64], i: usize, h: f64) -> Vec<f64> {
        let embed = |z: &[f64]| -> Vec<f64> {
            let uz = u(z);
            chart_embed(z).iter().map(|c| c * uz).collect()
        };
        let mut yp = y.to_vec();
        let mut ym = y.to_vec();
        yp[i] += h;
        ym[i] -= h;
        let xp = embed(&yp);
        let xm = embed(&ym);
        xp.iter()
            .zip(&xm)
            .map(|(p, m)| (p - m) / (2.0 * h))
            .collect()
    }

    /// First fundamental form of the graph from FD tangents.
    pub fn graph_first_fundamental(u: &dyn Fn(&[f64]) -> f64, y: &[f64], h: f64) -> Vec<f64> {
        let n = y.len();
        let tangents: Vec<Vec<f64>> = (0..n).map(|i| graph_tangent(u, y, i, h)).collect();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = minkowski_inner(&tangents[i], &tangents[j]).unwrap();
            }
        }
        g
    }

    /// Second fundamental form from FD second derivatives of the embedding:
    /// `h_ij = <∂_i ∂_j X, ν>`.  No connection correction is needed because
    /// the normal is orthogonal to the tangent space.
    pub fn graph_second_fundamental(
        u: &dyn Fn(&[f64]) -> f64,
        y: &[f64],
        normal: &[f64],
        h: f64,
    ) -> Vec<f64> {
        let n = y.len();
        let embed = |z: &[f64]| -> Vec<f64> {
            let uz = u(z);
            chart_embed(z).iter().map(|c| c * uz).collect()
        };
        let x0 = embed(y);
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let second: Vec<f64> = if i == j {
                    let mut yp = y.to_vec();
                    let mut ym = y.to_vec();
                    yp[i] += h;
                    ym[i] -= h;
                    let xp = embed(&yp);
                    let xm = embed(&ym);
                    (0..=n)
                        .map(|c| (xp[c] - 2.0 * x0[c] + xm[c]) / (h * h))
                        .collect()
                } else {
                    let mut ypp = y.to_vec();
                    let mut ypm = y.to_vec();
                    let mut ymp = y.to_vec();
                    let mut ymm = y.to_vec();
                    ypp[i] += h;
                    ypp[j] += h;
                    ypm[i] += h;
                    ypm[j] -= h;
                    ymp[i] -= h;
                    ymp[j] += h;
                    ymm[i] -= h;
                    ymm[j] -= h;
                    let xpp = embed(&ypp);
                    let xpm = embed(&ypm);
                    let xmp = embed(&ymp);
                    let xmm = embed(&ymm);
                    (0..=n)
                        .map(|c| (xpp[c] - xpm[c] - xmp[c] + xmm[c]) / (4.0 * h * h))
                        .collect()
                };
                out[i * n + j] = minkowski_inner(&second, normal).unwrap();
            }
        }
        out
    }

    /// Build [`GraphPointData`] for a scalar field using FD derivatives only:
    /// centered gradient, centered chart Hessian, covariant correction
    /// `σ_ij (y·Du)` added analytically.
    pub fn point_data_from_scalar_field(
        u: &dyn Fn(&[f64]) -> f64,
        y: &[f64],
        h: f64,
    ) -> GraphPointData {
        let n = y.len();
        let u0 = u(y);
        let mut du = vec![0.0; n];
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            let mut yp = y.to_vec();
            let mut ym = y.to_vec();
            yp[i] += h;
            ym[i] -= h;
            du[i] = (u(&yp) - u(&ym)) / (2.0 * h);
            hess[i * n + i] = (u(&yp) - 2.0 * u0 + u(&ym)) / (h * h);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let mut ypp = y.to_vec();
                let mut ypm = y.to_vec();
                let mut ymp = y.to_vec();
                let mut ymm = y.to_vec();
                ypp[i] += h;
                ypp[j] += h;
                ypm[i] += h;
                ypm[j] -= h;
                ymp[i] -= h;
                ymp[j] += h;
                ymm[i] -= h;
                ymm[j] -= h;
                let v = (u(&ypp) - u(&ypm) - u(&ymp) + u(&ymm)) / (4.0 * h * h);
                hess[i * n + j] = v;
                hess[j * n + i] = v;
            }
        }
        let m = metric_sigma(y);
        let ydu: f64 = y.iter().zip(&du).map(|(a, b)| a * b).sum();
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] += m.sigma[i * n + j] * ydu;
            }
        }
        GraphPointData {
            y: y.to_vec(),
            u: u0,
            du,
            hess_u: hess,
        }
    }

    /// Composite Simpson quadrature with `intervals` (even) subintervals.
    pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
        let m = if intervals.is_multiple_of(2) {
            intervals
        } else {
            intervals + 1
        };
        let h = (b - a) / m as f64;
        let mut s = f(a) + f(b);
        for i in 1..m {
            let x = a + i as f64 * h;
            s += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }
}

/// Analytic test states: smooth positive fields with closed-form derivatives.
pub mod manufactured {
    use super::*;

    /// Separable two-dimensional state
    /// `u(y) = c0 + a sin(k1 y1 + phase) cos(k2 y2)`.
    #[derive(Clone, Copy, Debug)]
    pub struct Manufactured {
        pub c0: f64,
        pub a: f64,
        pub k1: f64,
        pub k2: f64,
        pub phase: f64,
    }

    impl Manufactured {
        pub fn eval(&self, y: &[f64]) -> f64 {
            self.c0 + self.a * (self.k1 * y[0] + self.phase).sin() * (self.k2 * y[1]).cos()
        }

        pub fn grad(&self, y: &[f64]) -> [f64; 2] {
            let s1 = (self.k1 * y[0] + self.phase).sin();
            let c1 = (self.k1 * y[0] + self.phase).cos();
            let s2 = (self.k2 * y[1]).sin();
            let c2 = (self.k2 * y[1]).cos();
            [self.a * self.k1 * c1 * c2, -self.a * self.k2 * s1 * s2]
        }

        /// Plain chart second derivatives (no covariant correction).
        pub fn chart_hess(&self, y: &[f64]) -> [f64; 4] {
            let s1 = (self.k1 * y[0] + self.phase).sin();
            let c1 = (self.k1 * y[0] + self.phase).cos();
            let s2 = (self.k2 * y[1]).sin();
            let c2 = (self.k2 * y[1]).cos();
            let h11 = -self.a * self.k1 * self.k1 * s1 * c2;
            let h12 = -self.a * self.k1 * self.k2 * c1 * s2;
            let h22 = -self.a * self.k2 * self.k2 * s1 * c2;
            [h11, h12, h12, h22]
        }

        /// Full point data with the covariant Hessian; `None` when the state
        /// is too close to null (or too small) at `y` to make a useful probe.
        pub fn point_data(&self, y: &[f64]) -> Option<GraphPointData> {
            let u = self.eval(y);
            if u < 0.2 {
                return None;
            }
            let du = self.grad(y);
            let m = metric_sigma(y);
            let ydu = y[0] * du[0] + y[1] * du[1];
            let ch = self.chart_hess(y);
            let hess: Vec<f64> = (0..4).map(|e| ch[e] + m.sigma[e] * ydu).collect();
            // σ-norm of the gradient, for the spacelike margin.
            let mut grad_sq = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    grad_sq += m.sigma_inv[i * 2 + j] * du[i] * du[j];
                }
            }
            if 1.0 - grad_sq / (u * u) < 0.05 {
                return None;
            }
            Some(GraphPointData {
                y: y.to_vec(),
                u,
                du: du.to_vec(),
                hess_u: hess,
            })
        }
    }

    /// Random separable state with moderate amplitude and wavenumbers.
    pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> Manufactured {
        assert_eq!(n, 2, "separable manufactured states are two-dimensional");
        Manufactured {
            c0: rng.gen_range(1.0..2.0),
            a: rng.gen_range(-0.15..0.15),
            k1: rng.gen_range(0.6..1.6),
            k2: rng.gen_range(0.6..1.6),
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        }
    }

    /// Plane-wave state `u(y) = c0 + a sin(k·y + phase)` in any dimension.
    #[derive(Clone, Debug)]
    pub struct PlaneWave {
        pub c0: f64,
        pub a: f64,
        pub k: Vec<f64>,
        pub phase: f64,
    }

    impl PlaneWave {
        pub fn eval(&self, y: &[f64]) -> f64 {
            let arg: f64 = self.k.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() + self.phase;
            self.c0 + self.a * arg.sin()
        }

        pub fn point_data(&self, y: &[f64]) -> Option<GraphPointData> {
            let n = y.len();
            let arg: f64 = self.k.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() + self.phase;
            let u = self.c0 + self.a * arg.sin();
            if u < 0.2 {
                return None;
            }
            let du: Vec<f64> = self.k.iter().map(|ki| self.a * ki * arg.cos()).collect();
            let m = metric_sigma(y);
            let ydu: f64 = y.iter().zip(&du).map(|(a, b)| a * b).sum();
            let mut hess = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    hess[i * n + j] =
                        -self.a * self.k[i] * self.k[j] * arg.sin() + m.sigma[i * n + j] * ydu;
                }
            }
            let mut grad_sq = 0.0;
            for i in 0..n {
                for j in 0..n {
                    grad_sq += m.sigma_inv[i * n + j] * du[i] * du[j];
                }
            }
            if 1.0 - grad_sq / (u * u) < 0.05 {
                return None;
            }
            Some(GraphPointData {
                y: y.to_vec(),
                u,
                du,
                hess_u: hess,
            })
        }
    }

    pub fn random_plane_wave(rng: &mut ChaCha8Rng, n: usize) -> PlaneWave {
        PlaneWave {
            c0: rng.gen_range(1.0..2.0),
            a: rng.gen_range(-0.12..0.12),
            k: (0..n).map(|_| rng.gen_range(-1.2..1.2)).collect(),
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        }
    }
}

/// Outcome of a single audit suite.
#[derive(Clone, Debug)]
pub struct AuditCheck {
    pub name: &'static str,
    /// Worst observed residual (or deviation from the expected order).
    pub worst: f64,
    pub tol: f64,
    pub pass: bool,
}

impl AuditCheck {
    fn from(name: &'static str, worst: f64, tol: f64) -> Self {
        AuditCheck {
            name,
            worst,
            tol,
            pass: worst <= tol && worst.is_finite(),
        }
    }
}

fn sample_y(rng: &mut ChaCha8Rng, n: usize, max_comp: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-max_comp..max_comp)).collect()
}

/// Run every audit suite for chart dimension `n` with fixed internal seeds.
/// Deterministic: the same `n` always produces the same outcomes.
pub fn run_all(n: usize) -> Vec<AuditCheck> {
    let guards = PointGuards::default();
    let mut out = Vec::new();

    // --- base-metric suites -------------------------------------------------
    {
        let mut rng = ChaCha8Rng::seed_from_u64(1001);
        let mut worst_pb = 0.0f64;
        let mut worst_inv = 0.0f64;
        for _ in 0..40 {
            let y = sample_y(&mut rng, n, 1.5);
            let m = metric_sigma(&y);
            worst_pb = worst_pb.max(linalg::max_abs_diff(
                &m.sigma,
                &fd::pullback_sigma(&y, 1e-4),
            ));
            worst_inv = worst_inv.max(linalg::identity_residual(n, &m.sigma, &m.sigma_inv));
        }
        out.push(AuditCheck::from("sigma-pullback", worst_pb, 1e-6));
        out.push(AuditCheck::from("sigma-inverse", worst_inv, 1e-12));
    }
    {
        let mut rng = ChaCha8Rng::seed_from_u64(1002);
        let mut worst_g = 0.0f64;
        let mut worst_c = 0.0f64;
        let mut worst_r = 0.0f64;
        for _ in 0..30 {
            let y = sample_y(&mut rng, n, 1.5);
            let gamma = christoffel_sigma(&y);
            worst_g = worst_g.max(linalg::max_abs_diff(
                &gamma,
                &fd::christoffel_from_metric(&y, 1e-5),
            ));
            worst_c = worst_c.max(fd::metric_compatibility_residual(&y, 1e-5));
            worst_r = worst_r.max(fd::curvature_identity_residual(&y, 1e-4));
        }
        out.push(AuditCheck::from("christoffel-vs-metric", worst_g, 1e-6));
        out.push(AuditCheck::from("metric-compatibility", worst_c, 1e-6));
        out.push(AuditCheck::from("curvature-identity", worst_r, 1e-4));
    }

    // --- kernel-vs-embedding suites ----------------------------------------
    {
        let mut rng = ChaCha8Rng::seed_from_u64(1003);
        let mut gf = GeometryFields::new(n);
        let mut worst_g = 0.0f64;
        let mut worst_h = 0.0f64;
        let mut worst_unit = 0.0f64;
        let mut worst_tan = 0.0f64;
        let mut worst_w = 0.0f64;
        let mut worst_routes = 0.0f64;
        let mut worst_area = 0.0f64;
        let mut checked = 0usize;
        for _ in 0..400 {
            if checked >= 30 {
                break;
            }
            let state = manufactured::random_plane_wave(&mut rng, n);
            let y = sample_y(&mut rng, n, 0.7);
            let Some(p) = state.point_data(&y) else {
                continue;
            };
            if geometry_into(p.view(), guards, &mut gf).is_err() {
                continue;
            }
            let eval = |z: &[f64]| state.eval(z);

            let g_fd = fd::graph_first_fundamental(&eval, &y, 1e-5);
            worst_g = worst_g.max(linalg::max_abs_diff(&gf.g, &g_fd));

            let h_fd = fd::graph_second_fundamental(&eval, &y, &gf.normal, 1e-4);
            worst_h = worst_h.max(linalg::max_abs_diff(&gf.second_fundamental, &h_fd));

            let unit = minkowski_inner(&gf.normal, &gf.normal).unwrap();
            worst_unit = worst_unit.max((unit + 1.0).abs());
            for i in 0..n {
                let xi = fd::graph_tangent(&eval, &y, i, 1e-5);
                worst_tan = worst_tan.max(minkowski_inner(&xi, &gf.normal).unwrap().abs());
            }

            let x_scaled: Vec<f64> = chart_embed(&y).iter().map(|c| c * p.u).collect();
            let w_direct = minkowski_inner(&x_scaled, &gf.normal).unwrap();
            worst_w = worst_w.max((w_direct - gf.support_w).abs());

            worst_routes = worst_routes.max((linalg::trace(n, &gf.shape) - gf.h_mean).abs());

            let det_g = linalg::det(n, &gf.g);
            worst_area = worst_area.max((det_g.max(0.0).sqrt() - gf.area_element).abs());

            checked += 1;
        }
        out.push(AuditCheck::from("embedding-metric", worst_g, 1e-6));
        out.push(AuditCheck::from("embedding-second-form", worst_h, 1e-5));
        out.push(AuditCheck::from("normal-unit", worst_unit, 1e-10));
        out.push(AuditCheck::from("normal-tangency", worst_tan, 1e-8));
        out.push(AuditCheck::from("support-function", worst_w, 1e-10));
        out.push(AuditCheck::from(
            "mean-curvature-routes",
            worst_routes,
            1e-10,
        ));
        out.push(AuditCheck::from("area-element-det", worst_area, 1e-10));
    }

    // --- stencil-order probe -------------------------------------------------
    {
        let mut rng = ChaCha8Rng::seed_from_u64(1004);
        let mut worst = 0.0f64;
        let mut checked = 0usize;
        let mut gf = GeometryFields::new(n);
        for _ in 0..100 {
            if checked >= 5 {
                break;
            }
            let state = manufactured::random_plane_wave(&mut rng, n);
            let y = sample_y(&mut rng, n, 0.5);
            let Some(p) = state.point_data(&y) else {
                continue;
            };
            if geometry_into(p.view(), guards, &mut gf).is_err() {
                continue;
            }
            let exact = gf.h_mean;
            let eval = |z: &[f64]| state.eval(z);
            let h_of = |h: f64| -> Option<f64> {
                let pd = fd::point_data_from_scalar_field(&eval, &y, h);
                let mut g2 = GeometryFields::new(n);
                geometry_into(pd.view(), guards, &mut g2).ok()?;
                Some(g2.h_mean)
            };
            // Spacings large enough that truncation dominates the f64
            // cancellation noise of second differences (~eps/h^2).
            let (Some(h1), Some(h2)) = (h_of(4e-2), h_of(2e-2)) else {
                continue;
            };
            let e1 = (h1 - exact).abs();
            let e2 = (h2 - exact).abs();
            if e2 < 1e-11 {
                continue; // too close to exact to measure an order
            }
            let order = (e1 / e2).log2();
            worst = worst.max((order - 2.0).abs());
            checked += 1;
        }
        out.push(AuditCheck::from("mean-curvature-order", worst, 0.2));
    }

    // --- boundary compatibility ---------------------------------------------
    {
        let mut rng = ChaCha8Rng::seed_from_u64(1005);
        let mut worst = 0.0f64;
        let mut gf = GeometryFields::new(n);
        let y_scale = 1.0f64.sinh();
        let mut checked = 0usize;
        for _ in 0..200 {
            if checked >= 20 {
                break;
            }
            // Random boundary point |y| = sinh(rho_max).
            let mut omega = sample_y(&mut rng, n, 1.0);
            let norm: f64 = omega.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm < 1e-3 {
                continue;
            }
            omega.iter_mut().for_each(|c| *c *= y_scale / norm);
            let y = omega;

            let u = rng.gen_range(1.0..2.0);
            let mut du = sample_y(&mut rng, n, 0.3);
            // Enforce the Neumann condition: no chart-radial component.
            let y_norm_sq: f64 = y.iter().map(|c| c * c).sum();
            let radial: f64 = du.iter().zip(&y).map(|(d, c)| d * c).sum::<f64>() / y_norm_sq;
            for i in 0..n {
                du[i] -= radial * y[i];
            }
            let m = metric_sigma(&y);
            let ydu: f64 = y.iter().zip(&du).map(|(a, b)| a * b).sum();
            let hess: Vec<f64> = (0..n * n).map(|e| m.sigma[e] * ydu).collect();
            let p = GraphPointData {
                y: y.clone(),
                u,
                du: du.clone(),
                hess_u: hess,
            };
            if geometry_into(p.view(), guards, &mut gf).is_err() {
                continue;
            }
            // Conormal direction pushed onto the graph: μ = ŷ^i X_i with
            // X_i = du_i x + u x_i.
            let x = chart_embed(&y);
            let y_norm = y_norm_sq.sqrt();
            let mut mu = vec![0.0; n + 1];
            for i in 0..n {
                let hat = y[i] / y_norm;
                for c in 0..n {
                    let xi_c = if c == i { 1.0 } else { 0.0 };
                    mu[c] += hat * (du[i] * x[c] + u * xi_c);
                }
                mu[n] += hat * (du[i] * x[n] + u * y[i] / x[n]);
            }
            worst = worst.max(minkowski_inner(&mu, &gf.normal).unwrap().abs());
            checked += 1;
        }
        out.push(AuditCheck::from("neumann-conormal", worst, 1e-8));
    }

    // --- round data and quadrature -------------------------------------------
    {
        let mut rng = ChaCha8Rng::seed_from_u64(1006);
        let mut worst = 0.0f64;
        let mut gf = GeometryFields::new(n);
        for _ in 0..10 {
            let r0 = rng.gen_range(0.5..3.0);
            let y = sample_y(&mut rng, n, 1.0);
            let p = GraphPointData {
                y,
                u: r0,
                du: vec![0.0; n],
                hess_u: vec![0.0; n * n],
            };
            geometry_into(p.view(), guards, &mut gf).unwrap();
            worst = worst.max((gf.h_mean - n as f64 / r0).abs());
        }
        out.push(AuditCheck::from("round-sphere-curvature", worst, 1e-12));

        let grid = Grid::build(GridMode::Radial, n, 1.0, 256, 1).expect("grid");
        let sphere = unit_sphere_area(n);
        let exact = fd::simpson(
            &|rho: f64| sphere * rho.sinh().powi(n as i32 - 1),
            0.0,
            1.0,
            4096,
        );
        let rel = (grid.cap_area() - exact).abs() / exact;
        out.push(AuditCheck::from("cap-quadrature", rel, 1e-4));
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_polynomials_exactly() {
        let v = fd::simpson(&|x| x * x * x, 0.0, 1.0, 16);
        assert!((v - 0.25).abs() < 1e-14);
        let w = fd::simpson(&|x| x.sin(), 0.0, std::f64::consts::PI, 256);
        assert!((w - 2.0).abs() < 1e-9);
    }

    #[test]
    fn fd_point_data_matches_analytic_derivatives() {
        let state = manufactured::Manufactured {
            c0: 1.5,
            a: 0.1,
            k1: 1.1,
            k2: 0.8,
            phase: 0.5,
        };
        let y = [0.4, -0.3];
        let exact = state.point_data(&y).unwrap();
        let approx = fd::point_data_from_scalar_field(&|z: &[f64]| state.eval(z), &y, 1e-4);
        assert!((exact.u - approx.u).abs() < 1e-14);
        for i in 0..2 {
            assert!((exact.du[i] - approx.du[i]).abs() < 1e-8);
        }
        for e in 0..4 {
            assert!(
                (exact.hess_u[e] - approx.hess_u[e]).abs() < 1e-6,
                "hess[{e}]: {} vs {}",
                exact.hess_u[e],
                approx.hess_u[e]
            );
        }
    }

    #[test]
    fn audit_suite_passes_in_dimension_two() {
        for check in run_all(2) {
            assert!(
                check.pass,
                "{}: worst {:.3e} exceeds tol {:.1e}",
                check.name, check.worst, check.tol
            );
        }
    }

    #[test]
    fn audit_suite_passes_in_dimension_three() {
        for check in run_all(3) {
            assert!(
                check.pass,
                "{}: worst {:.3e} exceeds tol {:.1e}",
                check.name, check.worst, check.tol
            );
        }
    }

    #[test]
    fn audit_suite_is_deterministic() {
        let a = run_all(2);
        let b = run_all(2);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.worst.to_bits(), y.worst.to_bits());
            assert_eq!(x.pass, y.pass);
        }
    }
}
