//! Structured curvilinear grids over truncated exterior domains.
//!
//! Logical coordinates `(s, θ)`, `s ∈ [0, 1]` from the inner boundary to the outer
//! circle. Physical points are `x = c0 + τ(s, θ) e(θ)` with
//! `τ = ρ + (R_out(θ) − ρ) m(s)`, where `R_out(θ)` is the distance from `c0` to the
//! outer circle `|x| = R` along `e(θ)`.

use crate::error::{Error, Result};
use crate::geometry::GroupSpec;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    /// Functions of `τ = |q|` on `R^n`.
    Radial,
    /// Functions of `(σ, ζ)`, `σ = |(x_i, x_j)|`, `ζ` the norm of the remaining slice
    /// coordinates; quarter annulus in the `(σ, ζ)` plane.
    Axisym,
    /// Functions on the two-dimensional quotient (`n = 2`) in Cartesian slice coordinates.
    Polar2d,
}

impl std::str::FromStr for Reduction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radial" => Ok(Self::Radial),
            "axisym" => Ok(Self::Axisym),
            "polar2d" => Ok(Self::Polar2d),
            other => Err(Error::Parse(format!("unknown reduction '{other}'"))),
        }
    }
}

impl std::fmt::Display for Reduction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Radial => "radial",
            Self::Axisym => "axisym",
            Self::Polar2d => "polar2d",
        })
    }
}

/// Node distribution `m(s)` along the `s` lines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Uniform,
    /// `m(s) = s²`; resolves square-root boundary layers such as the catenoid neck.
    Quadratic,
    /// `m(s) = (e^{κs} − 1)/(e^κ − 1)`.
    Geometric(f64),
}

impl Spacing {
    pub fn map(&self, s: f64) -> f64 {
        match *self {
            Self::Uniform => s,
            Self::Quadratic => s * s,
            Self::Geometric(k) => (k * s).exp_m1() / k.exp_m1(),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match *self {
            Self::Uniform => 1.0,
            Self::Quadratic => 2.0 * s,
            Self::Geometric(k) => k * (k * s).exp() / k.exp_m1(),
        }
    }

    pub fn inverse(&self, m: f64) -> f64 {
        match *self {
            Self::Uniform => m,
            Self::Quadratic => m.max(0.0).sqrt(),
            Self::Geometric(k) => (m * k.exp_m1()).ln_1p() / k,
        }
    }

    /// Geometric spacing whose first cell is `first / total` of the annulus width.
    pub fn geometric_with_first_cell(fraction: f64, cells: usize) -> Self {
        // solve (e^{κ/N} − 1)/(e^κ − 1) = fraction for κ by bisection
        let uniform = 1.0 / cells as f64;
        if fraction >= uniform {
            return Self::Uniform;
        }
        let ratio = |k: f64| (k / cells as f64).exp_m1() / k.exp_m1();
        let (mut lo, mut hi) = (1e-9, 1.0);
        while ratio(hi) > fraction {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ratio(mid) > fraction {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self::Geometric(0.5 * (lo + hi))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub reduction: Reduction,
    pub group: GroupSpec,
    /// Obstacle centre in the plane of the reduction (origin unless `Polar2d`).
    pub center: [f64; 2],
    /// Obstacle radius `ρ`.
    pub rho: f64,
    /// Outer radius `R` about the origin.
    pub outer: f64,
    /// Node counts along `s` and `θ`; `θ` count is 1 for `Radial`.
    pub nodes: (usize, usize),
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn radial(group: GroupSpec, rho: f64, outer: f64, nodes: usize, spacing: Spacing) -> Self {
        Self { reduction: Reduction::Radial, group, center: [0.0; 2], rho, outer, nodes: (nodes, 1), spacing }
    }

    pub fn axisym(group: GroupSpec, rho: f64, outer: f64, nodes: (usize, usize), spacing: Spacing) -> Self {
        Self { reduction: Reduction::Axisym, group, center: [0.0; 2], rho, outer, nodes, spacing }
    }

    pub fn polar2d(
        group: GroupSpec,
        center: [f64; 2],
        rho: f64,
        outer: f64,
        nodes: (usize, usize),
        spacing: Spacing,
    ) -> Self {
        Self { reduction: Reduction::Polar2d, group, center, rho, outer, nodes, spacing }
    }

    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.clone())
    }
}

/// Second-order geometric data at a logical point.
#[derive(Clone, Copy, Debug)]
pub struct LogicalGeometry {
    /// Physical point (`(σ, ζ)`, Cartesian slice point, or `(τ, 0)`).
    pub x: [f64; 2],
    /// Inverse logical metric `[G^{ss}, G^{sθ}, G^{θθ}]`.
    pub inv_metric: [f64; 3],
    /// Logical volume density `ω_L`.
    pub omega: f64,
    /// Drift field in logical components (`J⁻¹` applied to the physical drift).
    pub drift: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct Grid {
    pub spec: GridSpec,
    pub ns: usize,
    pub nt: usize,
    pub ds: f64,
    pub dtheta: f64,
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        let (ns, nt) = spec.nodes;
        if ns < 3 {
            return Err(Error::InvalidArgument(format!("need at least 3 nodes along s, got {ns}")));
        }
        if !(spec.rho > 0.0) {
            return Err(Error::InvalidArgument(format!("obstacle radius {} must be positive", spec.rho)));
        }
        let reach = (spec.center[0].powi(2) + spec.center[1].powi(2)).sqrt() + spec.rho;
        if !(spec.outer > reach) {
            return Err(Error::InvalidArgument(format!(
                "outer radius {} must exceed the obstacle reach {reach}",
                spec.outer
            )));
        }
        let n = spec.group.n;
        let dtheta = match spec.reduction {
            Reduction::Radial => {
                if nt != 1 {
                    return Err(Error::InvalidArgument("radial grids have a single θ node".into()));
                }
                1.0
            }
            Reduction::Axisym => {
                if n < 3 {
                    return Err(Error::InvalidArgument("axisym reduction needs n ≥ 3".into()));
                }
                if spec.center != [0.0; 2] {
                    return Err(Error::InvalidArgument("axisym obstacles are centred at the origin".into()));
                }
                if nt < 3 {
                    return Err(Error::InvalidArgument("need at least 3 θ nodes".into()));
                }
                FRAC_PI_2 / (nt - 1) as f64
            }
            Reduction::Polar2d => {
                if n != 2 {
                    return Err(Error::InvalidArgument("polar2d reduction needs n = 2".into()));
                }
                if nt < 4 {
                    return Err(Error::InvalidArgument("need at least 4 θ nodes".into()));
                }
                2.0 * PI / nt as f64
            }
        };
        if spec.reduction == Reduction::Radial && spec.center != [0.0; 2] {
            return Err(Error::InvalidArgument("radial obstacles are centred at the origin".into()));
        }
        Ok(Self { ns, nt, ds: 1.0 / (ns - 1) as f64, dtheta, spec })
    }

    pub fn len(&self) -> usize {
        self.ns * self.nt
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, k: usize) -> usize {
        k * self.ns + i
    }

    pub fn s_at(&self, i: usize) -> f64 {
        i as f64 * self.ds
    }

    pub fn theta_at(&self, k: usize) -> f64 {
        k as f64 * self.dtheta
    }

    pub fn periodic(&self) -> bool {
        self.spec.reduction == Reduction::Polar2d
    }

    /// `(R_out(θ), dR_out/dθ)`.
    fn outer_reach(&self, theta: f64) -> (f64, f64) {
        let c = self.spec.center;
        let (e, ep) = ([theta.cos(), theta.sin()], [-theta.sin(), theta.cos()]);
        let b = c[0] * e[0] + c[1] * e[1];
        let bp = c[0] * ep[0] + c[1] * ep[1];
        let disc = (b * b - (c[0] * c[0] + c[1] * c[1]) + self.spec.outer.powi(2)).sqrt();
        (-b + disc, -bp + b * bp / disc)
    }

    /// `(τ, ∂τ/∂s, ∂τ/∂θ)`.
    fn tau(&self, s: f64, theta: f64) -> (f64, f64, f64) {
        let rho = self.spec.rho;
        let m = self.spec.spacing;
        if self.spec.reduction == Reduction::Polar2d {
            let (reach, reach_p) = self.outer_reach(theta);
            (rho + (reach - rho) * m.map(s), (reach - rho) * m.derivative(s), reach_p * m.map(s))
        } else {
            let width = self.spec.outer - rho;
            (rho + width * m.map(s), width * m.derivative(s), 0.0)
        }
    }

    /// Physical point of the logical coordinates.
    pub fn point(&self, s: f64, theta: f64) -> [f64; 2] {
        let (tau, _, _) = self.tau(s, theta);
        match self.spec.reduction {
            Reduction::Radial => [tau, 0.0],
            _ => {
                let c = self.spec.center;
                [c[0] + tau * theta.cos(), c[1] + tau * theta.sin()]
            }
        }
    }

    pub fn node_point(&self, i: usize, k: usize) -> [f64; 2] {
        self.point(self.s_at(i), self.theta_at(k))
    }

    /// Radius `|q|` of the physical node (distance to the origin of the slice).
    pub fn node_radius(&self, i: usize, k: usize) -> f64 {
        let x = self.node_point(i, k);
        match self.spec.reduction {
            Reduction::Radial => x[0],
            _ => x[0].hypot(x[1]),
        }
    }

    /// Logical coordinates of a physical point, or `None` outside the grid.
    pub fn logical_of(&self, x: [f64; 2]) -> Option<(f64, f64)> {
        let rho = self.spec.rho;
        let (tau, theta) = match self.spec.reduction {
            Reduction::Radial => (x[0].hypot(x[1]), 0.0),
            Reduction::Axisym => {
                let (sigma, zeta) = (x[0].abs(), x[1].abs());
                (sigma.hypot(zeta), zeta.atan2(sigma))
            }
            Reduction::Polar2d => {
                let c = self.spec.center;
                let (dx, dy) = (x[0] - c[0], x[1] - c[1]);
                (dx.hypot(dy), dy.atan2(dx).rem_euclid(2.0 * PI))
            }
        };
        let reach = match self.spec.reduction {
            Reduction::Polar2d => self.outer_reach(theta).0,
            _ => self.spec.outer - rho,
        } - if self.spec.reduction == Reduction::Polar2d { rho } else { 0.0 };
        let m = (tau - rho) / reach;
        let tol = 1e-12;
        if !(-tol..=1.0 + tol).contains(&m) {
            return None;
        }
        Some((self.spec.spacing.inverse(m.clamp(0.0, 1.0)), theta))
    }

    pub fn geometry(&self, s: f64, theta: f64) -> LogicalGeometry {
        let gs = &self.spec.group;
        let n = gs.n;
        let (tau, tau_s, tau_t) = self.tau(s, theta);
        match self.spec.reduction {
            Reduction::Radial => LogicalGeometry {
                x: [tau, 0.0],
                inv_metric: [1.0 / (tau_s * tau_s), 0.0, 0.0],
                omega: tau.powi(n as i32 - 1) * tau_s,
                drift: [0.0, 0.0],
            },
            Reduction::Axisym => {
                // (σ, ζ) = τ (cos θ, sin θ); physical metric is the identity
                let (sigma, zeta) = (tau * theta.cos(), tau * theta.sin());
                let density = gs.warp(sigma) * zeta.powi(n as i32 - 3);
                let jac = tau_s * tau;
                let inv = [1.0 / (tau_s * tau_s), 0.0, 1.0 / (tau * tau)];
                // physical drift (−A²σ, 0) in the (e_τ, e_θ/τ) frame
                let drift_phys = [-gs.a_coefficient(sigma).powi(2) * sigma, 0.0];
                let (c, sn) = (theta.cos(), theta.sin());
                let radial = drift_phys[0] * c + drift_phys[1] * sn;
                let angular = -drift_phys[0] * sn + drift_phys[1] * c;
                LogicalGeometry {
                    x: [sigma, zeta],
                    inv_metric: inv,
                    omega: density * jac,
                    drift: [radial / tau_s, angular / tau],
                }
            }
            Reduction::Polar2d => {
                let c0 = self.spec.center;
                let (e, ep) = ([theta.cos(), theta.sin()], [-theta.sin(), theta.cos()]);
                let x = [c0[0] + tau * e[0], c0[1] + tau * e[1]];
                // Jacobian columns ∂x/∂s, ∂x/∂θ
                let js = [tau_s * e[0], tau_s * e[1]];
                let jt = [tau_t * e[0] + tau * ep[0], tau_t * e[1] + tau * ep[1]];
                let det = js[0] * jt[1] - js[1] * jt[0];
                // J⁻¹ rows
                let inv_j = [[jt[1] / det, -jt[0] / det], [-js[1] / det, js[0] / det]];
                let ginv = plane_inverse_metric(gs, x);
                let mut inv = [0.0; 3];
                let contract = |r1: [f64; 2], r2: [f64; 2]| {
                    r1[0] * (ginv[0] * r2[0] + ginv[1] * r2[1]) + r1[1] * (ginv[1] * r2[0] + ginv[2] * r2[1])
                };
                inv[0] = contract(inv_j[0], inv_j[0]);
                inv[1] = contract(inv_j[0], inv_j[1]);
                inv[2] = contract(inv_j[1], inv_j[1]);
                let sigma = x[0].hypot(x[1]);
                let a = gs.a.abs();
                let density = a / (gs.lambda * gs.lambda * sigma * sigma + a * a).sqrt();
                let a2 = gs.a_coefficient(sigma).powi(2);
                let drift_phys = [-a2 * x[0], -a2 * x[1]];
                LogicalGeometry {
                    x,
                    inv_metric: inv,
                    omega: density * det.abs(),
                    drift: [
                        inv_j[0][0] * drift_phys[0] + inv_j[0][1] * drift_phys[1],
                        inv_j[1][0] * drift_phys[0] + inv_j[1][1] * drift_phys[1],
                    ],
                }
            }
        }
    }

    pub fn node_geometry(&self, i: usize, k: usize) -> LogicalGeometry {
        self.geometry(self.s_at(i), self.theta_at(k))
    }

    /// `θ`-extent of the control volume of column `k`, as `(lo, hi)` offsets.
    pub(crate) fn theta_cell(&self, k: usize) -> (f64, f64) {
        let h = 0.5 * self.dtheta;
        match self.spec.reduction {
            Reduction::Radial => (-0.5, 0.5),
            Reduction::Polar2d => (-h, h),
            Reduction::Axisym => {
                if k == 0 {
                    (0.0, h)
                } else if k + 1 == self.nt {
                    (-h, 0.0)
                } else {
                    (-h, h)
                }
            }
        }
    }
}

/// Inverse quotient metric `g⁻¹ = I + t tᵀ/a²` on the plane (`n = 2`), where
/// `t = λ(x_2, −x_1)` is the slice part of the orbit tangent.
pub fn plane_inverse_metric(gs: &GroupSpec, x: [f64; 2]) -> [f64; 3] {
    let t = plane_tangent(gs, x);
    let a2 = gs.a * gs.a;
    [1.0 + t[0] * t[0] / a2, t[0] * t[1] / a2, 1.0 + t[1] * t[1] / a2]
}

/// `g = I − t tᵀ/(|t|² + a²)` on the plane.
pub fn plane_metric(gs: &GroupSpec, x: [f64; 2]) -> [f64; 3] {
    let t = plane_tangent(gs, x);
    let d = t[0] * t[0] + t[1] * t[1] + gs.a * gs.a;
    [1.0 - t[0] * t[0] / d, -t[0] * t[1] / d, 1.0 - t[1] * t[1] / d]
}

fn plane_tangent(gs: &GroupSpec, x: [f64; 2]) -> [f64; 2] {
    // slice coordinates (x_i, x_j) with i < j, or swapped when i > j
    let (xi, xj) = if gs.i < gs.j { (x[0], x[1]) } else { (x[1], x[0]) };
    let (ti, tj) = (gs.lambda * xj, -gs.lambda * xi);
    if gs.i < gs.j {
        [ti, tj]
    } else {
        [tj, ti]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gs2() -> GroupSpec {
        GroupSpec::standard(1.0, 1.0, 2).unwrap()
    }

    #[test]
    fn plane_metric_matches_quotient_metric() {
        use crate::geometry::QuotientPoint;
        let gs = gs2();
        for x in [[1.0, 0.0], [0.3, -2.0], [-1.5, 0.7]] {
            let sample = gs.quotient_metric(&QuotientPoint(x.to_vec()));
            let g = plane_metric(&gs, x);
            assert!((sample.tensor[(0, 0)] - g[0]).abs() < 1e-14);
            assert!((sample.tensor[(0, 1)] - g[1]).abs() < 1e-14);
            assert!((sample.tensor[(1, 1)] - g[2]).abs() < 1e-14);
            let gi = plane_inverse_metric(&gs, x);
            let prod = [g[0] * gi[0] + g[1] * gi[1], g[0] * gi[1] + g[1] * gi[2], g[1] * gi[1] + g[2] * gi[2]];
            assert!((prod[0] - 1.0).abs() < 1e-13 && prod[1].abs() < 1e-13 && (prod[2] - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn offset_grid_reaches_outer_circle() {
        let spec = GridSpec::polar2d(gs2(), [0.0, 5.0], 1.0, 12.0, (9, 16), Spacing::Uniform);
        let grid = spec.build().unwrap();
        for k in 0..grid.nt {
            let p = grid.node_point(grid.ns - 1, k);
            assert!((p[0].hypot(p[1]) - 12.0).abs() < 1e-12);
            let q = grid.node_point(0, k);
            assert!((q[0].hypot(q[1] - 5.0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn logical_metric_matches_finite_differences() {
        let spec = GridSpec::polar2d(gs2(), [0.0, 5.0], 1.0, 12.0, (9, 16), Spacing::Quadratic);
        let grid = spec.build().unwrap();
        let (s, t) = (0.4, 1.1);
        let h = 1e-6;
        let js = {
            let (a, b) = (grid.point(s + h, t), grid.point(s - h, t));
            [(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h)]
        };
        let jt = {
            let (a, b) = (grid.point(s, t + h), grid.point(s, t - h));
            [(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h)]
        };
        let geo = grid.geometry(s, t);
        let g = plane_metric(&gs2(), geo.x);
        let gss = js[0] * (g[0] * js[0] + g[1] * js[1]) + js[1] * (g[1] * js[0] + g[2] * js[1]);
        let gst = js[0] * (g[0] * jt[0] + g[1] * jt[1]) + js[1] * (g[1] * jt[0] + g[2] * jt[1]);
        let gtt = jt[0] * (g[0] * jt[0] + g[1] * jt[1]) + jt[1] * (g[1] * jt[0] + g[2] * jt[1]);
        let inv = geo.inv_metric;
        assert!((gss * inv[0] + gst * inv[1] - 1.0).abs() < 1e-7);
        assert!((gss * inv[1] + gst * inv[2]).abs() < 1e-7);
        assert!((gst * inv[1] + gtt * inv[2] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn geometric_spacing_first_cell() {
        let sp = Spacing::geometric_with_first_cell(1e-3, 100);
        let first = sp.map(0.01);
        assert!((first - 1e-3).abs() < 1e-9);
    }
}
