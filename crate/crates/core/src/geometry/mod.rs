//! Helicoidal group, projection and the quotient manifold `M`.
//!
//! The group is the one-parameter family `φ_t` rotating the `(x_i, x_j)` plane at
//! angular rate `λ` while translating along `x_k` at rate `a`. Every orbit meets the
//! slice `{x_k = 0}` exactly once, so `M` is identified with that slice and carries
//! the metric making the helicoidal projection a Riemannian submersion.
//!
//! Slice coordinates are the ambient coordinates with `x_k` removed, in ambient order.
//! The orbit tangent is fixed as `T = dφ_t/dt|_{t=0} = λ x_j e_i − λ x_i e_j + a e_k`.

pub mod distance;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use distance::{distance_field, DistanceField, DistanceGrid, DomainSpec, Obstacle, PlaneMetric};

/// A point or vector of the ambient space `R^{n+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientPoint(pub Vec<f64>);

pub type AmbientVector = AmbientPoint;

/// A point or vector of the quotient `M ≅ {x_k = 0} ≅ R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientPoint(pub Vec<f64>);

pub type QuotientVector = QuotientPoint;

impl AmbientPoint {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl QuotientPoint {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Parameters of the helicoidal group `G^{i,j,k}_{λ,a}` acting on `R^{n+1}`.
///
/// Axis indices are stored zero-based; [`GroupSpec::new`] takes them one-based.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub lambda: f64,
    pub a: f64,
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub n: usize,
}

impl GroupSpec {
    /// Builds a group from one-based axis indices `i, j, k ∈ 1..=n+1`.
    pub fn new(lambda: f64, a: f64, i: usize, j: usize, k: usize, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGroup(format!("quotient dimension n = {n} < 2")));
        }
        if !lambda.is_finite() || !a.is_finite() {
            return Err(Error::InvalidGroup("non-finite rate".into()));
        }
        if a == 0.0 {
            return Err(Error::InvalidGroup("pitch rate a must be nonzero".into()));
        }
        for (name, idx) in [("i", i), ("j", j), ("k", k)] {
            if idx == 0 || idx > n + 1 {
                return Err(Error::InvalidGroup(format!("axis {name} = {idx} outside 1..={}", n + 1)));
            }
        }
        if i == j || j == k || i == k {
            return Err(Error::InvalidGroup(format!("axes ({i}, {j}, {k}) not distinct")));
        }
        Ok(Self { lambda, a, i: i - 1, j: j - 1, k: k - 1, n })
    }

    /// Rotation in the `(x_1, x_2)` plane and translation along `x_{n+1}`.
    pub fn standard(lambda: f64, a: f64, n: usize) -> Result<Self> {
        Self::new(lambda, a, 1, 2, n + 1, n)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n + 1
    }

    /// Position of ambient axis `l` (zero-based, `l != k`) among the slice coordinates.
    pub fn slice_index(&self, l: usize) -> usize {
        debug_assert!(l != self.k);
        if l < self.k {
            l
        } else {
            l - 1
        }
    }

    fn check_ambient(&self, p: &AmbientPoint) {
        assert_eq!(p.0.len(), self.n + 1, "ambient point has wrong dimension");
    }

    fn check_quotient(&self, q: &QuotientPoint) {
        assert_eq!(q.0.len(), self.n, "quotient point has wrong dimension");
    }

    /// `φ_t(p)`.
    pub fn group_action(&self, p: &AmbientPoint, t: f64) -> AmbientPoint {
        self.check_ambient(p);
        let (s, c) = (self.lambda * t).sin_cos();
        let (xi, xj) = (p.0[self.i], p.0[self.j]);
        let mut out = p.0.clone();
        out[self.i] = xi * c + xj * s;
        out[self.j] = xj * c - xi * s;
        out[self.k] = p.0[self.k] + self.a * t;
        AmbientPoint(out)
    }

    /// The helicoidal projection `π(p)`: rotate back by `λ x_k / a` and drop `x_k`.
    pub fn projection(&self, p: &AmbientPoint) -> QuotientPoint {
        self.check_ambient(p);
        let (s, c) = (self.lambda * p.0[self.k] / self.a).sin_cos();
        let (xi, xj) = (p.0[self.i], p.0[self.j]);
        let mut rotated = p.0.clone();
        rotated[self.i] = xi * c - xj * s;
        rotated[self.j] = xj * c + xi * s;
        rotated.remove(self.k);
        QuotientPoint(rotated)
    }

    /// The slice point `{x_k = 0}` representing `q`.
    pub fn embed(&self, q: &QuotientPoint) -> AmbientPoint {
        self.check_quotient(q);
        let mut out = q.0.clone();
        out.insert(self.k, 0.0);
        AmbientPoint(out)
    }

    /// Distance of `(x_i, x_j)` from the rotation axis.
    pub fn sigma_ambient(&self, p: &AmbientPoint) -> f64 {
        p.0[self.i].hypot(p.0[self.j])
    }

    pub fn sigma(&self, q: &QuotientPoint) -> f64 {
        q.0[self.slice_index(self.i)].hypot(q.0[self.slice_index(self.j)])
    }

    /// `|T|² = λ²σ² + a²`.
    pub fn orbit_speed_sq(&self, sigma: f64) -> f64 {
        self.lambda * self.lambda * sigma * sigma + self.a * self.a
    }

    /// `A(p) = λ / sqrt(λ²σ² + a²)`.
    pub fn a_coefficient(&self, sigma: f64) -> f64 {
        self.lambda / self.orbit_speed_sq(sigma).sqrt()
    }

    /// Orbit curvature as a function of `σ`: `λ²σ / (λ²σ² + a²)`.
    pub fn orbit_curvature(&self, sigma: f64) -> f64 {
        self.lambda * self.lambda * sigma / self.orbit_speed_sq(sigma)
    }

    /// Angular warping factor of `M` in polar coordinates of the `(x_i, x_j)` plane:
    /// `|∂_θ|_G = |a| σ / sqrt(λ²σ² + a²)`.
    pub fn warp(&self, sigma: f64) -> f64 {
        self.a.abs() * sigma / self.orbit_speed_sq(sigma).sqrt()
    }

    /// Orbit tangent `T` at an arbitrary ambient point.
    pub fn orbit_tangent(&self, p: &AmbientPoint) -> AmbientVector {
        self.check_ambient(p);
        let mut t = vec![0.0; self.n + 1];
        t[self.i] = self.lambda * p.0[self.j];
        t[self.j] = -self.lambda * p.0[self.i];
        t[self.k] = self.a;
        AmbientPoint(t)
    }

    /// Mean curvature vector of the orbit through `p`, its magnitude and `A(p)`.
    pub fn orbit_mean_curvature(&self, p: &AmbientPoint) -> OrbitCurvature {
        self.check_ambient(p);
        let sigma = self.sigma_ambient(p);
        let a_coeff = self.a_coefficient(sigma);
        let a2 = a_coeff * a_coeff;
        let mut v = vec![0.0; self.n + 1];
        v[self.i] = -a2 * p.0[self.i];
        v[self.j] = -a2 * p.0[self.j];
        OrbitCurvature { vector: AmbientPoint(v), magnitude: self.orbit_curvature(sigma), a_coeff }
    }

    /// `sup H = |λ| / (2|a|)`, attained at `σ* = |a|/|λ|` when `λ ≠ 0`.
    pub fn sup_orbit_curvature(&self) -> (f64, Option<f64>) {
        if self.lambda == 0.0 {
            (0.0, None)
        } else {
            (self.lambda.abs() / (2.0 * self.a.abs()), Some(self.a.abs() / self.lambda.abs()))
        }
    }

    /// Slice components of `T` at the slice point over `q` (the `e_k` part `a` is implicit).
    fn slice_tangent(&self, q: &QuotientPoint) -> Vec<f64> {
        let mut t = vec![0.0; self.n];
        let (si, sj) = (self.slice_index(self.i), self.slice_index(self.j));
        t[si] = self.lambda * q.0[sj];
        t[sj] = -self.lambda * q.0[si];
        t
    }

    /// The quotient metric `g = I − T♭⊗T♭ / |T|²` restricted to the slice.
    pub fn quotient_metric(&self, q: &QuotientPoint) -> MetricSample {
        self.check_quotient(q);
        let t = self.slice_tangent(q);
        let speed_sq = dot(&t, &t) + self.a * self.a;
        let n = self.n;
        let tensor = DMatrix::from_fn(n, n, |r, c| {
            let delta = if r == c { 1.0 } else { 0.0 };
            delta - t[r] * t[c] / speed_sq
        });
        MetricSample {
            base: q.clone(),
            tensor,
            orbit_tangent: self.orbit_tangent(&self.embed(q)),
            orbit_speed_sq: speed_sq,
            slice_tangent: t,
            a_sq: self.a * self.a,
        }
    }

    /// Horizontal lift of `w ∈ T_q M` to the slice point over `q`.
    pub fn horizontal_lift(&self, q: &QuotientPoint, w: &QuotientVector) -> AmbientVector {
        self.check_quotient(q);
        assert_eq!(w.0.len(), self.n);
        let p = self.embed(q);
        let t = self.orbit_tangent(&p);
        let mut xi = self.embed(w).0;
        let coeff = dot(&xi, &t.0) / dot(&t.0, &t.0);
        for (x, tc) in xi.iter_mut().zip(&t.0) {
            *x -= coeff * tc;
        }
        AmbientPoint(xi)
    }

    /// Jacobian of the projection at `p`, an `n × (n+1)` matrix.
    pub fn projection_jacobian(&self, p: &AmbientPoint) -> DMatrix<f64> {
        self.check_ambient(p);
        let n = self.n;
        let theta = self.lambda * p.0[self.k] / self.a;
        let (s, c) = theta.sin_cos();
        let (xi, xj) = (p.0[self.i], p.0[self.j]);
        let alpha_hat = xi * c - xj * s;
        let beta_hat = xj * c + xi * s;
        let ratio = self.lambda / self.a;
        let mut jac = DMatrix::zeros(n, n + 1);
        for l in 0..=n {
            if l == self.k {
                continue;
            }
            let row = self.slice_index(l);
            if l == self.i {
                jac[(row, self.i)] = c;
                jac[(row, self.j)] = -s;
                jac[(row, self.k)] = -ratio * beta_hat;
            } else if l == self.j {
                jac[(row, self.i)] = s;
                jac[(row, self.j)] = c;
                jac[(row, self.k)] = ratio * alpha_hat;
            } else {
                jac[(row, l)] = 1.0;
            }
        }
        jac
    }

    /// Horizontal lift of `w ∈ T_{π(p)} M` at an arbitrary ambient point `p`:
    /// the minimal-norm preimage of `w` under `dπ_p`.
    pub fn horizontal_lift_at(&self, p: &AmbientPoint, w: &QuotientVector) -> AmbientVector {
        let jac = self.projection_jacobian(p);
        let gram = &jac * jac.transpose();
        let rhs = DVector::from_column_slice(&w.0);
        let y = gram
            .lu()
            .solve(&rhs)
            .expect("projection differential has full rank");
        AmbientPoint((jac.transpose() * y).as_slice().to_vec())
    }

    /// Drift field `J = dπ(H⃗)`, in slice coordinates.
    pub fn drift_field(&self, q: &QuotientPoint) -> QuotientVector {
        self.check_quotient(q);
        let a_coeff = self.a_coefficient(self.sigma(q));
        let a2 = a_coeff * a_coeff;
        let mut out = vec![0.0; self.n];
        let (si, sj) = (self.slice_index(self.i), self.slice_index(self.j));
        out[si] = -a2 * q.0[si];
        out[sj] = -a2 * q.0[sj];
        QuotientPoint(out)
    }

    /// Sectional curvature of `M` on the plane spanned by `g`-orthonormal `x, y` at `q`,
    /// from the O'Neill formula with central-difference Lie brackets of horizontal lifts.
    ///
    /// The fields are extended as constant coordinate fields on `M`.
    pub fn oneill_curvature_check(
        &self,
        q: &QuotientPoint,
        x: &QuotientVector,
        y: &QuotientVector,
    ) -> f64 {
        let p = self.embed(q);
        let h = 1e-4 * (1.0 + q.norm());
        let dim = self.n + 1;
        // directional derivative of the lifted field `field` along `dir`
        let deriv = |field: &QuotientVector, dir: &[f64]| -> Vec<f64> {
            let shifted = |sign: f64| {
                let pt = AmbientPoint(p.0.iter().zip(dir).map(|(a, d)| a + sign * h * d).collect());
                self.horizontal_lift_at(&pt, field).0
            };
            let (plus, minus) = (shifted(1.0), shifted(-1.0));
            (0..dim).map(|r| (plus[r] - minus[r]) / (2.0 * h)).collect()
        };
        let xl = self.horizontal_lift_at(&p, x);
        let yl = self.horizontal_lift_at(&p, y);
        let dy_x = deriv(y, &xl.0);
        let dx_y = deriv(x, &yl.0);
        let bracket: Vec<f64> = (0..dim).map(|r| dy_x[r] - dx_y[r]).collect();
        let t = self.orbit_tangent(&p);
        let vertical = dot(&bracket, &t.0);
        0.75 * vertical * vertical / dot(&t.0, &t.0)
    }
}

/// Mean curvature data of an orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitCurvature {
    pub vector: AmbientVector,
    pub magnitude: f64,
    /// `A(p) = λ / sqrt(λ²σ² + a²)`
    pub a_coeff: f64,
}

/// The quotient metric at a point, with its rank-one correction structure.
#[derive(Clone, Debug)]
pub struct MetricSample {
    pub base: QuotientPoint,
    pub tensor: DMatrix<f64>,
    pub orbit_tangent: AmbientVector,
    pub orbit_speed_sq: f64,
    slice_tangent: Vec<f64>,
    a_sq: f64,
}

impl MetricSample {
    pub fn inner(&self, u: &QuotientVector, v: &QuotientVector) -> f64 {
        dot(&u.0, &v.0) - dot(&u.0, &self.slice_tangent) * dot(&v.0, &self.slice_tangent) / self.orbit_speed_sq
    }

    pub fn norm_sq(&self, w: &QuotientVector) -> f64 {
        self.inner(w, w)
    }

    /// Inverse tensor, `I + t tᵀ / a²` by Sherman–Morrison.
    pub fn inverse(&self) -> DMatrix<f64> {
        let n = self.tensor.nrows();
        let t = &self.slice_tangent;
        DMatrix::from_fn(n, n, |r, c| {
            let delta = if r == c { 1.0 } else { 0.0 };
            delta + t[r] * t[c] / self.a_sq
        })
    }

    /// `|df|²_g` for a covector given by its slice-coordinate partials.
    pub fn covector_norm_sq(&self, df: &[f64]) -> f64 {
        dot(df, df) + dot(df, &self.slice_tangent).powi(2) / self.a_sq
    }

    /// The eigenvalue on the angular direction, `a² / (λ²σ² + a²)`.
    pub fn angular_eigenvalue(&self) -> f64 {
        self.a_sq / self.orbit_speed_sq
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn gs11() -> GroupSpec {
        GroupSpec::standard(1.0, 1.0, 2).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn rejects_degenerate_groups() {
        assert!(GroupSpec::new(1.0, 0.0, 1, 2, 3, 2).is_err());
        assert!(GroupSpec::new(1.0, 1.0, 1, 1, 3, 2).is_err());
        assert!(GroupSpec::new(1.0, 1.0, 1, 2, 4, 2).is_err());
        assert!(GroupSpec::new(1.0, 1.0, 1, 2, 3, 1).is_err());
        assert!(GroupSpec::new(0.0, 1.0, 1, 2, 3, 2).is_ok());
    }

    #[test]
    fn group_action_examples() {
        let g = gs11();
        let out = g.group_action(&AmbientPoint(vec![1.0, 0.0, 0.0]), FRAC_PI_2);
        assert!(close(&out.0, &[0.0, -1.0, FRAC_PI_2], 1e-15));
        let p = AmbientPoint(vec![0.3, -2.0, 1.5]);
        assert_eq!(g.group_action(&p, 0.0), p);
        let tr = GroupSpec::standard(0.0, 1.0, 2).unwrap();
        assert_eq!(tr.group_action(&AmbientPoint(vec![3.0, 4.0, 5.0]), 2.0).0, vec![3.0, 4.0, 7.0]);
    }

    #[test]
    fn group_action_composes() {
        let g = GroupSpec::new(0.7, -1.3, 3, 1, 2, 3).unwrap();
        let p = AmbientPoint(vec![0.4, -1.1, 2.2, 0.9]);
        let a = g.group_action(&g.group_action(&p, 0.8), -2.1);
        let b = g.group_action(&p, 0.8 - 2.1);
        assert!(close(&a.0, &b.0, 1e-13));
    }

    #[test]
    fn projection_examples() {
        let g = gs11();
        assert!(close(&g.projection(&AmbientPoint(vec![1.0, 0.0, 0.0])).0, &[1.0, 0.0], 1e-15));
        assert!(close(&g.projection(&AmbientPoint(vec![0.0, -1.0, FRAC_PI_2])).0, &[1.0, 0.0], 1e-15));
        let tr = GroupSpec::new(0.0, 2.0, 1, 3, 2, 3).unwrap();
        assert_eq!(tr.projection(&AmbientPoint(vec![1.0, 2.0, 3.0, 4.0])).0, vec![1.0, 3.0, 4.0]);
    }

    #[test]
    fn orbit_curvature_examples() {
        let g = gs11();
        let c = g.orbit_mean_curvature(&AmbientPoint(vec![1.0, 0.0, 0.0]));
        assert!((c.magnitude - 0.5).abs() < 1e-15);
        assert!(close(&c.vector.0, &[-0.5, 0.0, 0.0], 1e-15));
        let axis = g.orbit_mean_curvature(&AmbientPoint(vec![0.0, 0.0, 3.0]));
        assert_eq!(axis.magnitude, 0.0);
        assert!(axis.vector.0.iter().all(|x| *x == 0.0));
        let c2 = g.orbit_mean_curvature(&AmbientPoint(vec![0.0, 2.0, 0.0]));
        assert!((c2.magnitude - 0.4).abs() < 1e-15);
    }

    #[test]
    fn sup_curvature_examples() {
        assert_eq!(gs11().sup_orbit_curvature(), (0.5, Some(1.0)));
        assert_eq!(GroupSpec::standard(0.0, 1.0, 2).unwrap().sup_orbit_curvature(), (0.0, None));
        let (v, s) = GroupSpec::standard(2.0, 3.0, 2).unwrap().sup_orbit_curvature();
        assert!((v - 1.0 / 3.0).abs() < 1e-15 && (s.unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn metric_examples() {
        let g = gs11();
        let m = g.quotient_metric(&QuotientPoint(vec![1.0, 0.0]));
        assert!((m.norm_sq(&QuotientPoint(vec![0.0, 1.0])) - 0.5).abs() < 1e-15);
        assert!((m.norm_sq(&QuotientPoint(vec![1.0, 0.0])) - 1.0).abs() < 1e-15);
        for sigma in [0.5, 2.0, 10.0] {
            let m = g.quotient_metric(&QuotientPoint(vec![sigma, 0.0]));
            // |∂_θ|² with ∂_θ = σ e_2 at (σ, 0)
            let dtheta = QuotientPoint(vec![0.0, sigma]);
            let lift = g.horizontal_lift(&m.base, &dtheta);
            let expected = sigma * sigma / (sigma * sigma + 1.0);
            assert!((lift.norm().powi(2) - expected).abs() < 1e-13);
            assert!((m.norm_sq(&dtheta) - expected).abs() < 1e-13);
        }
        let flat = GroupSpec::standard(0.0, 1.0, 3).unwrap().quotient_metric(&QuotientPoint(vec![3.0, -1.0, 2.0]));
        assert_eq!(flat.tensor, DMatrix::identity(3, 3));
    }

    #[test]
    fn metric_inverse_is_inverse() {
        let g = GroupSpec::new(1.7, -0.6, 2, 4, 1, 3).unwrap();
        let m = g.quotient_metric(&QuotientPoint(vec![0.3, 1.2, -2.0]));
        let prod = &m.tensor * m.inverse();
        assert!((prod - DMatrix::identity(3, 3)).abs().max() < 1e-13);
    }

    #[test]
    fn lift_examples() {
        let g = gs11();
        let q = QuotientPoint(vec![1.0, 0.0]);
        let xi = g.horizontal_lift(&q, &QuotientPoint(vec![0.0, 1.0]));
        // T = (0, −1, 1) here, so the lift is e_2 + T/2.
        assert!(close(&xi.0, &[0.0, 0.5, 0.5], 1e-15));
        assert!((xi.norm() - 0.5f64.sqrt()).abs() < 1e-15);
        let radial = g.horizontal_lift(&q, &QuotientPoint(vec![2.0, 0.0]));
        assert_eq!(radial.0, vec![2.0, 0.0, 0.0]);
        let tr = GroupSpec::standard(0.0, 1.0, 2).unwrap();
        assert_eq!(tr.horizontal_lift(&q, &QuotientPoint(vec![0.3, 0.4])).0, vec![0.3, 0.4, 0.0]);
    }

    #[test]
    fn lift_at_slice_matches_closed_form() {
        let g = GroupSpec::new(0.9, 1.4, 1, 3, 2, 3).unwrap();
        let q = QuotientPoint(vec![0.7, -1.3, 0.2]);
        let w = QuotientPoint(vec![0.1, 0.5, -0.8]);
        let a = g.horizontal_lift(&q, &w);
        let b = g.horizontal_lift_at(&g.embed(&q), &w);
        assert!(close(&a.0, &b.0, 1e-13));
    }

    #[test]
    fn drift_examples() {
        let g = gs11();
        let j = g.drift_field(&QuotientPoint(vec![1.0, 0.0]));
        assert!(close(&j.0, &[-0.5, 0.0], 1e-15));
        let m = g.quotient_metric(&QuotientPoint(vec![1.0, 0.0]));
        assert!((m.norm_sq(&j).sqrt() - 0.5).abs() < 1e-15);
        assert!(g.drift_field(&QuotientPoint(vec![0.0, 0.0])).0.iter().all(|x| *x == 0.0));
        let tr = GroupSpec::standard(0.0, 1.0, 2).unwrap();
        assert!(tr.drift_field(&QuotientPoint(vec![2.0, 1.0])).0.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn curvature_vector_is_horizontal() {
        let g = GroupSpec::standard(1.3, 0.7, 3).unwrap();
        let p = AmbientPoint(vec![0.4, 1.9, -0.3, 2.5]);
        let h = g.orbit_mean_curvature(&p).vector;
        assert!(dot(&h.0, &g.orbit_tangent(&p).0).abs() < 1e-14);
    }

    #[test]
    fn oneill_vanishes_for_translations() {
        let g = GroupSpec::standard(0.0, 1.0, 2).unwrap();
        let k = g.oneill_curvature_check(&QuotientPoint(vec![1.0, 2.0]), &QuotientPoint(vec![1.0, 0.0]), &QuotientPoint(vec![0.0, 1.0]));
        assert!(k.abs() < 1e-12);
    }
}
