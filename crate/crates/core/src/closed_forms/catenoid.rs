//! The half-catenoid `v_ρ(τ) = ρ ∫_1^{τ/ρ} dt / sqrt(t^{2(n−1)} − 1)` and its height at
//! infinity.
//!
//! Both endpoint singularities of the integrand are removed analytically: `t = 1 + u²`
//! near `t = 1`, and `t = 1/u` on the tail.

use super::quadrature;
use super::Slope;
use crate::error::{Error, Result};

/// Split point of the singular integral, `t ∈ [1, 1 + ε] ∪ [1 + ε, ∞)`.
const SPLIT_EPS: f64 = 0.5;
const QUAD_TOL: f64 = 1e-13;

/// `2u / sqrt((1 + u²)^{2m} − 1)`, the integrand after `t = 1 + u²`.
fn near_integrand(u: f64, m: f64) -> f64 {
    if u == 0.0 {
        return 2.0 / (2.0 * m).sqrt();
    }
    let denom = (2.0 * m * (u * u).ln_1p()).exp_m1();
    2.0 * u / denom.sqrt()
}

/// `u^{m−2} / sqrt(1 − u^{2m})`, the integrand after `t = 1/u`.
fn tail_integrand(u: f64, m: f64) -> f64 {
    if u == 0.0 {
        return if m == 2.0 { 1.0 } else { 0.0 };
    }
    let one_minus = -(2.0 * m * u.ln()).exp_m1();
    u.powf(m - 2.0) / one_minus.sqrt()
}

fn check_dimension(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("dimension n = {n} < 2")));
    }
    Ok((n - 1) as f64)
}

/// `h(n, ρ) = ρ ∫_1^∞ dt / sqrt(t^{2(n−1)} − 1)`, finite for `n ≥ 3`.
pub fn catenoid_height(n: usize, rho: f64) -> Result<f64> {
    let m = check_dimension(n)?;
    if n == 2 {
        return Err(Error::InvalidArgument("the n = 2 catenoid is unbounded".into()));
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument(format!("neck radius {rho} must be positive")));
    }
    let near = quadrature::integrate(|u| near_integrand(u, m), 0.0, SPLIT_EPS.sqrt(), QUAD_TOL)?;
    let tail = quadrature::integrate(|u| tail_integrand(u, m), 0.0, 1.0 / (1.0 + SPLIT_EPS), QUAD_TOL)?;
    Ok(rho * (near.value + tail.value))
}

/// Independent route to `h(n, ρ)`: `t^{n−1} = cosh y` turns the integral into
/// `(1/m) ∫_0^∞ cosh(y)^{1/m − 1} dy`, integrated by tanh–sinh on `[0, Y]` plus the
/// leading-order exponential tail.
pub fn catenoid_height_cross_check(n: usize, rho: f64) -> Result<f64> {
    let m = check_dimension(n)?;
    if n == 2 {
        return Err(Error::InvalidArgument("the n = 2 catenoid is unbounded".into()));
    }
    let decay = (m - 1.0) / m;
    // cosh^{-decay} = (e^y/2)^{-decay} (1 + e^{-2y})^{-decay}; beyond Y the correction is < 1e-30
    let y_max = 36.0_f64.max(40.0 / decay);
    let out = ::quadrature::double_exponential::integrate(|y| y.cosh().powf(-decay), 0.0, y_max, 1e-14);
    let tail = 2f64.powf(decay) * (-decay * y_max).exp() / decay;
    Ok(rho * (out.integral + tail) / m)
}

/// A half-catenoid of neck radius `rho` centred at `center`.
#[derive(Clone, Debug, PartialEq)]
pub struct CatenoidProfile {
    pub n: usize,
    pub rho: f64,
    pub center: Vec<f64>,
}

/// Value and gradient magnitude of a radial profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialValue {
    pub value: f64,
    pub slope: Slope,
}

impl CatenoidProfile {
    pub fn new(n: usize, rho: f64) -> Result<Self> {
        check_dimension(n)?;
        if !(rho > 0.0) {
            return Err(Error::InvalidArgument(format!("neck radius {rho} must be positive")));
        }
        Ok(Self { n, rho, center: vec![0.0; n] })
    }

    pub fn with_center(mut self, center: Vec<f64>) -> Self {
        assert_eq!(center.len(), self.n);
        self.center = center;
        self
    }

    fn exponent(&self) -> f64 {
        (self.n - 1) as f64
    }

    /// `v_ρ(τ)` and `|∇v_ρ| = 1 / sqrt((τ/ρ)^{2(n−1)} − 1)`.
    pub fn eval(&self, tau: f64) -> Result<RadialValue> {
        // absorb round-off from mapped grid coordinates
        let tau = if tau < self.rho && tau >= self.rho * (1.0 - 1e-12) { self.rho } else { tau };
        if !(tau >= self.rho) {
            return Err(Error::InvalidArgument(format!("τ = {tau} lies inside the neck radius {}", self.rho)));
        }
        let m = self.exponent();
        let ratio = tau / self.rho;
        let upper = (ratio - 1.0).sqrt();
        let value = if upper == 0.0 {
            0.0
        } else {
            self.rho * quadrature::integrate(|u| near_integrand(u, m), 0.0, upper, QUAD_TOL * upper.max(1.0))?.value
        };
        let gap = (2.0 * m * ratio.ln()).exp_m1();
        Ok(RadialValue { value, slope: Slope::from_value(1.0 / gap.sqrt()) })
    }

    pub fn value(&self, tau: f64) -> Result<f64> {
        Ok(self.eval(tau)?.value)
    }

    pub fn value_at(&self, q: &[f64]) -> Result<f64> {
        self.value(self.radius_of(q))
    }

    pub fn radius_of(&self, q: &[f64]) -> f64 {
        q.iter().zip(&self.center).map(|(x, c)| (x - c) * (x - c)).sum::<f64>().sqrt()
    }

    /// `h(n, ρ)`; only finite for `n ≥ 3`.
    pub fn height_at_infinity(&self) -> Result<f64> {
        catenoid_height(self.n, self.rho)
    }
}

/// The radial family `w(τ) = v_c(τ) − v_c(ρ)` vanishing on the sphere of radius `ρ`,
/// parameterised by its neck radius `c ∈ (0, ρ]`. `c = ρ` is the half-catenoid itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftedCatenoid {
    pub n: usize,
    pub rho: f64,
    pub neck: f64,
}

impl ShiftedCatenoid {
    pub fn new(n: usize, rho: f64, neck: f64) -> Result<Self> {
        check_dimension(n)?;
        if !(neck > 0.0 && neck <= rho) {
            return Err(Error::InvalidArgument(format!("neck {neck} must lie in (0, {rho}]")));
        }
        Ok(Self { n, rho, neck })
    }

    /// Neck radius whose member has boundary slope `s` at `τ = ρ`:
    /// `c^{n−1} = ρ^{n−1} s / sqrt(1 + s²)`.
    pub fn from_boundary_slope(n: usize, rho: f64, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::InvalidArgument(format!("boundary slope {s} must be positive")));
        }
        let m = (n - 1) as f64;
        let neck = rho * (s / (1.0 + s * s).sqrt()).powf(1.0 / m);
        Self::new(n, rho, neck)
    }

    fn profile(&self) -> CatenoidProfile {
        CatenoidProfile { n: self.n, rho: self.neck, center: vec![0.0; self.n] }
    }

    pub fn value(&self, tau: f64) -> Result<f64> {
        let p = self.profile();
        Ok(p.value(tau)? - p.value(self.rho)?)
    }

    pub fn slope(&self, tau: f64) -> Result<Slope> {
        Ok(self.profile().eval(tau)?.slope)
    }

    /// Limit at infinity, `c · h(n, 1) − v_c(ρ)`, for `n ≥ 3`.
    pub fn height_at_infinity(&self) -> Result<f64> {
        let p = self.profile();
        Ok(p.height_at_infinity()? - p.value(self.rho)?)
    }

    /// The conserved flux `τ^{n−1} v'/sqrt(1 + v'²) = c^{n−1}`.
    pub fn flux(&self) -> f64 {
        self.neck.powi(self.n as i32 - 1)
    }
}
