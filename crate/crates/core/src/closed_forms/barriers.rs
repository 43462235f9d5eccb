//! Barrier constants and the radial barriers built from them.

use super::catenoid::{catenoid_height, CatenoidProfile};
use super::Slope;
use crate::error::{Error, Result};

/// `C(r, n, λ, a) = (2|a|(n−1) + |λ| r) / (2|a| r)`.
pub fn barrier_constant_c(r: f64, n: usize, lambda: f64, a: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("interior sphere radius {r} must be positive")));
    }
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidGroup("pitch rate a must be finite and nonzero".into()));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("dimension n = {n} < 2")));
    }
    let (a, l) = (a.abs(), lambda.abs());
    Ok((2.0 * a * (n - 1) as f64 + l * r) / (2.0 * a * r))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarsigmaSolution {
    pub varsigma: f64,
    /// `|cosh(ς/sqrt(ς² − C²)) − ς/C|`.
    pub residual: f64,
    /// Sign changes of the stationarity condition seen on the scan; 1 means the root is
    /// the unique interior maximiser of `f(μ) = μ⁻¹ arccosh(μ/C)` on the scanned range.
    pub sign_changes: usize,
}

/// Stationarity of `f(μ) = μ⁻¹ arccosh(μ/C)`, i.e. `arccosh(μ/C) − μ/sqrt(μ² − C²)`.
fn stationarity(mu: f64, c: f64) -> f64 {
    (mu / c).acosh() - mu / (mu * mu - c * c).sqrt()
}

fn stationarity_derivative(mu: f64, c: f64) -> f64 {
    let gap = mu * mu - c * c;
    1.0 / gap.sqrt() + c * c / gap.powf(1.5)
}

/// Root `ς > C` of `cosh(μ/sqrt(μ² − C²)) = μ/C`.
pub fn solve_varsigma(c: f64) -> Result<VarsigmaSolution> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("C = {c} must be positive and finite")));
    }
    let f = |mu: f64| (mu / c).acosh() / mu;

    // geometric scan in units of C
    const SCAN: usize = 400;
    let (lo_ratio, hi_ratio) = (1.0 + 1e-6, 1e4_f64);
    let step = (hi_ratio / lo_ratio).ln() / SCAN as f64;
    let grid: Vec<f64> = (0..=SCAN).map(|k| c * lo_ratio * (step * k as f64).exp()).collect();
    let values: Vec<f64> = grid.iter().map(|&m| f(m)).collect();
    let best = (1..SCAN)
        .max_by(|&x, &y| values[x].total_cmp(&values[y]))
        .expect("scan is nonempty");
    if values[best] <= values[best - 1] || values[best] <= values[best + 1] {
        return Err(Error::RootNotFound {
            lo: grid[0],
            hi: grid[SCAN],
            reason: "scan maximum of f is not interior".into(),
        });
    }
    let sign_changes = grid
        .windows(2)
        .filter(|w| stationarity(w[0], c).signum() != stationarity(w[1], c).signum())
        .count();

    // golden section on the bracketing cell pair
    let (mut lo, mut hi) = (grid[best - 1], grid[best + 1]);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    let (bracket_lo, bracket_hi) = (grid[best - 1], grid[best + 1]);
    let mut mu = 0.5 * (lo + hi);
    for _ in 0..50 {
        let step = stationarity(mu, c) / stationarity_derivative(mu, c);
        let next = (mu - step).clamp(bracket_lo, bracket_hi);
        let done = (next - mu).abs() <= 4.0 * f64::EPSILON * mu;
        mu = next;
        if done {
            break;
        }
    }
    let residual = ((mu / (mu * mu - c * c).sqrt()).cosh() - mu / c).abs();
    if !(residual <= 1e-10 * (mu / c).max(1.0)) {
        return Err(Error::RootNotFound {
            lo: bracket_lo,
            hi: bracket_hi,
            reason: format!("residual {residual:e} after polishing"),
        });
    }
    Ok(VarsigmaSolution { varsigma: mu, residual, sign_changes })
}

/// Height cap `L(r, n, λ, a)`: `1/sqrt(ς² − C²)` for `λ ≠ 0` and `h(n, r)` for `λ = 0`.
pub fn height_cap_l(r: f64, n: usize, lambda: f64, a: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("height cap requires n ≥ 3, got {n}")));
    }
    let c = barrier_constant_c(r, n, lambda, a)?;
    if lambda == 0.0 {
        return catenoid_height(n, r);
    }
    let s = solve_varsigma(c)?.varsigma;
    Ok(1.0 / (s * s - c * c).sqrt())
}

/// The collar barrier `ψ(t) = b⁻¹ arccosh(1 + bt)` on `[0, t0]`, continued by the
/// constant `ψ(t0)` beyond, together with its constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierSpec {
    pub c: f64,
    pub b: f64,
    pub t0: f64,
    pub varsigma: f64,
    /// The height cap `L` for these parameters.
    pub l: f64,
    pub r: f64,
    pub n: usize,
}

/// Value and slope of the collar barrier at distance `d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollarValue {
    pub value: f64,
    pub slope: Slope,
}

impl BarrierSpec {
    /// Builds the barrier for interior sphere radius `r`; `b` defaults to `ς`.
    pub fn new(r: f64, n: usize, lambda: f64, a: f64, b: Option<f64>) -> Result<Self> {
        let c = barrier_constant_c(r, n, lambda, a)?;
        let varsigma = solve_varsigma(c)?.varsigma;
        let b = b.unwrap_or(varsigma);
        if !(b > c) {
            return Err(Error::InvalidArgument(format!("b = {b} must exceed C = {c}")));
        }
        let l = if n >= 3 {
            height_cap_l(r, n, lambda, a)?
        } else {
            1.0 / (varsigma * varsigma - c * c).sqrt()
        };
        Ok(Self { c, b, t0: (b - c) / (b * c), varsigma, l, r, n })
    }

    pub fn psi(&self, t: f64) -> f64 {
        (self.b * t).ln_1p_acosh() / self.b
    }

    pub fn psi_prime(&self, t: f64) -> Slope {
        let u = self.b * t;
        // (1 + u)² − 1 = u (2 + u)
        Slope::from_value(1.0 / (u * (2.0 + u)).sqrt())
    }

    pub fn psi_second(&self, t: f64) -> f64 {
        let u = self.b * t;
        -self.b * (1.0 + u) / (u * (2.0 + u)).powf(1.5)
    }

    /// `ψ(t0) = b⁻¹ arccosh(b/C)`; equals `L` when `b = ς` and `λ ≠ 0`.
    pub fn collar_height(&self) -> f64 {
        self.psi(self.t0)
    }

    /// `W(d)`: `ψ(d)` on the collar, `ψ(t0)` beyond.
    pub fn collar_barrier(&self, d: f64) -> Result<CollarValue> {
        if !(d >= 0.0) {
            return Err(Error::InvalidArgument(format!("distance {d} must be non-negative")));
        }
        Ok(if d < self.t0 {
            CollarValue { value: self.psi(d), slope: self.psi_prime(d) }
        } else {
            CollarValue { value: self.collar_height(), slope: Slope::from_value(0.0) }
        })
    }
}

trait AcoshOnePlus {
    fn ln_1p_acosh(self) -> f64;
}

impl AcoshOnePlus for f64 {
    /// `arccosh(1 + u) = ln(1 + u + sqrt(u(2 + u)))`, accurate for small `u`.
    fn ln_1p_acosh(self) -> f64 {
        (self + (self * (2.0 + self)).sqrt()).ln_1p()
    }
}

/// `f = max{0, v_α(|q|) − (h(n, α) − c)}`, zero inside the ball of radius `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerronSubsolution {
    pub alpha: f64,
    pub c: f64,
    pub n: usize,
    height: f64,
    profile: CatenoidProfile,
}

impl PerronSubsolution {
    pub fn new(alpha: f64, c: f64, n: usize) -> Result<Self> {
        if !(c >= 0.0) {
            return Err(Error::InvalidArgument(format!("height {c} must be non-negative")));
        }
        let height = catenoid_height(n, alpha)?;
        if !(height > c) {
            return Err(Error::InvalidArgument(format!(
                "h({n}, {alpha}) = {height} does not exceed c = {c}; enlarge α"
            )));
        }
        Ok(Self { alpha, c, n, height, profile: CatenoidProfile::new(n, alpha)? })
    }

    pub fn height_at_infinity(&self) -> f64 {
        self.height
    }

    pub fn at_radius(&self, tau: f64) -> Result<f64> {
        if tau <= self.alpha || self.c == 0.0 {
            return Ok(0.0);
        }
        Ok((self.profile.value(tau)? - (self.height - self.c)).max(0.0))
    }

    pub fn eval(&self, q: &[f64]) -> Result<f64> {
        self.at_radius(q.iter().map(|x| x * x).sum::<f64>().sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_c_examples() {
        assert_eq!(barrier_constant_c(2.0, 3, 1.0, 1.0).unwrap(), 1.5);
        assert_eq!(barrier_constant_c(4.0, 5, 0.0, 2.0).unwrap(), 1.0);
        assert!((barrier_constant_c(1e6, 3, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-5);
        assert!(barrier_constant_c(0.0, 3, 1.0, 1.0).is_err());
        assert!(barrier_constant_c(1.0, 3, 1.0, 0.0).is_err());
    }

    #[test]
    fn varsigma_examples() {
        let one = solve_varsigma(1.0).unwrap();
        assert!((one.varsigma - 1.8102).abs() < 1e-4);
        assert!(one.residual <= 1e-10);
        assert_eq!(one.sign_changes, 1);
        let s = solve_varsigma(1.5).unwrap().varsigma;
        assert!((s - 1.5 * one.varsigma).abs() < 1e-9);
        let f = |mu: f64| (mu / 1.5).acosh() / mu;
        assert!((f(s) - 1.0 / (s * s - 2.25).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cap_examples() {
        assert!((height_cap_l(1.0, 3, 0.0, 1.0).unwrap() - 1.311_029).abs() < 1e-6);
        assert!((height_cap_l(2.0, 3, 1.0, 1.0).unwrap() - 0.4418).abs() < 1e-4);
        // r = 2(n−1)|a| / (2C|a| − |λ|) with C = 1
        let l1 = height_cap_l(4.0, 3, 1.0, 1.0).unwrap();
        assert!((l1 - 0.66274).abs() < 1e-5, "{l1}");
    }

    #[test]
    fn collar_shape() {
        let bs = BarrierSpec::new(1.0, 3, 1.0, 1.0, None).unwrap();
        assert!((bs.collar_height() - bs.l).abs() < 1e-13);
        let left = bs.collar_barrier(bs.t0 * (1.0 - 1e-15)).unwrap().value;
        let right = bs.collar_barrier(bs.t0).unwrap().value;
        assert!((left - right).abs() < 1e-14);
        assert!(bs.collar_barrier(0.0).unwrap().slope.saturated);
        let two_c = BarrierSpec::new(1.0, 3, 1.0, 1.0, Some(2.0 * bs.c)).unwrap();
        assert!((two_c.t0 - 0.5 / bs.c).abs() < 1e-15);
        for k in 1..100 {
            let t = bs.t0 * k as f64 / 100.0;
            assert!(bs.psi_prime(t).value > 0.0 && bs.psi_second(t) < 0.0);
        }
    }

    #[test]
    fn perron_limits() {
        let p = PerronSubsolution::new(2.0, 0.3, 3).unwrap();
        assert_eq!(p.at_radius(2.0).unwrap(), 0.0);
        assert!((p.at_radius(1e9).unwrap() - 0.3).abs() < 1e-6);
        let zero = PerronSubsolution::new(2.0, 0.0, 3).unwrap();
        assert_eq!(zero.at_radius(50.0).unwrap(), 0.0);
        assert!(PerronSubsolution::new(0.1, 0.3, 3).is_err());
    }
}
