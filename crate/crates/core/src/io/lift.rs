//! Ambient lift `u = v∘π` and its finite-difference verification in `R^{n+1}`.

use rand::Rng;
use serde::Serialize;

use crate::closed_forms::CatenoidProfile;
use crate::error::{Error, Result};
use crate::geometry::{AmbientPoint, GroupSpec, QuotientPoint};
use crate::solver::{GridField, Reduction};

/// A function on the quotient.
pub trait QuotientProfile {
    /// `None` outside the domain of the profile.
    fn value(&self, gs: &GroupSpec, q: &QuotientPoint) -> Option<f64>;

    /// Closed-form `|∇v|_g`, when available.
    fn gradient_norm(&self, _gs: &GroupSpec, _q: &QuotientPoint) -> Option<f64> {
        None
    }
}

impl QuotientProfile for CatenoidProfile {
    fn value(&self, _gs: &GroupSpec, q: &QuotientPoint) -> Option<f64> {
        self.value_at(&q.0).ok()
    }

    fn gradient_norm(&self, gs: &GroupSpec, q: &QuotientPoint) -> Option<f64> {
        let tau = self.radius_of(&q.0);
        let slope = self.eval(tau).ok()?.slope;
        if slope.saturated {
            return None;
        }
        let df: Vec<f64> = q.0.iter().zip(&self.center).map(|(x, c)| slope.value * (x - c) / tau).collect();
        Some(gs.quotient_metric(q).covector_norm_sq(&df).sqrt())
    }
}

/// Physical coordinates of `q` in the chart of a reduction.
pub fn reduction_coordinates(gs: &GroupSpec, reduction: Reduction, q: &QuotientPoint) -> [f64; 2] {
    match reduction {
        Reduction::Radial => [q.norm(), 0.0],
        Reduction::Axisym => {
            let sigma = gs.sigma(q);
            [sigma, (q.norm().powi(2) - sigma * sigma).max(0.0).sqrt()]
        }
        Reduction::Polar2d => [q.0[0], q.0[1]],
    }
}

impl QuotientProfile for GridField {
    fn value(&self, gs: &GroupSpec, q: &QuotientPoint) -> Option<f64> {
        self.sample(reduction_coordinates(gs, self.grid.spec.reduction, q))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AmbientSample {
    pub point: Vec<f64>,
    pub mse_residual: f64,
    pub gradient_error: f64,
    pub invariance_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AmbientReport {
    pub samples: Vec<AmbientSample>,
    pub skipped: usize,
    pub max_mse_residual: f64,
    pub mean_mse_residual: f64,
    pub max_gradient_error: f64,
    pub max_invariance_error: f64,
    /// True when the gradient relation used a closed-form `|∇v|_g`.
    pub analytic_gradient: bool,
    pub fd_rule: String,
}

const MSE_STEP: f64 = 1e-3;
const GRADIENT_STEP: f64 = 1e-5;

/// Random ambient points whose projections satisfy `r0 ≤ |q| ≤ r1`, with `x_k` in `[-z, z]`.
pub fn random_ambient_samples(
    gs: &GroupSpec,
    rng: &mut impl Rng,
    count: usize,
    (r0, r1): (f64, f64),
    z: f64,
) -> Vec<AmbientPoint> {
    (0..count)
        .map(|_| {
            let dir: Vec<f64> = loop {
                let d: Vec<f64> = (0..gs.n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let len = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                if (1e-3..=1.0).contains(&len) {
                    break d.iter().map(|x| x / len).collect();
                }
            };
            let r = rng.random_range(r0..=r1);
            let q = QuotientPoint(dir.iter().map(|x| x * r).collect());
            let t = rng.random_range(-z..=z) / gs.a;
            gs.group_action(&gs.embed(&q), t)
        })
        .collect()
}

/// Evaluates `u = v∘π` at each sample and checks `𝓜(u) = 0`, G-invariance and
/// `|∇̄u| = |∇v|_g∘π`. Samples whose finite-difference stencil leaves the profile's
/// domain are skipped.
pub fn lift_and_verify(
    gs: &GroupSpec,
    profile: &dyn QuotientProfile,
    samples: &[AmbientPoint],
    rng: &mut impl Rng,
) -> Result<AmbientReport> {
    let u = |p: &[f64]| profile.value(gs, &gs.projection(&AmbientPoint(p.to_vec())));
    let mut out = Vec::new();
    let mut skipped = 0;
    let mut analytic = true;
    for p in samples {
        let scale = 1.0 + p.norm();
        let Some(mse) = ambient_mse(&u, &p.0, MSE_STEP * scale) else {
            skipped += 1;
            continue;
        };
        let Some(grad) = gradient(&u, &p.0, GRADIENT_STEP * scale) else {
            skipped += 1;
            continue;
        };
        let q = gs.projection(p);
        let reduced = match profile.gradient_norm(gs, &q) {
            Some(g) => Some(g),
            None => {
                analytic = false;
                quotient_gradient_norm(gs, profile, &q, GRADIENT_STEP * scale)
            }
        };
        let Some(reduced) = reduced else {
            skipped += 1;
            continue;
        };
        let t = rng.random_range(-3.0..3.0);
        let Some(moved) = u(&gs.group_action(p, t).0) else {
            skipped += 1;
            continue;
        };
        let base = u(&p.0).expect("centre of a valid stencil");
        out.push(AmbientSample {
            point: p.0.clone(),
            mse_residual: mse.abs(),
            gradient_error: (grad.iter().map(|x| x * x).sum::<f64>().sqrt() - reduced).abs(),
            invariance_error: (moved - base).abs(),
        });
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument(format!("all {skipped} samples fell outside the profile's domain")));
    }
    let max = |f: fn(&AmbientSample) -> f64| out.iter().map(f).fold(0.0, f64::max);
    Ok(AmbientReport {
        skipped,
        max_mse_residual: max(|s| s.mse_residual),
        mean_mse_residual: out.iter().map(|s| s.mse_residual).sum::<f64>() / out.len() as f64,
        max_gradient_error: max(|s| s.gradient_error),
        max_invariance_error: max(|s| s.invariance_error),
        analytic_gradient: analytic,
        fd_rule: format!(
            "central differences in R^(n+1): step {MSE_STEP:e}(1+|p|) for the operator, {GRADIENT_STEP:e}(1+|p|) for gradients"
        ),
        samples: out,
    })
}

fn gradient(u: &impl Fn(&[f64]) -> Option<f64>, p: &[f64], h: f64) -> Option<Vec<f64>> {
    let mut x = p.to_vec();
    (0..p.len())
        .map(|l| {
            x[l] = p[l] + h;
            let up = u(&x);
            x[l] = p[l] - h;
            let down = u(&x);
            x[l] = p[l];
            Some((up? - down?) / (2.0 * h))
        })
        .collect()
}

/// `𝓜(u) = ((1+|∇u|²)Δu − ∇u·D²u·∇u) / (1+|∇u|²)^{3/2}` by central differences.
#[allow(clippy::needless_range_loop)]
pub fn ambient_mse(u: &impl Fn(&[f64]) -> Option<f64>, p: &[f64], h: f64) -> Option<f64> {
    let dim = p.len();
    let centre = u(p)?;
    let mut x = p.to_vec();
    let mut at = |shifts: &[(usize, f64)]| {
        for &(l, d) in shifts {
            x[l] += d;
        }
        let v = u(&x);
        for &(l, d) in shifts {
            x[l] -= d;
        }
        v
    };
    let mut grad = vec![0.0; dim];
    let mut hess = vec![vec![0.0; dim]; dim];
    for l in 0..dim {
        let (up, down) = (at(&[(l, h)])?, at(&[(l, -h)])?);
        grad[l] = (up - down) / (2.0 * h);
        hess[l][l] = (up - 2.0 * centre + down) / (h * h);
        for m in 0..l {
            let v = (at(&[(l, h), (m, h)])? - at(&[(l, h), (m, -h)])? - at(&[(l, -h), (m, h)])?
                + at(&[(l, -h), (m, -h)])?)
                / (4.0 * h * h);
            hess[l][m] = v;
            hess[m][l] = v;
        }
    }
    let w2 = 1.0 + grad.iter().map(|g| g * g).sum::<f64>();
    let lap: f64 = (0..dim).map(|l| hess[l][l]).sum();
    let quad: f64 = (0..dim).flat_map(|l| (0..dim).map(move |m| (l, m))).map(|(l, m)| grad[l] * hess[l][m] * grad[m]).sum();
    Some((w2 * lap - quad) / w2.powf(1.5))
}

fn quotient_gradient_norm(gs: &GroupSpec, profile: &dyn QuotientProfile, q: &QuotientPoint, h: f64) -> Option<f64> {
    let v = |x: &[f64]| profile.value(gs, &QuotientPoint(x.to_vec()));
    let df = gradient(&v, &q.0, h)?;
    Some(gs.quotient_metric(q).covector_norm_sq(&df).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fd_operator_vanishes_on_a_plane_and_scherk_like_graphs() {
        let plane = |x: &[f64]| Some(0.3 * x[0] - 1.2 * x[1] + 0.5);
        assert!(ambient_mse(&plane, &[0.2, 0.4], 1e-3).unwrap().abs() < 1e-8);
        let scherk = |x: &[f64]| Some((x[1].cos() / x[0].cos()).ln());
        assert!(ambient_mse(&scherk, &[0.3, 0.2], 1e-3).unwrap().abs() < 1e-5);
        let bowl = |x: &[f64]| Some(x[0] * x[0] + x[1] * x[1]);
        assert!((ambient_mse(&bowl, &[0.0, 0.0], 1e-3).unwrap() - 4.0).abs() < 1e-6);
    }

    #[test]
    fn catenoid_lift_is_minimal() {
        let gs = GroupSpec::standard(1.0, 1.0, 2).unwrap();
        let cat = CatenoidProfile::new(2, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = random_ambient_samples(&gs, &mut rng, 20, (1.5, 5.0), 3.0);
        let rep = lift_and_verify(&gs, &cat, &pts, &mut rng).unwrap();
        assert_eq!(rep.skipped, 0);
        assert!(rep.max_mse_residual < 1e-4, "{}", rep.max_mse_residual);
        assert!(rep.max_gradient_error < 1e-6, "{}", rep.max_gradient_error);
        assert!(rep.max_invariance_error < 1e-12, "{}", rep.max_invariance_error);
    }
}
