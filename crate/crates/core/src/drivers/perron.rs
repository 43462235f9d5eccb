//! Height-prescribed solutions: truncated Dirichlet problems with outer value `c`,
//! trapped between the Perron subsolution and the collar barrier.

use serde::Serialize;

use crate::closed_forms::{catenoid_height, height_cap_l, BarrierSpec, CatenoidProfile, PerronSubsolution, ShiftedCatenoid};
use crate::error::{Error, Result};
use crate::solver::{solve_with_operator, ReducedOperator, Reduction, SolveReport, SolverConfig};

use super::certificates::{sandwich_certificate, Certificate};
use super::Problem;

#[derive(Clone, Debug, Serialize)]
pub struct PerronRung {
    pub outer_radius: f64,
    pub height_near_outer: f64,
    pub residual_norm: f64,
    pub converged: bool,
    pub sandwich: Certificate,
    /// For radial problems: the limit height of the catenoid-family member through the
    /// computed solution, `β h(n, 1) − v_β(ρ)`, with `β` recovered from the flux.
    pub asymptotic_height: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PerronReport {
    pub c: f64,
    pub cap: f64,
    pub interior_sphere_radius: f64,
    /// Radius `α` of the ball carrying the subsolution.
    pub alpha: f64,
    pub rungs: Vec<PerronRung>,
    #[serde(skip)]
    pub solutions: Vec<SolveReport>,
    pub note: &'static str,
}

impl PerronReport {
    pub fn all_pass(&self) -> bool {
        self.rungs.iter().all(|r| r.converged && r.sandwich.pass)
    }
}

/// Solves the truncations with outer value `c` and certifies `f ≤ w ≤ W`.
pub fn height_prescribed_solution(
    c: f64,
    problem: &Problem,
    ladder: &[f64],
    cfg: &SolverConfig,
) -> Result<PerronReport> {
    let gs = problem.group;
    let n = gs.n;
    if n < 3 {
        return Err(Error::InvalidArgument("height-prescribed solutions need n ≥ 3".into()));
    }
    if !(c >= 0.0) {
        return Err(Error::InvalidArgument(format!("height {c} must be non-negative")));
    }
    let (center, rho) = problem
        .domain
        .as_ball()
        .ok_or_else(|| Error::InvalidArgument("the solver handles ball obstacles only".into()))?;
    if center != [0.0; 2] {
        return Err(Error::InvalidArgument("height-prescribed solves need an origin-centred ball".into()));
    }
    let r = problem
        .domain
        .inner_sphere_radius
        .ok_or_else(|| Error::InvalidArgument("interior sphere radius unknown".into()))?;
    let cap = height_cap_l(r, n, gs.lambda, gs.a)?;
    if c > cap * (1.0 + 1e-12) {
        return Err(Error::HeightAboveCap { c, cap });
    }
    let varrho = problem.domain.varrho;
    let unit = catenoid_height(n, 1.0)?;
    let alpha = varrho.max(1.05 * c / unit);
    let lower = PerronSubsolution::new(alpha, c, n)?;
    let barrier = BarrierSpec::new(r, n, gs.lambda, gs.a, None)?;
    let neck = CatenoidProfile::new(n, r)?;
    let upper = |tau: f64| -> f64 {
        if gs.lambda == 0.0 {
            neck.value(tau.max(r)).unwrap_or(f64::INFINITY)
        } else {
            barrier.collar_barrier((tau - rho).max(0.0)).map(|w| w.value).unwrap_or(f64::INFINITY)
        }
    };

    let mut rungs = Vec::new();
    let mut solutions: Vec<SolveReport> = Vec::new();
    for &outer_radius in ladder {
        let grid = problem.grid_for(outer_radius)?;
        let op = ReducedOperator::new(&grid);
        let rep = solve_with_operator(&op, 0.0, c, cfg, None)?;
        let h = grid.ds;
        let slack = 1e-8 + 10.0 * h * h;
        let sandwich = sandwich_certificate(
            &rep.field,
            |x| lower.at_radius(x[0].hypot(x[1])).unwrap_or(f64::NEG_INFINITY),
            |x| upper(x[0].hypot(x[1])),
            slack,
            "f ≤ w ≤ W with f the Perron subsolution and W the collar barrier",
        );
        let asymptotic_height = if problem.reduction == Reduction::Radial && c > 0.0 {
            radial_asymptotic_height(&op, &rep, rho)
        } else {
            None
        };
        rungs.push(PerronRung {
            outer_radius,
            height_near_outer: rep.height_near_outer,
            residual_norm: rep.residual_norm,
            converged: rep.converged,
            sandwich,
            asymptotic_height,
        });
        solutions.push(rep);
    }
    Ok(PerronReport {
        c,
        cap,
        interior_sphere_radius: r,
        alpha,
        rungs,
        solutions,
        note: "the Perron supremum is replaced by truncated Dirichlet solves with outer value c",
    })
}

fn radial_asymptotic_height(op: &ReducedOperator, rep: &SolveReport, rho: f64) -> Option<f64> {
    let n = op.grid.spec.group.n;
    let beta = op.radial_flux(&rep.field.values)?.powf(1.0 / (n - 1) as f64);
    ShiftedCatenoid::new(n, rho, beta).ok()?.height_at_infinity().ok()
}
