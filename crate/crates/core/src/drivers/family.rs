//! The gradient-constrained exhaustion family: on each truncation `U ∩ 𝔅_R`, the largest
//! outer value `t` whose solution (zero on the obstacle) keeps `sup |∇w_t| ≤ s`.

use serde::Serialize;

use crate::closed_forms::catenoid_height;
use crate::error::{Error, Result};
use crate::solver::{
    solve_with_operator, sup_gradient, GridField, ReducedOperator, SolveReport, SolverConfig,
};

use super::Problem;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rung {
    pub outer_radius: f64,
    /// Largest feasible outer value `t_k`.
    pub t: f64,
    /// Bracket width of the bisection at termination.
    pub bisection_width: f64,
    pub bisection_steps: usize,
    pub boundary_gradient: f64,
    pub sup_gradient: f64,
    pub sup_on_inner_boundary: bool,
    /// Largest `|∇w|` away from the inner boundary.
    pub sup_interior: f64,
    pub max_value: f64,
    pub height_near_outer: f64,
    /// Largest `|∇w|` on the outer third of the annulus.
    pub outer_third_gradient: f64,
    /// For radial problems, `c` recovered from the conserved flux `c^{n−1}`.
    pub flux_parameter: Option<f64>,
    /// Bisection trace `(t, sup |∇w_t|)`; infeasible solves record `∞`.
    pub trace: Vec<(f64, f64)>,
    pub anomalies: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dichotomy {
    BoundedBelowH,
    ApproachingH,
    UnboundedN2,
    Inconclusive,
}

/// Least-squares fit `t ≈ α ln R + β`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogFit {
    pub alpha: f64,
    pub beta: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub s: f64,
    pub rungs: Vec<Rung>,
    /// `max |w_{k+1} − w_k|` on the first rung's annulus.
    pub cauchy_differences: Vec<f64>,
    #[serde(skip)]
    pub limit_profile: Option<GridField>,
    #[serde(skip)]
    pub solutions: Vec<SolveReport>,
    pub dichotomy: Dichotomy,
    /// `h(n, ϱ)` for `n ≥ 3`.
    pub height_bound: Option<f64>,
    pub log_fit: Option<LogFit>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FamilyConfig {
    pub solver: SolverConfig,
    /// Relative bisection width `Δt ≤ tol · max(1, t)`.
    pub bisection_tol: f64,
    pub max_bisection: usize,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self { solver: SolverConfig::default(), bisection_tol: 1e-9, max_bisection: 80 }
    }
}

struct Probe {
    gradient: f64,
    report: Option<SolveReport>,
}

fn probe(op: &ReducedOperator, t: f64, cfg: &SolverConfig, warm: Option<(&[f64], f64)>) -> Probe {
    let initial: Option<Vec<f64>> = warm.and_then(|(v, t0)| (t0 > 0.0).then(|| v.iter().map(|x| x * t / t0).collect()));
    match solve_with_operator(op, 0.0, t, cfg, initial.as_deref()) {
        Ok(rep) if rep.converged => {
            let g = if rep.sup_gradient.saturated { f64::INFINITY } else { rep.sup_gradient.value };
            Probe { gradient: g, report: Some(rep) }
        }
        _ => Probe { gradient: f64::INFINITY, report: None },
    }
}

fn rung_statistics(rep: &SolveReport) -> (f64, f64) {
    let f = &rep.field;
    let g = &f.grid;
    let r_out = g.spec.outer;
    let rho_reach = g.spec.rho + (g.spec.center[0].hypot(g.spec.center[1]));
    let third = rho_reach + 2.0 * (r_out - rho_reach) / 3.0;
    let (mut interior, mut outer) = (0.0_f64, 0.0_f64);
    for k in 0..g.nt {
        for i in 1..g.ns {
            let v = f.gradient_norm(i, k).value;
            interior = interior.max(v);
            if g.node_radius(i, k) >= third {
                outer = outer.max(v);
            }
        }
    }
    (interior, outer)
}

fn solve_rung(problem: &Problem, outer_radius: f64, s: f64, cfg: &FamilyConfig, cap: f64) -> Result<(Rung, SolveReport)> {
    let grid = problem.grid_for(outer_radius)?;
    let op = ReducedOperator::new(&grid);
    let mut trace = Vec::new();
    let mut anomalies = Vec::new();

    let mut lo = 0.0;
    let mut lo_rep = solve_with_operator(&op, 0.0, 0.0, &cfg.solver, None)?;
    let mut hi = cap;
    let mut steps = 0;
    // expand while the upper end is still feasible
    loop {
        let pr = probe(&op, hi, &cfg.solver, Some((&lo_rep.field.values, lo)));
        trace.push((hi, pr.gradient));
        steps += 1;
        if pr.gradient <= s {
            lo = hi;
            lo_rep = pr.report.expect("feasible probe has a report");
            hi *= 2.0;
            if steps > 40 {
                return Err(Error::Bisection(format!("no infeasible outer value found up to {hi}")));
            }
        } else {
            break;
        }
    }
    while hi - lo > cfg.bisection_tol * lo.max(1.0) && steps < cfg.max_bisection {
        let mid = 0.5 * (lo + hi);
        let pr = probe(&op, mid, &cfg.solver, Some((&lo_rep.field.values, lo)));
        trace.push((mid, pr.gradient));
        steps += 1;
        if pr.gradient <= s {
            lo = mid;
            lo_rep = pr.report.expect("feasible probe has a report");
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 && s > 0.0 {
        return Err(Error::Bisection(format!("no feasible outer value t > 0 at R = {outer_radius}")));
    }
    // monotonicity of t ↦ sup |∇w_t| over the finite part of the trace
    let mut sorted: Vec<(f64, f64)> = trace.iter().copied().filter(|p| p.1.is_finite()).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in sorted.windows(2) {
        if w[1].1 < w[0].1 - 1e-8 {
            anomalies.push(format!("sup gradient decreased from {} at t = {} to {} at t = {}", w[0].1, w[0].0, w[1].1, w[1].0));
        }
    }
    let sup = sup_gradient(&lo_rep.field);
    let (sup_interior, outer_third) = rung_statistics(&lo_rep);
    let rung = Rung {
        outer_radius,
        t: lo,
        bisection_width: hi - lo,
        bisection_steps: steps,
        boundary_gradient: lo_rep.boundary_gradient.value,
        sup_gradient: sup.value,
        sup_on_inner_boundary: sup.on_inner_boundary,
        sup_interior,
        max_value: lo_rep.field.max(),
        height_near_outer: lo_rep.height_near_outer,
        outer_third_gradient: outer_third,
        flux_parameter: op
            .radial_flux(&lo_rep.field.values)
            .map(|f| f.powf(1.0 / (grid.spec.group.n - 1) as f64)),
        trace,
        anomalies,
    };
    Ok((rung, lo_rep))
}

/// Runs the exhaustion ladder for gradient budget `s`.
pub fn gradient_constrained_family(
    s: f64,
    problem: &Problem,
    ladder: &[f64],
    cfg: &FamilyConfig,
) -> Result<FamilyReport> {
    if !(s >= 0.0) {
        return Err(Error::InvalidArgument(format!("gradient budget {s} must be non-negative")));
    }
    if ladder.is_empty() || ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("ladder radii must be nonempty and increasing".into()));
    }
    let n = problem.group.n;
    let varrho = problem.domain.varrho;
    let height_bound = if n >= 3 { Some(catenoid_height(n, varrho)?) } else { None };
    let cap = match height_bound {
        Some(h) => 2.0 * h,
        None => 2.0 * varrho,
    };

    let mut rungs = Vec::with_capacity(ladder.len());
    let mut solutions = Vec::with_capacity(ladder.len());
    for &r in ladder {
        if s == 0.0 {
            let grid = problem.grid_for(r)?;
            let rep = crate::solver::solve_dirichlet(&grid, 0.0, 0.0, &cfg.solver, None)?;
            rungs.push(Rung {
                outer_radius: r,
                t: 0.0,
                bisection_width: 0.0,
                bisection_steps: 0,
                boundary_gradient: 0.0,
                sup_gradient: 0.0,
                sup_on_inner_boundary: true,
                sup_interior: 0.0,
                max_value: rep.field.max(),
                height_near_outer: 0.0,
                outer_third_gradient: 0.0,
                flux_parameter: (problem.reduction == crate::solver::Reduction::Radial).then_some(0.0),
                trace: Vec::new(),
                anomalies: Vec::new(),
            });
            solutions.push(rep);
            continue;
        }
        let (rung, rep) = solve_rung(problem, r, s, cfg, cap)?;
        rungs.push(rung);
        solutions.push(rep);
    }

    // Cauchy differences on the first rung's annulus
    let reference = &solutions[0].field;
    let mut cauchy = Vec::new();
    let mut limit = None;
    for pair in solutions.windows(2) {
        let mut diff: f64 = 0.0;
        let mut sampled = reference.clone();
        for (l, value) in sampled.values.iter_mut().enumerate() {
            let (i, k) = (l % reference.grid.ns, l / reference.grid.ns);
            let x = reference.grid.node_point(i, k);
            let a = pair[0].field.sample(x).unwrap_or(f64::NAN);
            let b = pair[1].field.sample(x).unwrap_or(f64::NAN);
            diff = diff.max((a - b).abs());
            *value = b;
        }
        cauchy.push(diff);
        limit = Some(sampled);
    }

    let log_fit = (n == 2 && rungs.len() >= 2).then(|| fit_log(&rungs));
    let dichotomy = classify(&rungs, height_bound, log_fit.as_ref());
    Ok(FamilyReport {
        s,
        rungs,
        cauchy_differences: cauchy,
        limit_profile: limit,
        solutions,
        dichotomy,
        height_bound,
        log_fit,
    })
}

fn fit_log(rungs: &[Rung]) -> LogFit {
    let xs: Vec<f64> = rungs.iter().map(|r| r.outer_radius.ln()).collect();
    let ys: Vec<f64> = rungs.iter().map(|r| r.t).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let alpha = sxy / sxx;
    let beta = my - alpha * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - alpha * x - beta).powi(2)).sum();
    LogFit { alpha, beta, residual: (rss / m).sqrt() }
}

fn classify(rungs: &[Rung], height: Option<f64>, fit: Option<&LogFit>) -> Dichotomy {
    let last = match rungs.last() {
        Some(r) => r,
        None => return Dichotomy::Inconclusive,
    };
    match height {
        None => match fit {
            Some(f) if f.alpha > 0.0 && rungs.windows(2).all(|w| w[1].t > w[0].t) => Dichotomy::UnboundedN2,
            _ => Dichotomy::Inconclusive,
        },
        Some(h) => {
            let top = last.max_value;
            if top > h - 1e-2 && top <= h + 1e-3 {
                Dichotomy::ApproachingH
            } else if top <= h - 5e-2 && rungs.len() >= 2 {
                let prev = rungs[rungs.len() - 2].max_value;
                if (top - prev).abs() < 5e-2 {
                    Dichotomy::BoundedBelowH
                } else {
                    Dichotomy::Inconclusive
                }
            } else {
                Dichotomy::Inconclusive
            }
        }
    }
}

/// Outcome of [`gradient_decay_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    /// `(R, max |∇w| on the outer third)` per rung.
    pub samples: Vec<(f64, f64)>,
    /// Log–log slope of the samples against `R`.
    pub exponent: f64,
    pub consistent_with_decay: bool,
}

/// Fits the outer-third gradient maxima along the ladder for decay.
pub fn gradient_decay_check(family: &FamilyReport) -> Result<DecayReport> {
    if family.rungs.len() < 3 {
        return Err(Error::InvalidArgument("decay check needs at least 3 rungs".into()));
    }
    let samples: Vec<(f64, f64)> = family.rungs.iter().map(|r| (r.outer_radius, r.outer_third_gradient)).collect();
    if samples.iter().all(|s| s.1 == 0.0) {
        return Ok(DecayReport { samples, exponent: f64::NEG_INFINITY, consistent_with_decay: true });
    }
    let pts: Vec<(f64, f64)> = samples.iter().filter(|s| s.1 > 0.0).map(|s| (s.0.ln(), s.1.ln())).collect();
    let m = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / m, pts.iter().map(|p| p.1).sum::<f64>() / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let decreasing = samples.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    Ok(DecayReport { samples, exponent, consistent_with_decay: decreasing && exponent < 0.0 })
}
