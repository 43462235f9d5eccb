//! Damped Newton solver for the reduced equation `𝔐(v) = 0` on truncated domains.

pub mod grid;
pub mod operator;

use faer::prelude::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use serde::Serialize;

use crate::closed_forms::Slope;
use crate::error::{Error, Result};
use grid::Grid;
pub use grid::{GridSpec, Reduction, Spacing};
pub use operator::ReducedOperator;

/// A scalar field on the nodes of a grid, indexed by [`Grid::index`].
#[derive(Clone, Debug)]
pub struct GridField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

/// Classification of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryTag {
    Interior,
    Inner,
    Outer,
    /// Symmetry line of the axisymmetric reduction (`θ = 0` or `θ = π/2`).
    Axis,
}

impl GridField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "field has {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: &Grid, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        for k in 0..grid.nt {
            for i in 0..grid.ns {
                values[grid.index(i, k)] = f(i, k);
            }
        }
        Self { grid: grid.clone(), values }
    }

    pub fn at(&self, i: usize, k: usize) -> f64 {
        self.values[self.grid.index(i, k)]
    }

    pub fn tag(&self, i: usize, k: usize) -> BoundaryTag {
        if i == 0 {
            BoundaryTag::Inner
        } else if i + 1 == self.grid.ns {
            BoundaryTag::Outer
        } else if self.grid.spec.reduction == Reduction::Axisym && (k == 0 || k + 1 == self.grid.nt) {
            BoundaryTag::Axis
        } else {
            BoundaryTag::Interior
        }
    }

    /// `|∇v|_g` at node `(i, k)`; one-sided second-order differences on the `s`
    /// boundaries. Infinite values (degenerate coordinates at a stretched boundary) are
    /// reported as saturated.
    pub fn gradient_norm(&self, i: usize, k: usize) -> Slope {
        let g = &self.grid;
        let v = |ii: usize, kk: usize| self.at(ii, kk);
        let ps = if i == 0 {
            (-3.0 * v(0, k) + 4.0 * v(1, k) - v(2, k)) / (2.0 * g.ds)
        } else if i + 1 == g.ns {
            (3.0 * v(i, k) - 4.0 * v(i - 1, k) + v(i - 2, k)) / (2.0 * g.ds)
        } else {
            (v(i + 1, k) - v(i - 1, k)) / (2.0 * g.ds)
        };
        let (km, kp) = (operator::neighbour(g, k, -1), operator::neighbour(g, k, 1));
        let pt = if km == kp { 0.0 } else { (v(i, kp) - v(i, km)) / (2.0 * g.dtheta) };
        let geo = g.node_geometry(i, k);
        let m = geo.inv_metric;
        let mut sq = 0.0;
        for (coef, a, b) in [(m[0], ps, ps), (2.0 * m[1], ps, pt), (m[2], pt, pt)] {
            if a * b != 0.0 {
                sq += coef * a * b;
            }
        }
        Slope::from_value(sq.max(0.0).sqrt())
    }

    /// Bilinear interpolation in logical coordinates at a physical point.
    pub fn sample(&self, x: [f64; 2]) -> Option<f64> {
        let g = &self.grid;
        let (s, theta) = g.logical_of(x)?;
        let fs = (s / g.ds).min((g.ns - 1) as f64);
        let i = (fs.floor() as usize).min(g.ns - 2);
        let ws = fs - i as f64;
        let column = |k: usize| (1.0 - ws) * self.at(i, k) + ws * self.at(i + 1, k);
        if g.nt == 1 {
            return Some(column(0));
        }
        let ft = theta / g.dtheta;
        let k0 = if g.periodic() { ft.floor() as usize % g.nt } else { (ft.floor() as usize).min(g.nt - 2) };
        let k1 = (k0 + 1) % g.nt;
        let wt = ft - ft.floor().min(if g.periodic() { f64::INFINITY } else { (g.nt - 2) as f64 });
        Some((1.0 - wt) * column(k0) + wt * column(k1))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Newton and continuation controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_newton: usize,
    pub max_halvings: usize,
    pub max_continuation: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_newton: 60, max_halvings: 30, max_continuation: 20 }
    }
}

/// Location and size of the discrete gradient maximum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GradientMax {
    pub value: f64,
    pub saturated: bool,
    pub node: (usize, usize),
    pub location: [f64; 2],
    pub on_inner_boundary: bool,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub field: GridField,
    /// `‖R‖∞` of the integrated residual at termination.
    pub residual_norm: f64,
    pub tolerance: f64,
    pub newton_iterations: usize,
    pub continuation_steps: usize,
    pub sup_gradient: GradientMax,
    /// `max |∇v|_g` over the inner boundary ring.
    pub boundary_gradient: Slope,
    pub inner_data: f64,
    pub outer_data: f64,
    /// Mean of `v` on the ring next to the outer boundary.
    pub height_near_outer: f64,
    /// [`inner_detachment`] of the field.
    pub inner_detachment: f64,
    pub converged: bool,
}

/// Data whose detachment ratio exceeds this are reported as not attained.
pub const DETACHMENT_LIMIT: f64 = 4.0;

/// Largest ratio, over the inner ring, of the first-cell increment `|v₁ − v₀|` to the
/// increment `√(2ρδ)` of a catenoid with a vertical neck on the obstacle of radius `ρ`
/// over a cell of width `δ`. Attained boundary data keep this near or below 1; a solution
/// that jumps off the inner data drives it up like `δ^{-1/2}`.
pub fn inner_detachment(field: &GridField) -> f64 {
    let g = &field.grid;
    (0..g.nt)
        .map(|k| {
            let (p0, p1) = (g.node_point(0, k), g.node_point(1, k));
            let delta = (p1[0] - p0[0]).hypot(p1[1] - p0[1]);
            (field.at(1, k) - field.at(0, k)).abs() / (2.0 * g.spec.rho * delta).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Discrete gradient maximum over all nodes.
pub fn sup_gradient(field: &GridField) -> GradientMax {
    let g = &field.grid;
    let mut best = GradientMax {
        value: -1.0,
        saturated: false,
        node: (0, 0),
        location: g.node_point(0, 0),
        on_inner_boundary: true,
    };
    for k in 0..g.nt {
        for i in 0..g.ns {
            let s = field.gradient_norm(i, k);
            if s.value > best.value {
                best = GradientMax {
                    value: s.value,
                    saturated: s.saturated,
                    node: (i, k),
                    location: g.node_point(i, k),
                    on_inner_boundary: i == 0,
                };
            }
        }
    }
    best
}

fn inf_norm(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn two_norm(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Sparse LU with the symbolic factorisation reused across Newton steps.
struct LinearSolver {
    n: usize,
    symbolic: Option<SymbolicLu<usize>>,
}

impl LinearSolver {
    fn solve(&mut self, entries: &[(usize, usize, f64)], rhs: &[f64]) -> Result<Vec<f64>> {
        let triplets: Vec<Triplet<usize, usize, f64>> =
            entries.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(self.n, self.n, &triplets)
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        if self.symbolic.is_none() {
            self.symbolic =
                Some(SymbolicLu::try_new(mat.symbolic()).map_err(|e| Error::LinearSolve(format!("{e:?}")))?);
        }
        let symbolic = self.symbolic.clone().expect("set above");
        let lu = Lu::try_new_with_symbolic(symbolic, mat.as_ref()).map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        let mut x = Mat::from_fn(self.n, 1, |i, _| rhs[i]);
        lu.solve_in_place(x.as_mut());
        let out: Vec<f64> = (0..self.n).map(|i| x[(i, 0)]).collect();
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(Error::LinearSolve("non-finite Newton step".into()))
        }
    }
}

struct NewtonOutcome {
    converged: bool,
    residual: f64,
    iterations: usize,
}

/// Damped Newton with Armijo backtracking on `‖R‖₂`.
fn newton(
    op: &ReducedOperator,
    lin: &mut LinearSolver,
    v: &mut [f64],
    inner: f64,
    outer: f64,
    tol: f64,
    cfg: &SolverConfig,
) -> NewtonOutcome {
    let mut iterations = 0;
    loop {
        let l = op.linearise(v, inner, outer);
        let r_inf = inf_norm(&l.residual);
        if !r_inf.is_finite() {
            return NewtonOutcome { converged: false, residual: r_inf, iterations };
        }
        if r_inf <= tol {
            return NewtonOutcome { converged: true, residual: r_inf, iterations };
        }
        if iterations >= cfg.max_newton {
            return NewtonOutcome { converged: false, residual: r_inf, iterations };
        }
        iterations += 1;
        let rhs: Vec<f64> = l.residual.iter().map(|x| -x).collect();
        let step = match lin.solve(&l.entries, &rhs) {
            Ok(s) => s,
            Err(_) => return NewtonOutcome { converged: false, residual: r_inf, iterations },
        };
        let r0 = two_norm(&l.residual);
        let mut alpha = 1.0;
        let mut trial = v.to_vec();
        let mut accepted = false;
        for _ in 0..=cfg.max_halvings {
            for (t, (x, d)) in trial.iter_mut().zip(v.iter().zip(&step)) {
                *t = x + alpha * d;
            }
            let r1 = two_norm(&op.residual(&trial, inner, outer));
            if r1.is_finite() && (r1 <= (1.0 - 1e-4 * alpha) * r0 || inf_norm(&op.residual(&trial, inner, outer)) <= tol) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return NewtonOutcome { converged: false, residual: r_inf, iterations };
        }
        let stalled = inf_norm(&step) * alpha <= 1e-15 * (1.0 + inf_norm(v));
        v.copy_from_slice(&trial);
        if stalled {
            let r = inf_norm(&op.residual(v, inner, outer));
            return NewtonOutcome { converged: r <= tol.max(1e-9), residual: r, iterations };
        }
    }
}

/// Initial guess interpolating the data linearly in `s`.
pub fn linear_guess(grid: &Grid, inner: f64, outer: f64) -> Vec<f64> {
    GridField::from_fn(grid, |i, _| inner + (outer - inner) * grid.s_at(i)).values
}

/// Solves `𝔐(v) = 0` with `v = inner` on the obstacle and `v = outer` on the outer
/// circle. Starts from `initial` (or the linear guess) and falls back to ramping the
/// data from zero when Newton fails.
pub fn solve_dirichlet(
    grid: &Grid,
    inner: f64,
    outer: f64,
    cfg: &SolverConfig,
    initial: Option<&[f64]>,
) -> Result<SolveReport> {
    let op = ReducedOperator::new(grid);
    solve_with_operator(&op, inner, outer, cfg, initial)
}

/// As [`solve_dirichlet`] with a prebuilt operator.
pub fn solve_with_operator(
    op: &ReducedOperator,
    inner: f64,
    outer: f64,
    cfg: &SolverConfig,
    initial: Option<&[f64]>,
) -> Result<SolveReport> {
    let grid = &op.grid;
    if !(inner.is_finite() && outer.is_finite()) {
        return Err(Error::InvalidArgument("boundary data must be finite".into()));
    }
    let guess = linear_guess(grid, inner, outer);
    let scale = inf_norm(&op.residual(&guess, inner, outer));
    let tol = cfg.abs_tol + cfg.rel_tol * scale;
    let mut lin = LinearSolver { n: grid.len(), symbolic: None };

    let mut v = initial.map(|x| x.to_vec()).unwrap_or(guess);
    if v.len() != grid.len() {
        return Err(Error::InvalidArgument("initial guess has the wrong length".into()));
    }
    let mut total_iterations = 0;
    let first = newton(op, &mut lin, &mut v, inner, outer, tol, cfg);
    total_iterations += first.iterations;
    let mut steps = 0;
    let mut outcome = first;
    if !outcome.converged {
        // continuation from the zero solution
        let mut done = 0.0_f64;
        let mut delta = 0.25_f64;
        let mut current = vec![0.0; grid.len()];
        while steps < cfg.max_continuation && done < 1.0 {
            steps += 1;
            let target = (done + delta).min(1.0);
            let mut trial = current.clone();
            for (i, t) in trial.iter_mut().enumerate() {
                // rescale the previous state towards the new data
                if done > 0.0 {
                    *t *= target / done;
                } else {
                    *t = linear_guess(grid, inner * target, outer * target)[i];
                }
            }
            let step_tol = cfg.abs_tol + cfg.rel_tol * scale * target.max(1e-3);
            let out = newton(op, &mut lin, &mut trial, inner * target, outer * target, step_tol, cfg);
            total_iterations += out.iterations;
            if out.converged {
                done = target;
                current = trial;
                delta *= 1.5;
                outcome = out;
            } else {
                delta *= 0.5;
            }
        }
        if done < 1.0 {
            return Err(Error::Infeasible {
                reason: format!(
                    "Newton failed to converge for data ({inner}, {outer}) after {steps} continuation steps"
                ),
                last_feasible: Some(done),
            });
        }
        v = current;
        outcome.residual = inf_norm(&op.residual(&v, inner, outer));
        outcome.converged = outcome.residual <= tol.max(cfg.abs_tol + cfg.rel_tol * scale);
    }
    let field = GridField { grid: grid.clone(), values: v };
    Ok(build_report(field, outcome.residual, tol, total_iterations, steps, inner, outer, outcome.converged))
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    field: GridField,
    residual_norm: f64,
    tolerance: f64,
    newton_iterations: usize,
    continuation_steps: usize,
    inner_data: f64,
    outer_data: f64,
    converged: bool,
) -> SolveReport {
    let g = &field.grid;
    let sup = sup_gradient(&field);
    let mut boundary = Slope::from_value(0.0);
    for k in 0..g.nt {
        let s = field.gradient_norm(0, k);
        if s.value > boundary.value {
            boundary = s;
        }
    }
    let height_near_outer = (0..g.nt).map(|k| field.at(g.ns - 2, k)).sum::<f64>() / g.nt as f64;
    SolveReport {
        inner_detachment: inner_detachment(&field),
        sup_gradient: sup,
        boundary_gradient: boundary,
        height_near_outer,
        field,
        residual_norm,
        tolerance,
        newton_iterations,
        continuation_steps,
        inner_data,
        outer_data,
        converged,
    }
}

/// Radial two-point problem on `[ρ, R]` with the given node distribution.
#[allow(clippy::too_many_arguments)]
pub fn radial_solve(
    n: usize,
    lambda: f64,
    a: f64,
    rho: f64,
    outer_radius: f64,
    inner: f64,
    outer: f64,
    nodes: usize,
    spacing: Spacing,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let gs = crate::geometry::GroupSpec::standard(lambda, a, n)?;
    let grid = GridSpec::radial(gs, rho, outer_radius, nodes, spacing).build()?;
    solve_dirichlet(&grid, inner, outer, cfg, None)
}
