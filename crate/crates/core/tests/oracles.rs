//! Independent oracles: special functions, intrinsic curvature, direct quadrature and
//! ambient finite differences, each computed without the library routine under test.

use approx::assert_relative_eq;
use helix_mse::closed_forms::{catenoid_height, ShiftedCatenoid};
use helix_mse::geometry::{AmbientPoint, GroupSpec, QuotientPoint};
use helix_mse::io::{ambient_mse, reduction_coordinates};
use helix_mse::solver::{radial_solve, GridSpec, ReducedOperator, Reduction, SolverConfig, Spacing};
use statrs::function::beta::beta;

/// `∫_1^∞ dt / sqrt(t^{2m} − 1) = B((m−1)/(2m), 1/2) / (2m)` after `u = t^{−2m}`.
#[test]
fn catenoid_height_matches_beta_function() {
    for n in 3..=8 {
        let m = (n - 1) as f64;
        let oracle = beta((m - 1.0) / (2.0 * m), 0.5) / (2.0 * m);
        assert_relative_eq!(catenoid_height(n, 1.0).unwrap(), oracle, max_relative = 1e-10);
    }
}

/// Gaussian curvature of `[[E, F], [F, G]]` by the Brioschi formula with central
/// differences of the metric coefficients.
fn brioschi(metric: impl Fn(f64, f64) -> [f64; 3], x: f64, y: f64, h: f64) -> f64 {
    let m = |dx: f64, dy: f64| metric(x + dx, y + dy);
    let d = |f: &dyn Fn(f64, f64) -> f64, ax: usize| {
        if ax == 0 {
            (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h)
        } else {
            (f(0.0, h) - f(0.0, -h)) / (2.0 * h)
        }
    };
    let dd = |f: &dyn Fn(f64, f64) -> f64, a: usize, b: usize| match (a, b) {
        (0, 0) => (f(h, 0.0) - 2.0 * f(0.0, 0.0) + f(-h, 0.0)) / (h * h),
        (1, 1) => (f(0.0, h) - 2.0 * f(0.0, 0.0) + f(0.0, -h)) / (h * h),
        _ => (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h),
    };
    let e = |dx: f64, dy: f64| m(dx, dy)[0];
    let f = |dx: f64, dy: f64| m(dx, dy)[1];
    let g = |dx: f64, dy: f64| m(dx, dy)[2];
    let [e0, f0, g0] = m(0.0, 0.0);
    let (eu, ev) = (d(&e, 0), d(&e, 1));
    let (fu, fv) = (d(&f, 0), d(&f, 1));
    let (gu, gv) = (d(&g, 0), d(&g, 1));
    let (evv, guu, fuv) = (dd(&e, 1, 1), dd(&g, 0, 0), dd(&f, 0, 1));
    let a = nalgebra::Matrix3::new(
        -0.5 * evv + fuv - 0.5 * guu,
        0.5 * eu,
        fu - 0.5 * ev,
        fv - 0.5 * gu,
        e0,
        f0,
        0.5 * gv,
        f0,
        g0,
    );
    let b = nalgebra::Matrix3::new(0.0, 0.5 * ev, 0.5 * gu, 0.5 * ev, e0, f0, 0.5 * gu, f0, g0);
    (a.determinant() - b.determinant()) / (e0 * g0 - f0 * f0).powi(2)
}

#[test]
fn quotient_curvature_agrees_with_intrinsic_and_oneill() {
    for (lambda, a) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.7)] {
        let gs = GroupSpec::standard(lambda, a, 2).unwrap();
        let metric = |x: f64, y: f64| {
            let t = gs.quotient_metric(&QuotientPoint(vec![x, y])).tensor;
            [t[(0, 0)], t[(0, 1)], t[(1, 1)]]
        };
        for (x, y) in [(0.3, 0.1), (1.0, -0.5), (-1.2, 0.8), (0.05, 2.0)] {
            let s2 = x * x + y * y;
            let closed = 3.0 * lambda * lambda * a * a / (lambda * lambda * s2 + a * a).powi(2);
            let intrinsic = brioschi(metric, x, y, 1e-3);
            assert_relative_eq!(intrinsic, closed, max_relative = 1e-4);

            let q = QuotientPoint(vec![x, y]);
            let g = gs.quotient_metric(&q);
            let e1 = QuotientPoint(vec![1.0 / g.tensor[(0, 0)].sqrt(), 0.0]);
            let proj = g.inner(&QuotientPoint(vec![0.0, 1.0]), &e1);
            let w = QuotientPoint(vec![-proj * e1.0[0], 1.0]);
            let e2 = QuotientPoint(w.0.iter().map(|c| c / g.norm_sq(&w).sqrt()).collect());
            assert_relative_eq!(gs.oneill_curvature_check(&q, &e1, &e2), closed, max_relative = 1e-5);
        }
    }
}

/// `F(x) = ∫_1^x dt / sqrt(t⁴ − 1)` by composite Simpson after `t = 1 + s²`.
fn elliptic_f(x: f64) -> f64 {
    let smax = (x - 1.0).sqrt();
    let integrand = |s: f64| {
        if s == 0.0 {
            // 2s / sqrt((1+s²)^4 − 1) → 2 / sqrt(4) as s → 0
            return 1.0;
        }
        let t = 1.0 + s * s;
        2.0 * s / (t.powi(4) - 1.0).sqrt()
    };
    let steps = 20_000;
    let h = smax / steps as f64;
    let mut sum = integrand(0.0) + integrand(smax);
    for l in 1..steps {
        sum += integrand(l as f64 * h) * if l % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

#[test]
fn shifted_catenoid_matches_elliptic_integral_and_radial_solve() {
    let (rho, neck, outer) = (2.0, 1.5, 12.0);
    let cat = ShiftedCatenoid::new(3, rho, neck).unwrap();
    for tau in [2.5, 4.0, 12.0] {
        let oracle = neck * (elliptic_f(tau / neck) - elliptic_f(rho / neck));
        assert_relative_eq!(cat.value(tau).unwrap(), oracle, max_relative = 1e-8);
    }
    let top = cat.value(outer).unwrap();
    let rep = radial_solve(3, 1.0, 1.0, rho, outer, 0.0, top, 801, Spacing::Quadratic, &SolverConfig::default())
        .unwrap();
    let grid = &rep.field.grid;
    let err = (0..grid.ns)
        .map(|i| (rep.field.at(i, 0) - neck * (elliptic_f(grid.node_radius(i, 0) / neck) - elliptic_f(rho / neck))).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-4, "radial solve vs elliptic integral: {err}");
}

/// The discrete reduced operator applied to a smooth non-solution agrees with the
/// ambient operator of its lift, computed by finite differences in `R^{n+1}`.
#[test]
fn reduced_operator_matches_ambient_operator_of_the_lift() {
    type Profile = fn([f64; 2]) -> f64;
    let cases: [(Reduction, usize, Profile); 2] = [
        (Reduction::Polar2d, 2, |x| 0.3 * x[0].sin() + 0.2 * x[0] * x[1] + 0.1 * x[1] * x[1]),
        (Reduction::Axisym, 3, |x| 0.1 * x[0] * x[0] + 0.3 * x[1].cos() + 0.05 * x[0] * x[0] * x[1]),
    ];
    for (reduction, n, profile) in cases {
        let gs = GroupSpec::standard(1.0, 1.0, n).unwrap();
        let mut errs = Vec::new();
        for nodes in [(65, 64), (129, 128)] {
            let spec = match reduction {
                Reduction::Polar2d => GridSpec::polar2d(gs, [0.0; 2], 1.0, 4.0, nodes, Spacing::Uniform),
                _ => GridSpec::axisym(gs, 1.0, 4.0, (nodes.0, nodes.1 + 1), Spacing::Uniform),
            };
            let grid = spec.build().unwrap();
            let op = ReducedOperator::new(&grid);
            let values: Vec<f64> =
                (0..grid.len()).map(|idx| profile(grid.node_point(idx % grid.ns, idx / grid.ns))).collect();
            let discrete = op.pointwise_residual(&values);
            let lifted = |p: &[f64]| {
                let q = gs.projection(&AmbientPoint(p.to_vec()));
                Some(profile(reduction_coordinates(&gs, reduction, &q)))
            };
            let mut worst: f64 = 0.0;
            // sample nodes at the same physical points on both grids
            for (fi, fk) in [(0.25, 0.125), (0.5, 0.25), (0.5, 0.75), (0.75, 0.5)] {
                let i = (fi * (grid.ns - 1) as f64) as usize;
                let k = (fk * if grid.periodic() { grid.nt } else { grid.nt - 1 } as f64) as usize;
                let x = grid.node_point(i, k);
                let q = match reduction {
                    Reduction::Polar2d => QuotientPoint(vec![x[0], x[1]]),
                    _ => QuotientPoint(vec![x[0], 0.0, x[1]]),
                };
                let p = gs.embed(&q);
                let ambient = ambient_mse(&lifted, &p.0, 1e-3).unwrap();
                worst = worst.max((discrete[grid.index(i, k)] - ambient).abs());
            }
            errs.push(worst);
        }
        assert!(errs[1] < 5e-3, "{reduction}: {errs:?}");
        assert!(errs[0] / errs[1] > 3.2, "{reduction}: not second order {errs:?}");
    }
}
