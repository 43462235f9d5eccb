//! Orbits, the quotient metric, horizontal lifts and the drift field of a helicoidal group.
//!
//! `cargo run --example geometry_tour`

use helix_mse::geometry::{AmbientPoint, GroupSpec, QuotientPoint};

fn main() -> helix_mse::Result<()> {
    let gs = GroupSpec::standard(1.0, 1.0, 3)?;
    let p = AmbientPoint(vec![1.0, 0.5, -0.25, 0.7]);
    let moved = gs.group_action(&p, 0.9);
    println!("φ_0.9(p)        = {:?}", moved.0);
    println!("π(p), π(φ_t p)  = {:?}, {:?}", gs.projection(&p).0, gs.projection(&moved).0);

    let curv = gs.orbit_mean_curvature(&p);
    println!("|H_G|(p) = {:.6}, A = {:.6}", curv.magnitude, curv.a_coeff);
    let (sup, at) = gs.sup_orbit_curvature();
    println!("sup |H_G| = {sup:.6} at σ = {at:?}");

    let q = QuotientPoint(vec![1.0, 0.0, 0.3]);
    let g = gs.quotient_metric(&q);
    println!("metric at q = {:?}:\n{:.6}", q.0, g.tensor);
    let eig = g.tensor.clone().symmetric_eigen().eigenvalues;
    println!("eigenvalues {eig:.6}  (angular one = {:.6})", g.angular_eigenvalue());

    let w = QuotientPoint(vec![0.2, -1.0, 0.4]);
    let lift = gs.horizontal_lift(&q, &w);
    let euclid = lift.0.iter().map(|x| x * x).sum::<f64>();
    println!("|lift w|² = {euclid:.12}, g(w, w) = {:.12}", g.norm_sq(&w));
    println!("drift J(q) = {:?}", gs.drift_field(&q).0);

    let q2 = QuotientPoint(vec![0.8, 0.0]);
    let gs2 = GroupSpec::standard(1.0, 1.0, 2)?;
    let m = gs2.quotient_metric(&q2);
    let e1 = QuotientPoint(vec![1.0 / m.tensor[(0, 0)].sqrt(), 0.0]);
    let e2 = QuotientPoint(vec![0.0, 1.0 / m.tensor[(1, 1)].sqrt()]);
    let sigma2: f64 = 0.64;
    println!(
        "n = 2 sectional curvature at σ = 0.8: O'Neill {:.6}, closed form 3λ²a²/(λ²σ²+a²)² = {:.6}",
        gs2.oneill_curvature_check(&q2, &e1, &e2),
        3.0 / (sigma2 + 1.0).powi(2)
    );
    Ok(())
}
