//! Height-prescribed solution trapped between the Perron subsolution and the collar
//! barrier, and the rejection of a height above the cap.
//!
//! `cargo run --release --example perron_height`

use helix_mse::drivers::{height_prescribed_solution, Problem, RungSpacing};
use helix_mse::geometry::{DomainSpec, GroupSpec};
use helix_mse::solver::{Reduction, SolverConfig};
use helix_mse::Error;

fn main() -> helix_mse::Result<()> {
    let mut problem = Problem {
        group: GroupSpec::standard(0.25, 1.0, 3)?,
        domain: DomainSpec::origin_ball(1.0)?,
        reduction: Reduction::Radial,
        nodes: (4001, 1),
        spacing: RungSpacing::FirstCell(1e-4),
    };
    let rep = height_prescribed_solution(0.3, &problem, &[10.0, 50.0, 100.0], &SolverConfig::default())?;
    println!("c = 0.3, cap L = {:.5}, subsolution radius α = {:.3}", rep.cap, rep.alpha);
    for r in &rep.rungs {
        println!(
            "  R = {:>5}: height near R = {:.6}, sandwich violation {:.2e} (pass {})",
            r.outer_radius, r.height_near_outer, r.sandwich.max_violation, r.sandwich.pass
        );
    }

    problem.group = GroupSpec::standard(1.0, 1.0, 3)?;
    match height_prescribed_solution(0.3, &problem, &[10.0], &SolverConfig::default()) {
        Err(Error::HeightAboveCap { c, cap }) => println!("λ = 1: c = {c} rejected, cap {cap:.5}"),
        other => println!("unexpected: {:?}", other.map(|r| r.cap)),
    }
    Ok(())
}
