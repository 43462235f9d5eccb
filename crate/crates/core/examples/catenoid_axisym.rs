//! Axially symmetric solve reproducing the n-catenoid, with the error on two grids.
//!
//! `cargo run --release --example catenoid_axisym`

use helix_mse::closed_forms::CatenoidProfile;
use helix_mse::geometry::GroupSpec;
use helix_mse::solver::{solve_dirichlet, GridSpec, SolverConfig, Spacing};

fn main() -> helix_mse::Result<()> {
    let (n, rho, outer) = (3, 1.0, 20.0);
    let gs = GroupSpec::standard(1.0, 1.0, n)?;
    let cat = CatenoidProfile::new(n, rho)?;
    let top = cat.value(outer)?;
    let mut previous = None;
    for nodes in [(64, 32), (128, 64)] {
        let grid = GridSpec::axisym(gs, rho, outer, nodes, Spacing::Quadratic).build()?;
        let rep = solve_dirichlet(&grid, 0.0, top, &SolverConfig::default(), None)?;
        let err = (0..grid.nt)
            .flat_map(|k| (0..grid.ns).map(move |i| (i, k)))
            .map(|(i, k)| (rep.field.at(i, k) - cat.value(grid.node_radius(i, k)).unwrap()).abs())
            .fold(0.0, f64::max);
        let ratio = previous.map(|p: f64| p / err);
        println!(
            "{}x{}: max error {err:.3e}, Newton steps {}, ratio {ratio:?}",
            nodes.0, nodes.1, rep.newton_iterations
        );
        previous = Some(err);
    }
    println!("height at infinity h(3, 1) = {:.6}", cat.height_at_infinity()?);
    Ok(())
}
