//! Lifting quotient profiles to `R^(n+1)` and checking the minimal surface equation there.
//!
//! `cargo run --release --example ambient_lift`

use helix_mse::closed_forms::CatenoidProfile;
use helix_mse::geometry::GroupSpec;
use helix_mse::io::{lift_and_verify, random_ambient_samples};
use helix_mse::solver::{solve_dirichlet, GridSpec, SolverConfig, Spacing};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> helix_mse::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let gs = GroupSpec::standard(1.0, 1.0, 2)?;
    let samples = random_ambient_samples(&gs, &mut rng, 100, (1.5, 5.0), 5.0);

    let cat = CatenoidProfile::new(2, 1.0)?;
    let rep = lift_and_verify(&gs, &cat, &samples, &mut rng)?;
    println!(
        "analytic catenoid: max |M(u)| {:.2e}, gradient relation {:.2e}, invariance {:.2e}",
        rep.max_mse_residual, rep.max_gradient_error, rep.max_invariance_error
    );

    let grid = GridSpec::polar2d(gs, [0.0; 2], 1.0, 6.0, (128, 64), Spacing::Quadratic).build()?;
    let solved = solve_dirichlet(&grid, 0.0, 6f64.acosh(), &SolverConfig::default(), None)?;
    let rep = lift_and_verify(&gs, &solved.field, &samples, &mut rng)?;
    println!(
        "solved field ({} samples, {} skipped): gradient relation {:.2e}, invariance {:.2e}",
        rep.samples.len(),
        rep.skipped,
        rep.max_gradient_error,
        rep.max_invariance_error
    );
    // the bilinear interpolant has kinks on cell edges, so this is a grid-scale quantity
    println!("  operator residual of the interpolant: mean {:.2e}", rep.mean_mse_residual);
    println!("{}", rep.fd_rule);
    Ok(())
}
