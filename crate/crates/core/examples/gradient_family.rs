//! Gradient-constrained exhaustion family over the exterior of the unit ball, for
//! `n = 2` (heights grow like `log R`) and `n = 3` (heights stay below `h(3, 1)`).
//!
//! `cargo run --release --example gradient_family`

use helix_mse::drivers::{gradient_constrained_family, gradient_decay_check, FamilyConfig, Problem, RungSpacing};
use helix_mse::geometry::{DomainSpec, GroupSpec};
use helix_mse::solver::Reduction;

fn main() -> helix_mse::Result<()> {
    for n in [2, 3] {
        let problem = Problem {
            group: GroupSpec::standard(1.0, 1.0, n)?,
            domain: DomainSpec::origin_ball(1.0)?,
            reduction: Reduction::Radial,
            nodes: (2001, 1),
            spacing: RungSpacing::FirstCell(1e-4),
        };
        let fam = gradient_constrained_family(1.0, &problem, &[10.0, 20.0, 50.0, 100.0], &FamilyConfig::default())?;
        println!("n = {n}: {:?}", fam.dichotomy);
        for r in &fam.rungs {
            println!(
                "  R = {:>5}: t = {:.6}, |∇w| on ∂Ω = {:.9}, c = {:?}",
                r.outer_radius, r.t, r.boundary_gradient, r.flux_parameter
            );
        }
        if let Some(fit) = fam.log_fit {
            println!("  height ≈ {:.4} log R + {:.4}", fit.alpha, fit.beta);
        }
        let decay = gradient_decay_check(&fam)?;
        println!("  outer-third gradient decays like R^{:.3}", decay.exponent);
    }
    Ok(())
}
