//! Gradient-constrained family over the off-axis disc of figure 1 (the projection of a
//! helicoidal tube), written out with a run manifest.
//!
//! `cargo run --release --example figure1_family -- [output-dir]`

use std::path::PathBuf;

use helix_mse::drivers::{gradient_constrained_family, FamilyConfig, Problem, RungSpacing};
use helix_mse::geometry::{DomainSpec, GroupSpec};
use helix_mse::io::{export_csv, RunManifest};
use helix_mse::solver::Reduction;

fn main() -> helix_mse::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let problem = Problem {
        group: GroupSpec::standard(1.0, 1.0, 2)?,
        domain: DomainSpec::figure1(),
        reduction: Reduction::Polar2d,
        nodes: (41, 32),
        spacing: RungSpacing::FirstCell(1e-2),
    };
    let cfg = FamilyConfig { bisection_tol: 1e-6, ..Default::default() };
    let ladder = [10.0, 14.0, 20.0];
    let fam = gradient_constrained_family(1.0, &problem, &ladder, &cfg)?;
    for (r, sol) in fam.rungs.iter().zip(&fam.solutions) {
        println!(
            "R = {:>4}: t = {:.6}, min w = {:.2e}, sup |∇w| = {:.6} (on obstacle: {})",
            r.outer_radius,
            r.t,
            sol.field.min(),
            r.sup_gradient,
            r.sup_on_inner_boundary
        );
    }
    let csv = dir.join("figure1_family.csv");
    export_csv(&fam.solutions.last().expect("at least one rung").field, &csv)?;
    let mut manifest = RunManifest::new(vec!["figure1_family".into()]);
    manifest.group = Some(problem.group);
    manifest.domain = Some("figure1".into());
    manifest.grids.push(format!("{:?} on radii {ladder:?}", problem.nodes));
    manifest.tolerances.insert("bisection_tol".into(), cfg.bisection_tol);
    manifest.add_artifact(&csv)?;
    let path = dir.join("figure1_family.manifest.toml");
    manifest.write(&path)?;
    println!("{}", manifest.render()?);
    println!("manifest at {}", path.display());
    Ok(())
}
