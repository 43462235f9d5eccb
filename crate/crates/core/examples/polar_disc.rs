//! Two-dimensional quotient solve around a disc, exported as CSV and OBJ.
//!
//! `cargo run --release --example polar_disc -- [output-dir]`

use std::path::PathBuf;

use helix_mse::geometry::GroupSpec;
use helix_mse::io::{export_csv, export_obj, import_csv};
use helix_mse::solver::{solve_dirichlet, GridSpec, SolverConfig, Spacing};

fn main() -> helix_mse::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let gs = GroupSpec::standard(1.0, 1.0, 2)?;
    let outer = 10.0_f64;
    let grid = GridSpec::polar2d(gs, [0.0; 2], 1.0, outer, (128, 64), Spacing::Quadratic).build()?;
    let rep = solve_dirichlet(&grid, 0.0, outer.acosh(), &SolverConfig::default(), None)?;
    let err = (0..grid.nt)
        .flat_map(|k| (0..grid.ns).map(move |i| (i, k)))
        .map(|(i, k)| (rep.field.at(i, k) - grid.node_radius(i, k).acosh()).abs())
        .fold(0.0, f64::max);
    println!("max |v - arccosh|q|| = {err:.3e} after {} Newton steps", rep.newton_iterations);

    let csv = dir.join("polar_disc.csv");
    let obj = dir.join("polar_disc.obj");
    export_csv(&rep.field, &csv)?;
    export_obj(&rep.field, &obj)?;
    let back = import_csv(&csv)?;
    let exact = back.iter().zip(&rep.field.values).all(|(r, v)| r.value.to_bits() == v.to_bits());
    println!("wrote {} and {}; CSV round trip bitwise: {exact}", csv.display(), obj.display());
    Ok(())
}
