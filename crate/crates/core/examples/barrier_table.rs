//! Barrier constants `C`, `ς`, `t0`, `L` and the collar profile `ψ`.
//!
//! `cargo run --example barrier_table`

use helix_mse::closed_forms::{catenoid_height, BarrierSpec};

fn main() -> helix_mse::Result<()> {
    println!("{:>4} {:>2} {:>6} {:>10} {:>10} {:>10} {:>10}", "r", "n", "λ", "C", "ς", "t0", "L");
    for (r, n, lambda) in [(1.0, 3, 1.0), (2.0, 3, 1.0), (1.0, 3, 0.25), (1.0, 4, 1.0), (3.0, 5, 2.0)] {
        let b = BarrierSpec::new(r, n, lambda, 1.0, None)?;
        println!("{r:>4} {n:>2} {lambda:>6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}", b.c, b.varsigma, b.t0, b.l);
    }
    println!("λ = 0 caps equal the catenoid heights: h(3, 1) = {:.6}", catenoid_height(3, 1.0)?);

    let b = BarrierSpec::new(2.0, 3, 1.0, 1.0, None)?;
    println!("\ncollar over d = |q| - r for r = 2:\nd,W,dW");
    for step in 0..=8 {
        let d = 0.05 * step as f64;
        let w = b.collar_barrier(d)?;
        let slope = if w.slope.saturated { "inf".to_string() } else { format!("{:.6}", w.slope.value) };
        println!("{d:.2},{:.6},{slope}", w.value);
    }
    Ok(())
}
