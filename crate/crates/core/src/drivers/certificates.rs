//! Machine-checkable barrier certificates.

use serde::Serialize;

use crate::closed_forms::BarrierSpec;
use crate::error::Result;
use crate::geometry::GroupSpec;
use crate::solver::{GridField, GridSpec, Reduction, ReducedOperator, Spacing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    SupersolutionSign,
    SubsolutionSign,
    Sandwich,
    Comparison,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// Largest violation of the certified inequality (non-positive when it holds strictly).
    pub max_violation: f64,
    pub grid_scale: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

impl Certificate {
    fn new(kind: CertificateKind, max_violation: f64, grid_scale: f64, tolerance: f64, note: String) -> Self {
        Self { kind, max_violation, grid_scale, tolerance, pass: max_violation <= tolerance, note }
    }
}

/// Certifies `𝔐(ψ∘d) ≤ 0` on the collar `{0 < d < t0}` around a ball of radius `r`,
/// with `d = |q| − r`, by evaluating the discrete pointwise residual on a collar grid.
/// Nodes with `d < 10⁻³ t0` are excluded; the tolerance is `10 h²` with `h` the logical
/// spacing.
pub fn collar_supersolution_certificate(
    group: &GroupSpec,
    barrier: &BarrierSpec,
    reduction: Reduction,
    nodes: (usize, usize),
) -> Result<Certificate> {
    let spec = match reduction {
        Reduction::Radial => GridSpec::radial(*group, barrier.r, barrier.r + barrier.t0, nodes.0, Spacing::Quadratic),
        Reduction::Axisym => {
            GridSpec::axisym(*group, barrier.r, barrier.r + barrier.t0, nodes, Spacing::Quadratic)
        }
        Reduction::Polar2d => {
            GridSpec::polar2d(*group, [0.0; 2], barrier.r, barrier.r + barrier.t0, nodes, Spacing::Quadratic)
        }
    };
    let grid = spec.build()?;
    let field = GridField::from_fn(&grid, |i, k| {
        let d = (grid.node_radius(i, k) - barrier.r).max(0.0);
        barrier.psi(d)
    });
    let op = ReducedOperator::new(&grid);
    let res = op.pointwise_residual(&field.values);
    let cutoff = 1e-3 * barrier.t0;
    let mut worst = f64::NEG_INFINITY;
    let mut excluded = 0;
    for k in 0..grid.nt {
        for i in 1..grid.ns - 1 {
            if grid.node_radius(i, k) - barrier.r < cutoff {
                excluded += 1;
                continue;
            }
            worst = worst.max(res[grid.index(i, k)]);
        }
    }
    let h = grid.ds;
    Ok(Certificate::new(
        CertificateKind::SupersolutionSign,
        worst,
        h,
        10.0 * h * h,
        format!(
            "collar [{}, {}] with b = {}, {excluded} nodes with d < {cutoff:e} excluded",
            barrier.r,
            barrier.r + barrier.t0,
            barrier.b
        ),
    ))
}

/// Checks `lower ≤ field ≤ upper` at every node with the given slack. The bounds receive
/// the physical node point, whose Euclidean norm is `|q|` in every reduction.
pub fn sandwich_certificate(
    field: &GridField,
    lower: impl Fn([f64; 2]) -> f64,
    upper: impl Fn([f64; 2]) -> f64,
    slack: f64,
    note: &str,
) -> Certificate {
    let g = &field.grid;
    let mut worst = f64::NEG_INFINITY;
    for k in 0..g.nt {
        for i in 0..g.ns {
            let x = g.node_point(i, k);
            let v = field.at(i, k);
            worst = worst.max(lower(x) - v).max(v - upper(x));
        }
    }
    Certificate::new(CertificateKind::Sandwich, worst, g.ds, slack, note.to_string())
}

/// Checks `below ≤ above + slack` nodewise for two fields on the same grid.
pub fn comparison_certificate(below: &GridField, above: &GridField, slack: f64) -> Certificate {
    let worst = below
        .values
        .iter()
        .zip(&above.values)
        .map(|(a, b)| a - b)
        .fold(f64::NEG_INFINITY, f64::max);
    Certificate::new(
        CertificateKind::Comparison,
        worst,
        below.grid.ds,
        slack,
        "nodewise ordering of solutions with ordered data".into(),
    )
}
