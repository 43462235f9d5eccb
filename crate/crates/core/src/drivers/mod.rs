//! Existence constructions at desk scale: the gradient-constrained exhaustion family and
//! the height-prescribed solution, with barrier certificates.

pub mod certificates;
mod family;
mod perron;

pub use certificates::{
    collar_supersolution_certificate, comparison_certificate, sandwich_certificate, Certificate,
    CertificateKind,
};
pub use family::{
    gradient_constrained_family, gradient_decay_check, DecayReport, Dichotomy, FamilyConfig, FamilyReport, LogFit,
    Rung,
};
pub use perron::{height_prescribed_solution, PerronReport, PerronRung};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, GroupSpec};
use crate::solver::grid::Grid;
use crate::solver::{GridSpec, Reduction, Spacing};

/// Node distribution along `s` for each truncation radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum RungSpacing {
    Fixed(Spacing),
    /// Geometric spacing with the given physical width of the first cell.
    FirstCell(f64),
}

/// A group, an obstacle and a discretisation recipe for the truncations `U ∩ 𝔅_R`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Problem {
    pub group: GroupSpec,
    #[serde(skip)]
    pub domain: DomainSpec,
    pub reduction: Reduction,
    pub nodes: (usize, usize),
    pub spacing: RungSpacing,
}

impl Problem {
    pub fn grid_for(&self, outer_radius: f64) -> Result<Grid> {
        let (center, radius) = self
            .domain
            .as_ball()
            .ok_or_else(|| Error::InvalidArgument("the solver handles ball obstacles only".into()))?;
        let reach = center[0].hypot(center[1]) + radius;
        let spacing = match self.spacing {
            RungSpacing::Fixed(sp) => sp,
            RungSpacing::FirstCell(w) => {
                Spacing::geometric_with_first_cell(w / (outer_radius - reach), self.nodes.0 - 1)
            }
        };
        let spec = match self.reduction {
            Reduction::Radial => GridSpec::radial(self.group, radius, outer_radius, self.nodes.0, spacing),
            Reduction::Axisym => GridSpec::axisym(self.group, radius, outer_radius, self.nodes, spacing),
            Reduction::Polar2d => GridSpec::polar2d(self.group, center, radius, outer_radius, self.nodes, spacing),
        };
        if self.reduction != Reduction::Polar2d && center != [0.0; 2] {
            return Err(Error::InvalidArgument(format!("{} reduction needs an origin-centred ball", self.reduction)));
        }
        spec.build()
    }
}
