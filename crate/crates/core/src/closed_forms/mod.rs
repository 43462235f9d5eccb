//! Closed-form solutions and barriers: the half-catenoid, its height at infinity, the
//! barrier constants `C`, `ς`, `L`, the collar barrier and the Perron subsolution.

mod barriers;
mod catenoid;
pub mod quadrature;

pub use barriers::{
    barrier_constant_c, height_cap_l, solve_varsigma, BarrierSpec, CollarValue, PerronSubsolution,
    VarsigmaSolution,
};
pub use catenoid::{
    catenoid_height, catenoid_height_cross_check, CatenoidProfile, RadialValue, ShiftedCatenoid,
};

/// A gradient magnitude that may be infinite. Infinite slopes are reported with
/// `saturated = true` and `value = f64::MAX`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slope {
    pub value: f64,
    pub saturated: bool,
}

impl Slope {
    pub fn from_value(v: f64) -> Self {
        if v.is_finite() {
            Self { value: v, saturated: false }
        } else {
            Self::infinite()
        }
    }

    pub fn infinite() -> Self {
        Self { value: f64::MAX, saturated: true }
    }
}
