#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod cli;
pub mod closed_forms;
pub mod drivers;
pub mod error;
pub mod geometry;
pub mod io;
pub mod solver;

pub use error::{Error, Result};
