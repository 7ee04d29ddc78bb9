#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod field;
pub mod geometry;
pub mod harness;
pub mod lorentz;
pub mod maximal;
pub mod numeric;
pub(crate) mod polar;
pub mod potential;
pub mod singular;
pub mod weights;

pub use error::{Error, Result};
