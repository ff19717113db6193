// Range checks are written as `!(x > 0.0)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod error;
pub mod exec;
pub mod math;
pub mod quadrature;
pub mod roots;
pub mod stochastic;

pub use error::{Error, Result};
