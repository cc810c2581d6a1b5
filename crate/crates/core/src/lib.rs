// `!(x > 0.0)` is used deliberately so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod eig2d;
pub mod error;
pub mod nodal;
pub mod poly;
pub mod quad;
pub mod report;
pub mod sloshing;
pub mod specfun;
pub mod string1d;

pub use error::{Error, Result};
