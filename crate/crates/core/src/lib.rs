#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bulk;
pub mod degradation;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod fem;
pub mod problems;
pub mod schemes;
pub mod subsolvers;
pub mod surface;

pub use error::{Error, Result};
