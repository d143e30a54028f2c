//! Bi-isometries: truncated operator models, characteristic functions,
//! BCL triples and lattice examples.

// `!(x <= t)` is deliberate: NaN must fail the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bcl;
pub mod cli;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod model;
pub mod report;
pub mod symbol;
pub mod window;
pub mod wold;

pub use error::{Error, Result};
