//! Generalized Mittag-Leffler functions and their coherent states.

// Negated comparisons are how NaN inputs are rejected; tabulated constants keep all their digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod coherent;
pub mod continuum;
pub mod error;
pub mod kcore;
pub mod measure;
pub mod mlfunc;
pub mod output;
pub mod quadrature;
pub mod special;
pub mod thermal;

pub use error::{Error, Result};
pub use kcore::MLParams;
pub use mlfunc::{EvalConfig, SeriesResult};
