//! Characteristic-function inequalities for m-divisible and infinitely
//! divisible laws, and a bootstrap test of infinite divisibility built on them.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cf_core;
pub mod cli;
pub mod error;
pub mod idtest;
pub mod refdist;
pub mod rng;

pub use error::{Error, Result};
