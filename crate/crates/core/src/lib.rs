//! Cramér-Rao bounds, grid-search estimators and transmit covariance design
//! for a bistatic ISAC link whose base station mixes random Gaussian
//! communication symbols with deterministic sensing sequences.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod array;
pub mod beamform;
pub mod channel;
pub mod error;
pub mod estimators;
pub mod fim;
pub mod harness;
pub mod linalg;
pub mod rng;

pub use error::{IsacError, Result};
