//! Scaled compound-Poisson processes `X_t(x) = V(tx)/√t` and simulation
//! harnesses for their functional limit theorem and its almost sure
//! (logarithmic-average and integral-average) versions.
//!
//! The crate is organized bottom-up:
//!
//! * [`model`]: the centered process family and its closed forms.
//! * [`simulate`]: exact jump-record realizations and path evaluation.
//! * [`conditions`]: validators for schedule, time-change and weight hypotheses.
//! * [`measures`]: weighted empirical measures, target laws, weighted KS.
//! * [`theorems`]: one harness per limit statement, producing [`theorems::TheoremReport`]s.
//! * [`cli`]: config parsing and experiment dispatch for the batch binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conditions;
mod error;
pub mod measures;
pub mod model;
pub mod seed;
pub mod simulate;
pub mod theorems;

pub use error::{Error, Result};
