//! Confluent SUSY (Darboux) transformations of one-dimensional Schrödinger
//! problems built on a recursive representation of the transformation
//! Wronskian, with closed-form Pöschl-Teller oracles and a finite-difference
//! spectral check.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod jordan_chain;
pub mod poschl_teller;
pub mod schrodinger;
pub mod spectral;
pub mod susy_transform;
pub mod wronskian;

pub use error::{Result, SusyError};
