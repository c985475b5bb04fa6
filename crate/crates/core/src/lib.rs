//! Dissipative Maxwell dynamics on a qubit register.
//!
//! A 1D transverse field in a Lorentz/Drude medium is written as a lossless
//! Hermitian generator plus a diagonal damping term. Each Trotter step applies
//! the damping factor through a one-ancilla dilation (two-level rotations or a
//! linear combination of two diagonal unitaries), then the lossless step, then
//! post-selects the ancilla.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod cli;
pub mod dilation_kraus;
pub mod dilation_lcu;
pub mod error;
pub mod evolution;
pub mod gates;
pub mod kraus;
pub mod linalg;
pub mod medium;
pub mod operators;
pub mod synthesis;

pub use error::{Error, Result};
