//! Transition kernels, path sampling and identity checks for the q-Meixner
//! family of quadratic-harness Markov processes.
//!
//! Kernels come from the three-term recurrence of the process polynomials:
//! the recurrence defines a Jacobi operator whose Gauss quadrature is the
//! discrete approximation used everywhere for sampling and verification.
//! Closed forms for the special cases live in [`kernels`].

// `!(a < b)` is used deliberately so that NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod battery;
pub mod binomial;
pub mod cli;
pub mod error;
pub mod kernels;
pub mod markov;
pub mod orthopoly;
pub mod qcalc;
pub mod quadrature;
pub mod residual;
pub mod tolerances;
mod tridiag;

pub use error::{Error, Result};
pub use qcalc::{KernelCoordinates, ProcessParams, RecurrenceCoeffs};
pub use quadrature::{DiscreteMeasure, JacobiOperator};
pub use residual::Residual;
