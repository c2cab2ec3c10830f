//! Renormalized energy 𝒲_N of point configurations on the circle and the flat
//! square torus, its large-N expectation for stationary point processes, Monte
//! Carlo estimation against the exact circular-ensemble cumulants, and the
//! log-weighted functional minimized by the ball.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod specfun;
pub mod quadrature;

pub use error::{Error, Result};
pub mod eisenstein;
pub mod energy;
pub mod pointfile;
pub mod expectations;
pub mod samplers;
pub mod montecarlo;
pub mod minimizer;
