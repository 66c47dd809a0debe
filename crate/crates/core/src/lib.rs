//! Design and simulation of impedance-matched SNAIL parametric amplifiers.
//!
//! * [`snail`]: flux-tunable SNAIL inductance and nonlinear coefficients.
//! * [`chebyshev`]: equal-ripple gain target and prototype coefficients.
//! * [`synthesis`]: two-pole admittance-inverter matching network.
//! * [`ac`]: reflection gain of the lumped ladder, band extraction and
//!   negative-resistance calibration.
//! * [`export`]: CSV curves.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ac;
pub mod chebyshev;
pub mod export;
pub mod netlist;
pub mod snail;
pub mod synthesis;

pub use netlist::{Element, Netlist};
