//! Elastic digital-analog radio-over-fiber simulation.
//!
//! A wireless OFDM waveform is split by a cascade of quantisation stages into
//! digital segments and an analog residual, carried over a simulated optical
//! back-to-back coherent link and reassembled at the receiver.

// NaN-rejecting range checks are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod dsp;
pub mod eda;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod ofdm;
pub mod plan;
pub mod quantizer;
pub mod rng;

pub use error::{Error, Result};
