//! Exact coherent states of Calogero-Sutherland-type oscillators with
//! time-dependent mass, frequency and driving force, together with the
//! numerics that verify them.
//!
//! The crate is layered: [`schedule`] and [`classical`] solve the classical
//! oscillator, [`models`] describes the interacting systems,
//! [`wavefunctions`] builds stationary and coherent amplitudes, and
//! [`verification`] checks them numerically. [`cli`] drives everything from
//! scenario files.

pub mod classical;
pub mod cli;
pub mod error;
pub mod models;
pub mod schedule;
pub mod util;
pub mod verification;
pub mod wavefunctions;

pub use error::{Error, Result};
