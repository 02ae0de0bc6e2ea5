//! Symbol timing synchronization and energy detection for ambient
//! backscatter links.
//!
//! The tag prefixes its payload with an alternating (0,1) pilot. A receiver
//! whose sampling clock is early or late sees each pilot "1" window split
//! into two segments of different variance; [`estimator::estimate_sto`]
//! locates the split by a maximum-likelihood scan and turns it into a signed
//! offset, which [`detector`] removes before energy detection. [`harness`]
//! runs seeded Monte Carlo experiments over all of it.

pub mod cli;
pub mod detector;
pub mod error;
pub mod estimator;
pub mod frame;
pub mod harness;
pub mod rng;
pub mod signal_model;

pub use error::{Error, Result};
