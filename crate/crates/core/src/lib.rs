//! Discrete-time autoscaling core.
//!
//! Everything here is pure computation over owned values: synthetic workload
//! traces, pluggable demand forecasters, the online cold-start estimator and
//! horizon derivation, the reactive and model-predictive scaling policies, the
//! step simulator, and the statistics used to compare runs.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and experiment orchestration live in the `adaptscale` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod engine;
pub mod error;
pub mod estimator;
pub mod forecast;
pub mod policy;
pub mod rng;
pub mod stats;
pub mod trace;

pub use error::{Error, Result};
