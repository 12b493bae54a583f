//! Downlink cell association and load balancing for networks that mix
//! millimeter-wave (mmW) and microwave (uW) base stations.
//!
//! The core is a one-to-many matching engine with minimum quotas
//! ([`matching`]), wrapped into association policies ([`policy`]) and driven
//! by a seeded Monte Carlo harness ([`experiment`], [`figures`]).

// `!(x >= 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod figures;
pub mod los;
pub mod matching;
pub mod metrics;
pub mod policy;
mod rng;
pub mod scenario;

pub use error::{Error, Result};
