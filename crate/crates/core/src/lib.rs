//! Channel, link and sensing analysis for the upper mid-band (roughly 7 to 24 GHz).
//!
//! The library is organised by capability:
//!
//! * [`params`] holds the channel-parameter registry, carrier bands, material
//!   penetration tables and the path-loss exponent fit.
//! * [`propagation`] computes path loss and excess losses (rain, foliage, penetration).
//! * [`link`] has the link-budget calculators.
//! * [`coverage`] runs the Monte Carlo rate-coverage study.
//! * [`sensing`] evaluates delay Cramér-Rao bounds for single and multi-band plans.
//! * [`agility`] selects bands and simulates hopping under blockage.
//! * [`cli`] drives all of the above from config files.

// `!(x > 0.0)` style guards are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agility;
pub mod cli;
pub mod config;
pub mod coverage;
pub mod error;
pub mod link;
pub mod params;
pub mod propagation;
pub mod sensing;

pub use error::{Error, Result};
