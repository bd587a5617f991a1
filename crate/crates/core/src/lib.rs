//! Planning toolkit for indoor RF wireless power transfer over radio stripes.
//!
//! A radio stripe is a cable with antenna elements embedded at a fixed
//! spacing, deployed along the ceiling of a venue. Energy demand is
//! concentrated in known hotspots. This crate plans such systems in two
//! stages:
//!
//! 1. [`clustering`] assigns hotspots to stripes and places cluster heads so
//!    that the worst penalized path loss is minimized.
//! 2. [`deployment`] optimizes the element positions of each stripe for its
//!    cluster, either free-form (signomial programming or successive convex
//!    approximation) or shape-constrained (regular polygon, straight line),
//!    plus two fixed baselines for benchmarking.
//!
//! [`channel`] provides the near-field line-of-sight channel model used
//! throughout, [`conic`] the LP/SOCP/GP solver kernel the optimizers run on,
//! and [`beamforming`] the precoders and the Monte Carlo evaluation of the
//! minimum received power.

pub mod beamforming;
pub mod channel;
pub mod clustering;
pub mod conic;
pub mod deployment;
pub mod scenario;

pub use scenario::{Hotspot, Point3, Scenario};
