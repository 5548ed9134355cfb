//! Coverage, inverse-SINR moments and rate profiles of single-tier cellular
//! networks where base stations operate in full duplex while users stay half
//! duplex and transmit with fractional power control.
//!
//! Base stations form a Poisson point process; each cell has one downlink and
//! one uplink user dropped uniformly in a disk around its BS. The crate pairs
//! a drop-based simulator ([`montecarlo`]) with closed-form and quadrature
//! expressions ([`analytic`]), and [`harness`] drives both to regenerate
//! curves and compare them with reference data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod montecarlo;
pub mod radio;
pub mod scenario;

pub use error::{Error, Result};
pub use geometry::{NetworkRealization, Point};
pub use montecarlo::{CoverageCurve, McConfig, MomentReport, RateProfile};
pub use radio::{Duplex, Link, PathLossModel};
pub use scenario::{PowerUnit, PowerUnitConvention, ScenarioBuilder, ScenarioParams};
