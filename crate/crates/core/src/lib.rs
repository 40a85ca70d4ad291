//! Design, simulation and calibration toolkit for tendon-driven notched-tube
//! steerable joints.
//!
//! The crate is split by concern:
//!
//! * [`geometry`] holds the tube and notch description and the cross-section
//!   quantities (wedge angle and neutral-axis offset) of the notched section.
//! * [`kinematics`] evaluates the stroke/deflection model, inverts it and
//!   propagates the bent joint to a planar tip pose.
//! * [`calibration`] ingests cyclic bench trials, segments cycles, removes
//!   tendon-slack deadband and fits the tendon modulus by RMSE minimization.
//! * [`toolpath`] compiles a notch pattern into an ordered multi-pass laser
//!   plan and renders the unrolled layout.
//! * [`cli`] is the command-line front end used by the `notchkin` binary.
//!
//! Internal units are millimetres, newtons and radians; moduli are in MPa
//! (N/mm²). Degrees only appear at I/O boundaries.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod presets;
pub mod svg;
pub mod toolpath;

pub use error::{Error, Result};
pub use geometry::{CrossSection, TubeSpec, Violation};
pub use kinematics::{JointState, PlanarPose, TendonSpec};
