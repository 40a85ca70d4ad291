//! Stroke/deflection model of a unidirectional notched joint.
//!
//! The tendon stroke splits into a kinematic part and the elastic elongation
//! of the tendon itself:
//!
//! ```text
//! L_t   = L_kin + L_el
//! L_kin = (ȳ + r_i − r_t)·θ
//! L_el  = F·L_0 / (E_t·π·r_t²)
//! ```
//!
//! Tension `F` is always an input (measured, or a user-supplied profile);
//! no joint stiffness law is modelled.

use std::f64::consts::PI;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{neutral_axis_offset, notched_length, TubeSpec};

/// Tendon material and length. Radius and length in mm, modulus in MPa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TendonSpec {
    #[serde(rename = "radius_mm")]
    pub radius: f64,
    /// Length of the tendon when unactuated.
    #[serde(rename = "free_length_mm")]
    pub free_length: f64,
    /// Young's modulus, MPa (N/mm²).
    #[serde(rename = "modulus_mpa")]
    pub modulus: f64,
}

/// A tendon whose modulus is still unknown, as handed to calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TendonGeometry {
    #[serde(rename = "radius_mm")]
    pub radius: f64,
    #[serde(rename = "free_length_mm")]
    pub free_length: f64,
}

/// Tendon document as read from disk; the modulus may be absent when the
/// file is meant for calibration.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TendonFile {
    pub radius_mm: f64,
    pub free_length_mm: f64,
    #[serde(default)]
    pub modulus_mpa: Option<f64>,
}

impl TendonFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn geometry(&self) -> TendonGeometry {
        TendonGeometry {
            radius: self.radius_mm,
            free_length: self.free_length_mm,
        }
    }

    /// Complete spec; fails when the modulus is missing.
    pub fn spec(&self) -> Result<TendonSpec> {
        let modulus = self
            .modulus_mpa
            .ok_or_else(|| Error::InvalidGeometry("tendon file has no modulus_mpa".into()))?;
        let spec = self.geometry().with_modulus(modulus);
        spec.ensure_valid()?;
        Ok(spec)
    }
}

impl TendonGeometry {
    pub fn with_modulus(self, modulus: f64) -> TendonSpec {
        TendonSpec {
            radius: self.radius,
            free_length: self.free_length,
            modulus,
        }
    }
}

impl TendonSpec {
    pub fn geometry(&self) -> TendonGeometry {
        TendonGeometry {
            radius: self.radius,
            free_length: self.free_length,
        }
    }

    pub fn cross_section_area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    /// Elongation per newton of tension, mm/N.
    pub fn compliance(&self) -> f64 {
        self.free_length / (self.modulus * self.cross_section_area())
    }

    pub fn ensure_valid(&self) -> Result<()> {
        for (name, v) in [
            ("radius_mm", self.radius),
            ("free_length_mm", self.free_length),
            ("modulus_mpa", self.modulus),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidGeometry(format!(
                    "tendon {name} must be > 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Checks that the tendon fits the lumen of `tube`.
    pub fn ensure_fits(&self, tube: &TubeSpec) -> Result<()> {
        if self.radius < tube.inner_radius {
            Ok(())
        } else {
            Err(Error::TendonDoesNotFit {
                tendon_mm: self.radius,
                lumen_mm: tube.inner_radius,
            })
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    /// Total joint deflection, radians.
    pub deflection: f64,
    /// Tendon tension, N.
    pub tension: f64,
}

impl JointState {
    pub fn new(deflection: f64, tension: f64) -> Self {
        JointState {
            deflection,
            tension,
        }
    }
}

/// Distal pose of the bent joint in its bending plane. The base sits at the
/// origin with the tube axis along +y; the joint bends toward +x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarPose {
    pub x: f64,
    pub y: f64,
    /// Tip heading measured from +y toward +x, radians.
    pub heading: f64,
}

/// Outcome of inverting the model for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prediction {
    Engaged(f64),
    /// Stroke does not cover the tendon elongation; reported as θ = 0.
    NotEngaged {
        slack_mm: f64,
    },
    /// Negative or non-finite tension; reported as θ = 0.
    InvalidTension,
}

impl Prediction {
    pub fn deflection(&self) -> f64 {
        match *self {
            Prediction::Engaged(theta) => theta,
            _ => 0.0,
        }
    }

    pub fn is_engaged(&self) -> bool {
        matches!(self, Prediction::Engaged(_))
    }
}

fn check_deflection(theta: f64) -> Result<()> {
    if theta >= 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            quantity: "deflection",
            value: theta,
        })
    }
}

fn check_tension(force: f64) -> Result<()> {
    if force >= 0.0 && force.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            quantity: "tension",
            value: force,
        })
    }
}

/// Precomputed coefficients of the affine model `L_t = a·θ + b·F` for one
/// tube/tendon pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointModel {
    /// `ȳ + r_i − r_t`, mm/rad.
    pub moment_arm: f64,
    /// `L_0 / (E_t·π·r_t²)`, mm/N.
    pub compliance: f64,
    /// Heuristic gap-closure deflection, radians.
    pub closure_limit: f64,
}

impl JointModel {
    pub fn new(tube: &TubeSpec, tendon: &TendonSpec) -> Result<Self> {
        tube.ensure_valid()?;
        tendon.ensure_valid()?;
        tendon.ensure_fits(tube)?;
        let ybar = neutral_axis_offset(tube)?;
        Ok(JointModel {
            moment_arm: ybar + tube.inner_radius - tendon.radius,
            compliance: tendon.compliance(),
            closure_limit: closure_limit_from(tube, ybar),
        })
    }

    pub fn elongation(&self, force: f64) -> f64 {
        self.compliance * force
    }

    pub fn stroke(&self, state: JointState) -> f64 {
        self.moment_arm * state.deflection + self.compliance * state.tension
    }

    pub fn invert(&self, stroke: f64, force: f64) -> Prediction {
        if !(force >= 0.0 && force.is_finite()) {
            return Prediction::InvalidTension;
        }
        let free = stroke - self.compliance * force;
        if free < 0.0 || free.is_nan() {
            return Prediction::NotEngaged { slack_mm: -free };
        }
        Prediction::Engaged(free / self.moment_arm)
    }

    fn warn_if_closed(&self, theta: f64) {
        if theta > self.closure_limit {
            warn!(
                "deflection {theta:.4} rad exceeds the notch closure limit {:.4} rad",
                self.closure_limit
            );
        }
    }
}

/// Stroke taken up by bending, `(ȳ + r_i − r_t)·θ`.
pub fn kinematic_stroke(tube: &TubeSpec, tendon: &TendonSpec, theta: f64) -> Result<f64> {
    check_deflection(theta)?;
    let model = JointModel::new(tube, tendon)?;
    Ok(model.moment_arm * theta)
}

/// Elastic elongation of the tendon under `force` newtons, mm.
pub fn tendon_elongation(tendon: &TendonSpec, force: f64) -> Result<f64> {
    check_tension(force)?;
    tendon.ensure_valid()?;
    Ok(tendon.compliance() * force)
}

pub fn total_stroke(tube: &TubeSpec, tendon: &TendonSpec, state: JointState) -> Result<f64> {
    check_deflection(state.deflection)?;
    check_tension(state.tension)?;
    let model = JointModel::new(tube, tendon)?;
    model.warn_if_closed(state.deflection);
    Ok(model.stroke(state))
}

/// Inverts the model: `θ = (L_t − L_el(F)) / (ȳ + r_i − r_t)`.
pub fn predict_deflection(
    tube: &TubeSpec,
    tendon: &TendonSpec,
    stroke: f64,
    force: f64,
) -> Result<f64> {
    check_tension(force)?;
    let model = JointModel::new(tube, tendon)?;
    match model.invert(stroke, force) {
        Prediction::Engaged(theta) => {
            model.warn_if_closed(theta);
            Ok(theta)
        }
        Prediction::NotEngaged { slack_mm } => Err(Error::NotEngaged { slack_mm }),
        Prediction::InvalidTension => unreachable!("tension checked above"),
    }
}

/// Applies [`predict_deflection`] to every `(stroke, force)` sample, flagging
/// rather than failing on samples that cannot be inverted.
pub fn predict_series(
    tube: &TubeSpec,
    tendon: &TendonSpec,
    samples: &[(f64, f64)],
) -> Result<Vec<Prediction>> {
    let model = JointModel::new(tube, tendon)?;
    Ok(samples
        .iter()
        .map(|&(stroke, force)| model.invert(stroke, force))
        .collect())
}

fn closure_limit_from(tube: &TubeSpec, ybar: f64) -> f64 {
    f64::from(tube.notch_count) * tube.notch_width / (ybar + tube.outer_radius)
}

/// Heuristic deflection at which the notch gaps close at the outer wall,
/// `n·h / (ȳ + r_o)`. Only used as a warning threshold.
pub fn notch_closure_limit(tube: &TubeSpec) -> Result<f64> {
    let ybar = neutral_axis_offset(tube)?;
    Ok(closure_limit_from(tube, ybar))
}

enum Piece {
    Arc { length: f64, turn: f64 },
    Straight(f64),
}

/// Proximal-to-distal pieces: notch, spacing, notch, ..., notch, tip margin.
fn pieces(tube: &TubeSpec, theta: f64) -> Vec<Piece> {
    let n = tube.notch_count as usize;
    let turn = theta / n as f64;
    let mut out = Vec::with_capacity(2 * n + 1);
    for k in 0..n {
        if k > 0 && tube.notch_spacing > 0.0 {
            out.push(Piece::Straight(tube.notch_spacing));
        }
        out.push(Piece::Arc {
            length: tube.notch_width,
            turn,
        });
    }
    if tube.tip_margin > 0.0 {
        out.push(Piece::Straight(tube.tip_margin));
    }
    out
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Advances `(x, y, heading)` along an arc of `length` that turns by `turn`.
/// Uses the chord form so that `turn → 0` degrades to a straight step.
fn advance(pose: &mut PlanarPose, length: f64, turn: f64) {
    let chord = length * sinc(turn / 2.0);
    let mid = pose.heading + turn / 2.0;
    pose.x += chord * mid.sin();
    pose.y += chord * mid.cos();
    pose.heading += turn;
}

/// Constant-curvature tip pose: θ is shared equally by the `n` notches, each
/// bending as a circular arc of length `h`; spacings and the tip margin stay
/// straight.
pub fn tip_pose(tube: &TubeSpec, theta: f64) -> Result<PlanarPose> {
    check_deflection(theta)?;
    tube.ensure_valid()?;
    let mut pose = PlanarPose {
        x: 0.0,
        y: 0.0,
        heading: 0.0,
    };
    for piece in pieces(tube, theta) {
        match piece {
            Piece::Arc { length, turn } => advance(&mut pose, length, turn),
            Piece::Straight(length) => advance(&mut pose, length, 0.0),
        }
    }
    pose.heading = theta;
    Ok(pose)
}

/// Backbone polyline of the bent joint from base to tip. Each notch arc is
/// split into `segments_per_arc` chords; straight pieces contribute their
/// end points only.
pub fn tip_polyline(
    tube: &TubeSpec,
    theta: f64,
    segments_per_arc: usize,
) -> Result<Vec<(f64, f64)>> {
    check_deflection(theta)?;
    tube.ensure_valid()?;
    let m = segments_per_arc.max(1);
    let mut pose = PlanarPose {
        x: 0.0,
        y: 0.0,
        heading: 0.0,
    };
    let mut points = vec![(0.0, 0.0)];
    for piece in pieces(tube, theta) {
        match piece {
            Piece::Arc { length, turn } => {
                for _ in 0..m {
                    advance(&mut pose, length / m as f64, turn / m as f64);
                    points.push((pose.x, pose.y));
                }
            }
            Piece::Straight(length) => {
                advance(&mut pose, length, 0.0);
                points.push((pose.x, pose.y));
            }
        }
    }
    Ok(points)
}

/// Total backbone length `notched_length + tip_margin`.
pub fn backbone_length(tube: &TubeSpec) -> f64 {
    notched_length(tube) + tube.tip_margin
}
