//! Tube and notch geometry.
//!
//! A notched tube is described by its annular cross-section (`r_o`, `r_i`),
//! the arc `s` removed by each notch, and the axial layout of `n` identical
//! notches of width `h` separated by `c`. The notch arc is measured on the
//! OUTER surface, so the material left after cutting subtends
//! `φ = (2π·r_o − s) / r_o`.
//!
//! Axial positions are measured from the distal tip of the tube.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TIP_MARGIN_MM: f64 = 1.0;
pub const DEFAULT_HOLE_OFFSET_MM: f64 = 0.5;

fn default_tip_margin() -> f64 {
    DEFAULT_TIP_MARGIN_MM
}

fn default_hole_offset() -> f64 {
    DEFAULT_HOLE_OFFSET_MM
}

/// Geometric parameters of one notched tube. Lengths in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TubeSpec {
    #[serde(rename = "outer_radius_mm")]
    pub outer_radius: f64,
    #[serde(rename = "inner_radius_mm")]
    pub inner_radius: f64,
    /// Arc length removed by a notch, measured at the outer surface.
    #[serde(rename = "notch_arc_mm")]
    pub notch_arc: f64,
    /// Axial width of one notch.
    #[serde(rename = "notch_width_mm")]
    pub notch_width: f64,
    /// Axial gap between consecutive notches.
    #[serde(rename = "notch_spacing_mm")]
    pub notch_spacing: f64,
    pub notch_count: u32,
    /// Distance from the distal end to the first notch.
    #[serde(rename = "tip_margin_mm", default = "default_tip_margin")]
    pub tip_margin: f64,
    /// Distance from the distal end to the centre of the tendon hole.
    #[serde(rename = "hole_offset_mm", default = "default_hole_offset")]
    pub hole_offset: f64,
}

/// Cross-section of the notched region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossSection {
    /// Angle subtended by the material remaining after machining, radians.
    pub wedge_angle: f64,
    /// Distance from the tube centreline to the centroid of the remaining
    /// annular sector, mm.
    pub neutral_axis_offset: f64,
}

/// A broken [`TubeSpec`] invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub constraint: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.constraint)
    }
}

impl TubeSpec {
    /// Tube with the default axial layout (tip margin and hole offset).
    pub fn new(
        outer_radius: f64,
        inner_radius: f64,
        notch_arc: f64,
        notch_width: f64,
        notch_spacing: f64,
        notch_count: u32,
    ) -> Self {
        TubeSpec {
            outer_radius,
            inner_radius,
            notch_arc,
            notch_width,
            notch_spacing,
            notch_count,
            tip_margin: DEFAULT_TIP_MARGIN_MM,
            hole_offset: DEFAULT_HOLE_OFFSET_MM,
        }
    }

    pub fn wall_thickness(&self) -> f64 {
        self.outer_radius - self.inner_radius
    }

    /// Outer circumference, the height of the unrolled canvas.
    pub fn circumference(&self) -> f64 {
        2.0 * PI * self.outer_radius
    }

    /// Axial pitch of the notch pattern, `h + c`.
    pub fn pitch(&self) -> f64 {
        self.notch_width + self.notch_spacing
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_tube(self)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let violations = validate_tube(self);
        if violations.is_empty() {
            return Ok(());
        }
        let joined = violations
            .iter()
            .map(Violation::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        Err(Error::InvalidGeometry(joined))
    }

    pub fn cross_section(&self) -> Result<CrossSection> {
        Ok(CrossSection {
            wedge_angle: wedge_angle(self)?,
            neutral_axis_offset: neutral_axis_offset(self)?,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tube spec serializes")
    }
}

/// Lists every broken invariant of `tube`; empty when the tube is valid.
pub fn validate_tube(tube: &TubeSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |field, constraint: String| out.push(Violation { field, constraint });

    let (ro, ri) = (tube.outer_radius, tube.inner_radius);
    if !(ri > 0.0) {
        push("inner_radius_mm", format!("must be > 0, got {ri}"));
    }
    if !(ro.is_finite() && ri < ro) {
        push(
            "outer_radius_mm",
            format!("inner radius must be strictly less than outer radius, got r_i={ri} r_o={ro}"),
        );
    }
    let full = 2.0 * PI * ro;
    let s = tube.notch_arc;
    if !(s > 0.0 && s < full) {
        push(
            "notch_arc_mm",
            format!("must lie in (0, 2*pi*r_o) = (0, {full}), got {s}"),
        );
    }
    if !(tube.notch_width > 0.0 && tube.notch_width.is_finite()) {
        push(
            "notch_width_mm",
            format!("must be > 0, got {}", tube.notch_width),
        );
    }
    if !(tube.notch_spacing >= 0.0 && tube.notch_spacing.is_finite()) {
        push(
            "notch_spacing_mm",
            format!("must be >= 0, got {}", tube.notch_spacing),
        );
    }
    if tube.notch_count < 1 {
        push("notch_count", "must be >= 1, got 0".to_string());
    }
    if !(tube.tip_margin >= 0.0 && tube.tip_margin.is_finite()) {
        push(
            "tip_margin_mm",
            format!("must be >= 0, got {}", tube.tip_margin),
        );
    }
    if !(tube.hole_offset >= 0.0 && tube.hole_offset.is_finite()) {
        push(
            "hole_offset_mm",
            format!("must be >= 0, got {}", tube.hole_offset),
        );
    }
    out
}

/// Angle subtended by the uncut material, `φ = (2π·r_o − s) / r_o`.
pub fn wedge_angle(tube: &TubeSpec) -> Result<f64> {
    let ro = tube.outer_radius;
    let s = tube.notch_arc;
    if !(ro > 0.0 && ro.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "outer radius must be > 0, got {ro}"
        )));
    }
    let full = 2.0 * PI * ro;
    if !(s > 0.0 && s < full) {
        return Err(Error::InvalidGeometry(format!(
            "notch arc {s} mm outside (0, {full}) mm"
        )));
    }
    Ok((full - s) / ro)
}

/// Centroid distance of the remaining annular sector from the tube axis:
///
/// `ȳ = 4·sin(φ/2)·(r_o³ − r_i³) / (3·φ·(r_o² − r_i²))`
pub fn neutral_axis_offset(tube: &TubeSpec) -> Result<f64> {
    let phi = wedge_angle(tube)?;
    let (ro, ri) = (tube.outer_radius, tube.inner_radius);
    if !(ri > 0.0 && ri < ro) {
        return Err(Error::InvalidGeometry(format!(
            "radii must satisfy 0 < r_i < r_o, got r_i={ri} r_o={ro}"
        )));
    }
    // r_o³ − r_i³ and r_o² − r_i² share the factor (r_o − r_i); cancelling it
    // keeps the thin-wall limit well conditioned.
    let ratio = (ro * ro + ro * ri + ri * ri) / (ro + ri);
    Ok(4.0 * (phi / 2.0).sin() * ratio / (3.0 * phi))
}

/// Axial extent of the notch pattern, `n·h + (n − 1)·c`.
pub fn notched_length(tube: &TubeSpec) -> f64 {
    let n = f64::from(tube.notch_count);
    n * tube.notch_width + (n - 1.0).max(0.0) * tube.notch_spacing
}
