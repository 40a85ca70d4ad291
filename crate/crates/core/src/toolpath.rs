//! Laser pass planning for a notch pattern.
//!
//! The tube surface is unrolled onto a canvas whose horizontal axis is the
//! axial position from the distal tip and whose vertical axis is arc length
//! around the outer circumference. Every feature (each notch, then the
//! tendon hole) is cut `cuts_per_pass` times with successive offsets of
//! `drill_offset`, first in focus and then with the focal plane
//! `defocus_offset` inside the material; that whole sequence is repeated
//! `repeat_count` times.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{notched_length, TubeSpec};
use crate::svg::SvgDoc;

/// Side of the square tendon-attachment hole, mm.
pub const HOLE_SIDE_MM: f64 = 0.3;

pub const JOB_SCHEMA: &str = "notchkin-job/1";

/// Direction in which successive drill-offset cuts step axially.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrillDirection {
    /// Toward the inside of the feature; the nominal outline is the first cut.
    #[default]
    Inward,
    /// Away from the feature, growing it past the nominal outline.
    Outward,
}

impl DrillDirection {
    fn as_str(self) -> &'static str {
        match self {
            DrillDirection::Inward => "inward",
            DrillDirection::Outward => "outward",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserRecipe {
    pub power_w: f64,
    pub pulse_frequency_khz: f64,
    pub scan_speed_mm_s: f64,
    pub wavelength_nm: f64,
    pub drill_offset_mm: f64,
    pub defocus_offset_mm: f64,
    pub repeat_count: u32,
    pub cuts_per_pass: u32,
    #[serde(default)]
    pub drill_direction: DrillDirection,
}

impl LaserRecipe {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("power_w", self.power_w),
            ("pulse_frequency_khz", self.pulse_frequency_khz),
            ("scan_speed_mm_s", self.scan_speed_mm_s),
            ("wavelength_nm", self.wavelength_nm),
            ("drill_offset_mm", self.drill_offset_mm),
            ("defocus_offset_mm", self.defocus_offset_mm),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidRecipe(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.repeat_count < 1 {
            return Err(Error::InvalidRecipe("repeat_count must be >= 1".into()));
        }
        if self.cuts_per_pass < 1 {
            return Err(Error::InvalidRecipe("cuts_per_pass must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    Notch(usize),
    Hole,
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Feature::Notch(k) => write!(f, "notch:{k}"),
            Feature::Hole => f.write_str("hole"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Focus {
    InFocus,
    Defocused,
}

impl Focus {
    fn as_str(self) -> &'static str {
        match self {
            Focus::InFocus => "in_focus",
            Focus::Defocused => "defocused",
        }
    }
}

/// Axis-aligned rectangle on the unrolled canvas, mm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub axial_start: f64,
    pub circ_start: f64,
    pub axial_len: f64,
    pub circ_len: f64,
}

impl Rect {
    pub fn axial_end(&self) -> f64 {
        self.axial_start + self.axial_len
    }

    pub fn circ_end(&self) -> f64 {
        self.circ_start + self.circ_len
    }

    pub fn circ_center(&self) -> f64 {
        self.circ_start + self.circ_len / 2.0
    }

    /// Closed outline, counter-clockwise from the (axial_start, circ_start)
    /// corner.
    pub fn outline(&self) -> Vec<[f64; 2]> {
        let (a0, a1) = (self.axial_start, self.axial_end());
        let (c0, c1) = (self.circ_start, self.circ_end());
        vec![[a0, c0], [a1, c0], [a1, c1], [a0, c1], [a0, c0]]
    }

    fn axial_overlap(&self, other: &Rect) -> f64 {
        self.axial_end().min(other.axial_end()) - self.axial_start.max(other.axial_start)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnrolledPattern {
    pub notches: Vec<Rect>,
    pub hole: Rect,
    /// Axial length of the canvas, mm.
    pub length: f64,
    /// Outer circumference, mm.
    pub height: f64,
    /// Notch dimensions used for annotations.
    pub notch_arc: f64,
    pub notch_width: f64,
    pub notch_spacing: f64,
}

impl UnrolledPattern {
    pub fn features(&self) -> impl Iterator<Item = (Feature, Rect)> + '_ {
        self.notches
            .iter()
            .enumerate()
            .map(|(k, r)| (Feature::Notch(k), *r))
            .chain(std::iter::once((Feature::Hole, self.hole)))
    }
}

/// Lays the pattern out on the unrolled canvas with zero overlap tolerance.
pub fn unroll_pattern(tube: &TubeSpec) -> Result<UnrolledPattern> {
    unroll_pattern_with_tolerance(tube, 0.0)
}

/// Notch `k` starts at `tip_margin + k·(h + c)`; the hole is centred at
/// `hole_offset`. All features share the canvas midline. The canvas extends
/// one tip margin proximal to the last notch.
pub fn unroll_pattern_with_tolerance(tube: &TubeSpec, overlap_tol: f64) -> Result<UnrolledPattern> {
    tube.ensure_valid()?;
    let height = tube.circumference();
    let mid = height / 2.0;
    let notches: Vec<Rect> = (0..tube.notch_count as usize)
        .map(|k| Rect {
            axial_start: tube.tip_margin + k as f64 * tube.pitch(),
            circ_start: mid - tube.notch_arc / 2.0,
            axial_len: tube.notch_width,
            circ_len: tube.notch_arc,
        })
        .collect();
    let hole = Rect {
        axial_start: tube.hole_offset - HOLE_SIDE_MM / 2.0,
        circ_start: mid - HOLE_SIDE_MM / 2.0,
        axial_len: HOLE_SIDE_MM,
        circ_len: HOLE_SIDE_MM,
    };
    if hole.axial_start < 0.0 {
        return Err(Error::Toolpath {
            feature: Feature::Hole.to_string(),
            message: format!(
                "hole centred at {} mm extends past the distal end",
                tube.hole_offset
            ),
        });
    }
    if HOLE_SIDE_MM >= height {
        return Err(Error::Toolpath {
            feature: Feature::Hole.to_string(),
            message: format!("hole does not fit circumference {height} mm"),
        });
    }
    for (k, n) in notches.iter().enumerate() {
        if hole.axial_overlap(n) > overlap_tol {
            return Err(Error::Overlap {
                notch: k,
                hole_start: hole.axial_start,
                hole_end: hole.axial_end(),
                notch_start: n.axial_start,
                notch_end: n.axial_end(),
            });
        }
    }
    let pattern_end = tube.tip_margin + notched_length(tube);
    let length = (pattern_end + tube.tip_margin).max(hole.axial_end());
    Ok(UnrolledPattern {
        notches,
        hole,
        length,
        height,
        notch_arc: tube.notch_arc,
        notch_width: tube.notch_width,
        notch_spacing: tube.notch_spacing,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub feature: Feature,
    pub cut: u32,
    pub focus: Focus,
    pub repeat: u32,
    /// Focal-plane offset, 0 or `−defocus_offset`, mm.
    pub depth: f64,
    /// Closed outline in (axial, circumferential) mm.
    pub polyline: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassPlan {
    pub traces: Vec<Trace>,
    pub canvas_length: f64,
    pub canvas_height: f64,
}

/// `(n + 1) · cuts_per_pass · 2 · repeat_count`
pub fn expected_trace_count(notch_count: u32, recipe: &LaserRecipe) -> usize {
    (notch_count as usize + 1) * recipe.cuts_per_pass as usize * 2 * recipe.repeat_count as usize
}

fn offset_rect(
    feature: Feature,
    base: &Rect,
    shift: f64,
    dir: DrillDirection,
    canvas_length: f64,
) -> Result<Rect> {
    let grow = match dir {
        DrillDirection::Inward => -shift,
        DrillDirection::Outward => shift,
    };
    let r = Rect {
        axial_start: base.axial_start - grow,
        axial_len: base.axial_len + 2.0 * grow,
        ..*base
    };
    if r.axial_len <= 0.0 {
        return Err(Error::Toolpath {
            feature: feature.to_string(),
            message: format!(
                "drill offsets of {shift} mm collapse the {} mm feature",
                base.axial_len
            ),
        });
    }
    if r.axial_start < 0.0 || r.axial_end() > canvas_length {
        return Err(Error::Toolpath {
            feature: feature.to_string(),
            message: format!(
                "offset cut spans [{}, {}] mm outside canvas [0, {canvas_length}] mm",
                r.axial_start,
                r.axial_end()
            ),
        });
    }
    Ok(r)
}

/// Expands every feature into its ordered cutting traces.
pub fn compile_pass_plan(tube: &TubeSpec, recipe: &LaserRecipe) -> Result<PassPlan> {
    recipe.validate()?;
    let pattern = unroll_pattern(tube)?;
    let mut traces = Vec::with_capacity(expected_trace_count(tube.notch_count, recipe));
    for (feature, rect) in pattern.features() {
        let cuts = (0..recipe.cuts_per_pass)
            .map(|k| {
                let shift = f64::from(k) * recipe.drill_offset_mm;
                offset_rect(
                    feature,
                    &rect,
                    shift,
                    recipe.drill_direction,
                    pattern.length,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        for repeat in 0..recipe.repeat_count {
            for (focus, depth) in [
                (Focus::InFocus, 0.0),
                (Focus::Defocused, -recipe.defocus_offset_mm),
            ] {
                for (cut, r) in cuts.iter().enumerate() {
                    traces.push(Trace {
                        feature,
                        cut: cut as u32,
                        focus,
                        repeat,
                        depth,
                        polyline: r.outline(),
                    });
                }
            }
        }
    }
    Ok(PassPlan {
        traces,
        canvas_length: pattern.length,
        canvas_height: pattern.height,
    })
}

/// Fixed six-decimal rendering without negative zero.
fn fixed(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// Canonical job document: keys sorted at every level, numbers with six
/// decimals, one trace per line. Identical inputs give identical bytes.
pub fn emit_job(plan: &PassPlan, recipe: &LaserRecipe) -> String {
    let mut s = String::new();
    s.push_str("{\n");
    s.push_str("  \"canvas\": {");
    let _ = write!(
        s,
        "\"circumference_mm\": {}, \"length_mm\": {}",
        fixed(plan.canvas_height),
        fixed(plan.canvas_length)
    );
    s.push_str("},\n");
    s.push_str("  \"header\": {");
    let _ = write!(
        s,
        concat!(
            "\"cuts_per_pass\": {}, \"defocus_offset_mm\": {}, \"drill_direction\": \"{}\", ",
            "\"drill_offset_mm\": {}, \"power_w\": {}, \"pulse_frequency_khz\": {}, ",
            "\"repeat_count\": {}, \"scan_speed_mm_s\": {}, \"wavelength_nm\": {}"
        ),
        recipe.cuts_per_pass,
        fixed(recipe.defocus_offset_mm),
        recipe.drill_direction.as_str(),
        fixed(recipe.drill_offset_mm),
        fixed(recipe.power_w),
        fixed(recipe.pulse_frequency_khz),
        recipe.repeat_count,
        fixed(recipe.scan_speed_mm_s),
        fixed(recipe.wavelength_nm),
    );
    s.push_str("},\n");
    let _ = writeln!(s, "  \"schema\": \"{JOB_SCHEMA}\",");
    let _ = writeln!(s, "  \"trace_count\": {},", plan.traces.len());
    s.push_str("  \"traces\": [");
    for (i, t) in plan.traces.iter().enumerate() {
        s.push_str(if i == 0 { "\n    " } else { ",\n    " });
        let pts = t
            .polyline
            .iter()
            .map(|p| format!("[{}, {}]", fixed(p[0]), fixed(p[1])))
            .collect::<Vec<_>>()
            .join(", ");
        let _ = write!(
            s,
            "{{\"cut\": {}, \"depth_mm\": {}, \"feature\": \"{}\", \"focus\": \"{}\", \"polyline\": [{}], \"repeat\": {}}}",
            t.cut,
            fixed(t.depth),
            t.feature,
            t.focus.as_str(),
            pts,
            t.repeat
        );
    }
    if !plan.traces.is_empty() {
        s.push_str("\n  ");
    }
    s.push_str("]\n}\n");
    s
}

/// Parsed form of a job document.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobDocument {
    pub canvas: JobCanvas,
    pub header: LaserRecipe,
    pub schema: String,
    pub trace_count: usize,
    pub traces: Vec<JobTrace>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobCanvas {
    pub circumference_mm: f64,
    pub length_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobTrace {
    pub cut: u32,
    pub depth_mm: f64,
    pub feature: String,
    pub focus: Focus,
    pub polyline: Vec<[f64; 2]>,
    pub repeat: u32,
}

pub fn parse_job(text: &str) -> Result<JobDocument> {
    let doc: JobDocument = serde_json::from_str(text)?;
    if doc.schema != JOB_SCHEMA {
        return Err(Error::Toolpath {
            feature: "job".into(),
            message: format!("unsupported schema `{}`", doc.schema),
        });
    }
    Ok(doc)
}

/// Scale drawing of the unrolled pattern in millimetres, with the notch
/// arc, width and spacing dimensioned on the first two notches.
pub fn emit_pattern_svg(pattern: &UnrolledPattern) -> String {
    let pad = 2.0;
    let mut doc = SvgDoc::new(pattern.length + 2.0 * pad, pattern.height + 2.0 * pad, "mm");
    let thin = r##"stroke="#444" stroke-width="0.02""##;
    let dim = r##"stroke="#1a5fb4" stroke-width="0.02""##;
    doc.raw(&format!(
        r#"<g id="canvas" transform="translate({pad} {pad})">"#
    ));
    doc.rect(
        0.0,
        0.0,
        pattern.length,
        pattern.height,
        r##"class="canvas" fill="#f4f0e6" stroke="#444" stroke-width="0.03""##,
    );
    doc.line(
        0.0,
        pattern.height / 2.0,
        pattern.length,
        pattern.height / 2.0,
        &format!(r#"{thin} stroke-dasharray="0.2 0.1""#),
    );
    for (feature, r) in pattern.features() {
        let class = match feature {
            Feature::Notch(_) => "feature notch",
            Feature::Hole => "feature hole",
        };
        doc.rect(
            r.axial_start,
            r.circ_start,
            r.axial_len,
            r.circ_len,
            &format!(r##"class="{class}" data-feature="{feature}" fill="#c01c28" fill-opacity="0.6" stroke="#000" stroke-width="0.02""##),
        );
    }

    let font = 0.25;
    if let Some(n0) = pattern.notches.first() {
        let x = n0.axial_start - 0.2;
        doc.line(x, n0.circ_start, x, n0.circ_end(), dim);
        doc.text(
            x - 0.1,
            n0.circ_center(),
            font,
            "end",
            &format!("s = {:.2} mm", pattern.notch_arc),
        );
        let y = n0.circ_start - 0.2;
        doc.line(n0.axial_start, y, n0.axial_end(), y, dim);
        doc.text(
            n0.axial_start + n0.axial_len / 2.0,
            y - 0.1,
            font,
            "middle",
            &format!("h = {:.2} mm", pattern.notch_width),
        );
        if let Some(n1) = pattern.notches.get(1) {
            let y = n0.circ_end() + 0.3;
            doc.line(n0.axial_end(), y, n1.axial_start, y, dim);
            doc.text(
                (n0.axial_end() + n1.axial_start) / 2.0,
                y + 0.35,
                font,
                "middle",
                &format!("c = {:.2} mm", pattern.notch_spacing),
            );
        }
    }
    doc.text(
        0.0,
        -0.5,
        font * 1.2,
        "start",
        &format!(
            "unrolled pattern {:.3} x {:.4} mm (axial x circumference)",
            pattern.length, pattern.height
        ),
    );
    doc.raw("</g>");
    doc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn preset_trace_counts() {
        for (k, expected) in [(1, 352), (2, 528), (3, 704)] {
            let plan = compile_pass_plan(&presets::tube(k), &presets::recipe(k)).unwrap();
            assert_eq!(plan.traces.len(), expected, "tube {k}");
        }
    }

    #[test]
    fn minimal_plan() {
        let mut tube = presets::tube(1);
        tube.notch_count = 1;
        let recipe = LaserRecipe {
            repeat_count: 1,
            ..presets::recipe(1)
        };
        assert_eq!(compile_pass_plan(&tube, &recipe).unwrap().traces.len(), 16);
    }

    #[test]
    fn ordering_cuts_then_focus_then_repeat() {
        let plan = compile_pass_plan(&presets::tube(1), &presets::recipe(1)).unwrap();
        let t = &plan.traces;
        assert_eq!(t[0].feature, Feature::Notch(0));
        assert_eq!((t[3].cut, t[3].focus), (3, Focus::InFocus));
        assert_eq!(
            (t[4].cut, t[4].focus, t[4].depth),
            (0, Focus::Defocused, -0.1)
        );
        assert_eq!((t[8].cut, t[8].focus, t[8].repeat), (0, Focus::InFocus, 1));
        assert_eq!(t[32].feature, Feature::Notch(1));
        assert_eq!(t.last().unwrap().feature, Feature::Hole);
    }

    #[test]
    fn inward_cuts_step_by_drill_offset() {
        let plan = compile_pass_plan(&presets::tube(1), &presets::recipe(1)).unwrap();
        for k in 0..4 {
            let p = &plan.traces[k].polyline;
            assert!((p[0][0] - (1.0 + 0.005 * k as f64)).abs() < 1e-12);
            assert!((p[1][0] - (1.5 - 0.005 * k as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn outward_cut_leaving_canvas_fails() {
        let mut tube = presets::tube(1);
        tube.tip_margin = 0.0;
        tube.hole_offset = 12.0;
        let recipe = LaserRecipe {
            drill_direction: DrillDirection::Outward,
            ..presets::recipe(1)
        };
        match compile_pass_plan(&tube, &recipe).unwrap_err() {
            Error::Toolpath { feature, .. } => assert_eq!(feature, "notch:0"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn collapsing_offsets_fail() {
        let recipe = LaserRecipe {
            drill_offset_mm: 0.2,
            ..presets::recipe(1)
        };
        assert!(matches!(
            compile_pass_plan(&presets::tube(1), &recipe),
            Err(Error::Toolpath { .. })
        ));
    }

    #[test]
    fn invalid_recipe_rejected() {
        let recipe = LaserRecipe {
            cuts_per_pass: 0,
            ..presets::recipe(1)
        };
        assert!(matches!(
            compile_pass_plan(&presets::tube(1), &recipe),
            Err(Error::InvalidRecipe(_))
        ));
    }

    #[test]
    fn unroll_tube1() {
        let p = unroll_pattern(&presets::tube(1)).unwrap();
        assert_eq!(p.notches.len(), 10);
        assert!((p.notches[9].axial_end() - 10.5).abs() < 1e-12);
        let mid = p.height / 2.0;
        for n in &p.notches {
            assert!((n.circ_center() - mid).abs() < 1e-12);
            assert_eq!(n.circ_len, 2.83);
        }
        assert!((p.hole.axial_start - 0.35).abs() < 1e-12);
    }

    #[test]
    fn unroll_single_notch_at_origin() {
        let mut tube = presets::tube(2);
        tube.notch_count = 1;
        tube.tip_margin = 0.0;
        tube.hole_offset = 1.0;
        let p = unroll_pattern(&tube).unwrap();
        assert_eq!(p.notches.len(), 1);
        assert_eq!(p.notches[0].axial_start, 0.0);
    }

    #[test]
    fn hole_inside_notch_overlaps() {
        let mut tube = presets::tube(1);
        tube.hole_offset = 1.25;
        assert!(matches!(
            unroll_pattern(&tube),
            Err(Error::Overlap { notch: 0, .. })
        ));
        // Touching edges are not an overlap.
        tube.hole_offset = 1.0 - HOLE_SIDE_MM / 2.0;
        assert!(unroll_pattern(&tube).is_ok());
    }

    #[test]
    fn job_header_and_roundtrip() {
        let recipe = presets::recipe(1);
        let plan = compile_pass_plan(&presets::tube(1), &recipe).unwrap();
        let text = emit_job(&plan, &recipe);
        assert_eq!(text, emit_job(&plan, &recipe));
        let doc = parse_job(&text).unwrap();
        assert_eq!(doc.header, recipe);
        assert_eq!(doc.header.power_w, 2.0);
        assert_eq!(doc.header.pulse_frequency_khz, 60.0);
        assert_eq!(doc.header.scan_speed_mm_s, 25.0);
        assert_eq!(doc.header.wavelength_nm, 1030.0);
        assert_eq!(doc.trace_count, 352);
        assert_eq!(doc.traces.len(), 352);
        assert_eq!(doc.traces[351].feature, "hole");
    }

    #[test]
    fn svg_counts_features() {
        let p = unroll_pattern(&presets::tube(1)).unwrap();
        let svg = emit_pattern_svg(&p);
        assert_eq!(svg.matches("class=\"feature ").count(), 11);
        assert_eq!(svg, emit_pattern_svg(&p));
        let height = format!("height=\"{}\"", crate::svg::num(p.height));
        assert!(svg.contains(&height));
    }
}
