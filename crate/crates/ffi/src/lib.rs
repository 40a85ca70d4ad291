//! C ABI for the notchkin library.
//!
//! Tubes, tendons and recipes cross the boundary as opaque heap handles that
//! the caller releases with the matching `*_free` function. Every fallible
//! call returns an [`NkStatus`]; on failure a description is available from
//! [`nk_last_error_message`] until the next call on the same thread.
//! Strings returned through `char **` out-parameters are owned by the caller
//! and must be released with [`nk_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use notchkin::calibration::{calibrate_csv, PipelineOptions};
use notchkin::geometry::{self, TubeSpec};
use notchkin::kinematics::{self, JointState, TendonGeometry, TendonSpec};
use notchkin::toolpath::{self, LaserRecipe};
use notchkin::{presets, Error};

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGeometry = 3,
    Domain = 4,
    NotEngaged = 5,
    Parse = 6,
    Overlap = 7,
    Toolpath = 8,
    NonIdentifiable = 9,
    NotConverged = 10,
    Calibration = 11,
    Io = 12,
    Panic = 13,
}

/// Planar tip pose: position in mm, heading in radians.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NkPose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

/// Opaque tube handle.
pub struct NkTube(TubeSpec);
/// Opaque tendon handle.
pub struct NkTendon(TendonSpec);
/// Opaque laser recipe handle.
pub struct NkRecipe(LaserRecipe);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let mut bytes = message.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("interior nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> NkStatus {
    match err {
        Error::InvalidGeometry(_) | Error::TendonDoesNotFit { .. } => NkStatus::InvalidGeometry,
        Error::Domain { .. } => NkStatus::Domain,
        Error::NotEngaged { .. } => NkStatus::NotEngaged,
        Error::Json(_) | Error::Csv(_) | Error::TrialRow { .. } => NkStatus::Parse,
        Error::Overlap { .. } => NkStatus::Overlap,
        Error::Toolpath { .. } | Error::InvalidRecipe(_) => NkStatus::Toolpath,
        Error::NonIdentifiable(_) => NkStatus::NonIdentifiable,
        Error::NotConverged { .. } => NkStatus::NotConverged,
        Error::Stage { source, .. } => match status_of(source) {
            NkStatus::Parse => NkStatus::Parse,
            NkStatus::NonIdentifiable => NkStatus::NonIdentifiable,
            NkStatus::NotConverged => NkStatus::NotConverged,
            _ => NkStatus::Calibration,
        },
        Error::NoCycles { .. }
        | Error::InsufficientEngagement { .. }
        | Error::LengthMismatch { .. }
        | Error::Empty(_) => NkStatus::Calibration,
        Error::Io(_) => NkStatus::Io,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), NkStatus>) -> NkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NkStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("panic inside notchkin");
            NkStatus::Panic
        }
    }
}

fn fail(err: Error) -> NkStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn null(what: &str) -> NkStatus {
    set_error(format!("{what} is null"));
    NkStatus::NullPointer
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, NkStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, NkStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, NkStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        NkStatus::InvalidArgument
    })
}

fn to_c_string(s: String) -> *mut c_char {
    let mut bytes = s.into_bytes();
    bytes.retain(|&b| b != 0);
    CString::new(bytes)
        .expect("interior nul bytes removed")
        .into_raw()
}

/// Message describing the last failure on this thread; empty after success.
/// The pointer stays valid until the next call into the library on the
/// same thread.
#[no_mangle]
pub extern "C" fn nk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn nk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------- tubes

/// Creates a tube; fails with `INVALID_GEOMETRY` if any invariant is broken.
#[no_mangle]
pub unsafe extern "C" fn nk_tube_new(
    outer_radius_mm: f64,
    inner_radius_mm: f64,
    notch_arc_mm: f64,
    notch_width_mm: f64,
    notch_spacing_mm: f64,
    notch_count: u32,
    tip_margin_mm: f64,
    hole_offset_mm: f64,
    out: *mut *mut NkTube,
) -> NkStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let tube = TubeSpec {
            outer_radius: outer_radius_mm,
            inner_radius: inner_radius_mm,
            notch_arc: notch_arc_mm,
            notch_width: notch_width_mm,
            notch_spacing: notch_spacing_mm,
            notch_count,
            tip_margin: tip_margin_mm,
            hole_offset: hole_offset_mm,
        };
        tube.ensure_valid().map_err(fail)?;
        *out = Box::into_raw(Box::new(NkTube(tube)));
        Ok(())
    })
}

/// Parses a tube JSON document. Invariants are checked.
#[no_mangle]
pub unsafe extern "C" fn nk_tube_from_json(json: *const c_char, out: *mut *mut NkTube) -> NkStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let tube = TubeSpec::from_json(read_str(json, "json")?).map_err(fail)?;
        tube.ensure_valid().map_err(fail)?;
        *out = Box::into_raw(Box::new(NkTube(tube)));
        Ok(())
    })
}

/// Bundled preset tube 1, 2 or 3.
#[no_mangle]
pub unsafe extern "C" fn nk_tube_preset(index: u32, out: *mut *mut NkTube) -> NkStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if !(1..=3).contains(&index) {
            set_error(format!("preset index must be 1, 2 or 3, got {index}"));
            return Err(NkStatus::InvalidArgument);
        }
        *out = Box::into_raw(Box::new(NkTube(presets::tube(index as usize))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nk_tube_free(tube: *mut NkTube) {
    if !tube.is_null() {
        drop(Box::from_raw(tube));
    }
}

/// Serializes the tube as JSON into `*out` (free with `nk_string_free`).
#[no_mangle]
pub unsafe extern "C" fn nk_tube_to_json(tube: *const NkTube, out: *mut *mut c_char) -> NkStatus {
    guard(|| {
        let tube = borrow(tube, "tube")?;
        *out_ref(out, "out")? = to_c_string(tube.0.to_json());
        Ok(())
    })
}

macro_rules! tube_scalar {
    ($(#[$doc:meta])* $name:ident, $body:expr) => {
        $(#[$doc])*
        #[no_mangle]
        pub unsafe extern "C" fn $name(tube: *const NkTube, out: *mut f64) -> NkStatus {
            guard(|| {
                let tube = &borrow(tube, "tube")?.0;
                let f: fn(&TubeSpec) -> notchkin::Result<f64> = $body;
                *out_ref(out, "out")? = f(tube).map_err(fail)?;
                Ok(())
            })
        }
    };
}

tube_scalar!(
    /// Angle subtended by the uncut material, radians.
    nk_tube_wedge_angle,
    geometry::wedge_angle
);
tube_scalar!(
    /// Centroid offset of the remaining cross-section, mm.
    nk_tube_neutral_axis_offset,
    geometry::neutral_axis_offset
);
tube_scalar!(
    /// Axial extent of the notch pattern, mm.
    nk_tube_notched_length,
    |t| Ok(geometry::notched_length(t))
);
tube_scalar!(
    /// Heuristic notch gap-closure deflection, radians.
    nk_tube_closure_limit,
    kinematics::notch_closure_limit
);

/// Number of violated invariants of a tube described by JSON; 0 when valid.
/// Unlike `nk_tube_from_json` this accepts invalid geometry.
#[no_mangle]
pub unsafe extern "C" fn nk_tube_violations(
    json: *const c_char,
    count: *mut usize,
    report: *mut *mut c_char,
) -> NkStatus {
    guard(|| {
        let tube = TubeSpec::from_json(read_str(json, "json")?).map_err(fail)?;
        let violations = geometry::validate_tube(&tube);
        *out_ref(count, "count")? = violations.len();
        if let Some(report) = report.as_mut() {
            let lines: Vec<String> = violations.iter().map(ToString::to_string).collect();
            *report = to_c_string(lines.join("\n"));
        }
        Ok(())
    })
}

// --------------------------------------------------------------- tendons

#[no_mangle]
pub unsafe extern "C" fn nk_tendon_new(
    radius_mm: f64,
    free_length_mm: f64,
    modulus_mpa: f64,
    out: *mut *mut NkTendon,
) -> NkStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let tendon = TendonSpec {
            radius: radius_mm,
            free_length: free_length_mm,
            modulus: modulus_mpa,
        };
        tendon.ensure_valid().map_err(fail)?;
        *out = Box::into_raw(Box::new(NkTendon(tendon)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nk_tendon_free(tendon: *mut NkTendon) {
    if !tendon.is_null() {
        drop(Box::from_raw(tendon));
    }
}

/// Elastic elongation under `force_n`, mm.
#[no_mangle]
pub unsafe extern "C" fn nk_tendon_elongation(
    tendon: *const NkTendon,
    force_n: f64,
    out: *mut f64,
) -> NkStatus {
    guard(|| {
        let tendon = &borrow(tendon, "tendon")?.0;
        *out_ref(out, "out")? = kinematics::tendon_elongation(tendon, force_n).map_err(fail)?;
        Ok(())
    })
}

// ------------------------------------------------------------ kinematics

/// Stroke for a deflection (radians) and tension (N), mm.
#[no_mangle]
pub unsafe extern "C" fn nk_total_stroke(
    tube: *const NkTube,
    tendon: *const NkTendon,
    deflection_rad: f64,
    force_n: f64,
    out: *mut f64,
) -> NkStatus {
    guard(|| {
        let tube = &borrow(tube, "tube")?.0;
        let tendon = &borrow(tendon, "tendon")?.0;
        let state = JointState::new(deflection_rad, force_n);
        *out_ref(out, "out")? = kinematics::total_stroke(tube, tendon, state).map_err(fail)?;
        Ok(())
    })
}

/// Deflection in radians for a stroke (mm) and tension (N). Returns
/// `NOT_ENGAGED` with `*out = 0` when the stroke does not cover the tendon
/// elongation.
#[no_mangle]
pub unsafe extern "C" fn nk_predict_deflection(
    tube: *const NkTube,
    tendon: *const NkTendon,
    stroke_mm: f64,
    force_n: f64,
    out: *mut f64,
) -> NkStatus {
    guard(|| {
        let tube = &borrow(tube, "tube")?.0;
        let tendon = &borrow(tendon, "tendon")?.0;
        let out = out_ref(out, "out")?;
        match kinematics::predict_deflection(tube, tendon, stroke_mm, force_n) {
            Ok(theta) => {
                *out = theta;
                Ok(())
            }
            Err(e) => {
                *out = 0.0;
                Err(fail(e))
            }
        }
    })
}

/// Elementwise prediction over `len` samples. `engaged_out` may be NULL;
/// otherwise it receives 1 for engaged samples and 0 for flagged ones.
#[no_mangle]
pub unsafe extern "C" fn nk_predict_series(
    tube: *const NkTube,
    tendon: *const NkTendon,
    strokes_mm: *const f64,
    forces_n: *const f64,
    len: usize,
    deflections_out: *mut f64,
    engaged_out: *mut u8,
) -> NkStatus {
    guard(|| {
        let tube = &borrow(tube, "tube")?.0;
        let tendon = &borrow(tendon, "tendon")?.0;
        if len == 0 {
            return Ok(());
        }
        if strokes_mm.is_null() || forces_n.is_null() || deflections_out.is_null() {
            return Err(null("sample buffer"));
        }
        let strokes = std::slice::from_raw_parts(strokes_mm, len);
        let forces = std::slice::from_raw_parts(forces_n, len);
        let samples: Vec<(f64, f64)> = strokes
            .iter()
            .copied()
            .zip(forces.iter().copied())
            .collect();
        let predictions = kinematics::predict_series(tube, tendon, &samples).map_err(fail)?;
        let theta = std::slice::from_raw_parts_mut(deflections_out, len);
        for (t, p) in theta.iter_mut().zip(&predictions) {
            *t = p.deflection();
        }
        if !engaged_out.is_null() {
            let flags = std::slice::from_raw_parts_mut(engaged_out, len);
            for (f, p) in flags.iter_mut().zip(&predictions) {
                *f = u8::from(p.is_engaged());
            }
        }
        Ok(())
    })
}

/// Constant-curvature tip pose for a total deflection in radians.
#[no_mangle]
pub unsafe extern "C" fn nk_tip_pose(
    tube: *const NkTube,
    deflection_rad: f64,
    out: *mut NkPose,
) -> NkStatus {
    guard(|| {
        let tube = &borrow(tube, "tube")?.0;
        let p = kinematics::tip_pose(tube, deflection_rad).map_err(fail)?;
        *out_ref(out, "out")? = NkPose {
            x: p.x,
            y: p.y,
            heading: p.heading,
        };
        Ok(())
    })
}

// -------------------------------------------------------------- toolpath

#[no_mangle]
pub unsafe extern "C" fn nk_recipe_from_json(
    json: *const c_char,
    out: *mut *mut NkRecipe,
) -> NkStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let recipe = LaserRecipe::from_json(read_str(json, "json")?).map_err(fail)?;
        recipe.validate().map_err(fail)?;
        *out = Box::into_raw(Box::new(NkRecipe(recipe)));
        Ok(())
    })
}

/// Bundled recipe for preset tube 1, 2 or 3.
#[no_mangle]
pub unsafe extern "C" fn nk_recipe_preset(index: u32, out: *mut *mut NkRecipe) -> NkStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if !(1..=3).contains(&index) {
            set_error(format!("preset index must be 1, 2 or 3, got {index}"));
            return Err(NkStatus::InvalidArgument);
        }
        *out = Box::into_raw(Box::new(NkRecipe(presets::recipe(index as usize))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nk_recipe_free(recipe: *mut NkRecipe) {
    if !recipe.is_null() {
        drop(Box::from_raw(recipe));
    }
}

/// Compiles the pass plan and writes the canonical job JSON into `*json_out`.
/// `trace_count` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn nk_compile_job(
    tube: *const NkTube,
    recipe: *const NkRecipe,
    json_out: *mut *mut c_char,
    trace_count: *mut usize,
) -> NkStatus {
    guard(|| {
        let tube = &borrow(tube, "tube")?.0;
        let recipe = &borrow(recipe, "recipe")?.0;
        let json_out = out_ref(json_out, "json_out")?;
        let plan = toolpath::compile_pass_plan(tube, recipe).map_err(fail)?;
        if let Some(n) = trace_count.as_mut() {
            *n = plan.traces.len();
        }
        *json_out = to_c_string(toolpath::emit_job(&plan, recipe));
        Ok(())
    })
}

/// Unrolled pattern drawing as an SVG document.
#[no_mangle]
pub unsafe extern "C" fn nk_pattern_svg(
    tube: *const NkTube,
    svg_out: *mut *mut c_char,
) -> NkStatus {
    guard(|| {
        let tube = &borrow(tube, "tube")?.0;
        let svg_out = out_ref(svg_out, "svg_out")?;
        let pattern = toolpath::unroll_pattern(tube).map_err(fail)?;
        *svg_out = to_c_string(toolpath::emit_pattern_svg(&pattern));
        Ok(())
    })
}

// ----------------------------------------------------------- calibration

/// Runs the calibration pipeline on trial CSV text with default options and
/// writes the fit report JSON (`e_t_mpa`, `rmse_deg`, `deadband_mm`,
/// `samples_used`) into `*json_out`.
#[no_mangle]
pub unsafe extern "C" fn nk_fit_trials_csv(
    tube: *const NkTube,
    tendon_radius_mm: f64,
    tendon_free_length_mm: f64,
    csv: *const c_char,
    json_out: *mut *mut c_char,
) -> NkStatus {
    guard(|| {
        let tube = &borrow(tube, "tube")?.0;
        let text = read_str(csv, "csv")?;
        let json_out = out_ref(json_out, "json_out")?;
        let tendon = TendonGeometry {
            radius: tendon_radius_mm,
            free_length: tendon_free_length_mm,
        };
        let cal = calibrate_csv(tube, tendon, text, &PipelineOptions::default()).map_err(fail)?;
        *json_out = to_c_string(cal.result.to_json());
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn null_out_pointer_reported() {
        let status = unsafe { nk_tube_preset(1, ptr::null_mut()) };
        assert_eq!(status, NkStatus::NullPointer);
        let msg = unsafe { CStr::from_ptr(nk_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "out is null");
    }

    #[test]
    fn status_mapping_for_stage_errors() {
        let e = Error::Stage {
            stage: "deadband",
            source: Box::new(Error::InsufficientEngagement { threshold_deg: 0.5 }),
        };
        assert_eq!(status_of(&e), NkStatus::Calibration);
        let e = Error::Stage {
            stage: "fit",
            source: Box::new(Error::NonIdentifiable("x".into())),
        };
        assert_eq!(status_of(&e), NkStatus::NonIdentifiable);
    }
}
