#ifndef NOTCHKIN_H
#define NOTCHKIN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by every entry point.
typedef enum NkStatus {
  NK_STATUS_OK = 0,
  NK_STATUS_NULL_POINTER = 1,
  NK_STATUS_INVALID_ARGUMENT = 2,
  NK_STATUS_INVALID_GEOMETRY = 3,
  NK_STATUS_DOMAIN = 4,
  NK_STATUS_NOT_ENGAGED = 5,
  NK_STATUS_PARSE = 6,
  NK_STATUS_OVERLAP = 7,
  NK_STATUS_TOOLPATH = 8,
  NK_STATUS_NON_IDENTIFIABLE = 9,
  NK_STATUS_NOT_CONVERGED = 10,
  NK_STATUS_CALIBRATION = 11,
  NK_STATUS_IO = 12,
  NK_STATUS_PANIC = 13,
} NkStatus;

// Opaque laser recipe handle.
typedef struct NkRecipe NkRecipe;

// Opaque tendon handle.
typedef struct NkTendon NkTendon;

// Opaque tube handle.
typedef struct NkTube NkTube;

// Planar tip pose: position in mm, heading in radians.
typedef struct NkPose {
  double x;
  double y;
  double heading;
} NkPose;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread; empty after success.
// The pointer stays valid until the next call into the library on the
// same thread.
const char *nk_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *nk_version(void);

// Releases a string returned by this library. NULL is ignored.
void nk_string_free(char *s);

// Creates a tube; fails with `INVALID_GEOMETRY` if any invariant is broken.
enum NkStatus nk_tube_new(double outer_radius_mm,
                          double inner_radius_mm,
                          double notch_arc_mm,
                          double notch_width_mm,
                          double notch_spacing_mm,
                          uint32_t notch_count,
                          double tip_margin_mm,
                          double hole_offset_mm,
                          struct NkTube **out);

// Parses a tube JSON document. Invariants are checked.
enum NkStatus nk_tube_from_json(const char *json, struct NkTube **out);

// Bundled preset tube 1, 2 or 3.
enum NkStatus nk_tube_preset(uint32_t index, struct NkTube **out);

void nk_tube_free(struct NkTube *tube);

// Serializes the tube as JSON into `*out` (free with `nk_string_free`).
enum NkStatus nk_tube_to_json(const struct NkTube *tube, char **out);

// Number of violated invariants of a tube described by JSON; 0 when valid.
// Unlike `nk_tube_from_json` this accepts invalid geometry.
enum NkStatus nk_tube_violations(const char *json, uintptr_t *count, char **report);

enum NkStatus nk_tendon_new(double radius_mm,
                            double free_length_mm,
                            double modulus_mpa,
                            struct NkTendon **out);

void nk_tendon_free(struct NkTendon *tendon);

// Elastic elongation under `force_n`, mm.
enum NkStatus nk_tendon_elongation(const struct NkTendon *tendon, double force_n, double *out);

// Stroke for a deflection (radians) and tension (N), mm.
enum NkStatus nk_total_stroke(const struct NkTube *tube,
                              const struct NkTendon *tendon,
                              double deflection_rad,
                              double force_n,
                              double *out);

// Deflection in radians for a stroke (mm) and tension (N). Returns
// `NOT_ENGAGED` with `*out = 0` when the stroke does not cover the tendon
// elongation.
enum NkStatus nk_predict_deflection(const struct NkTube *tube,
                                    const struct NkTendon *tendon,
                                    double stroke_mm,
                                    double force_n,
                                    double *out);

// Elementwise prediction over `len` samples. `engaged_out` may be NULL;
// otherwise it receives 1 for engaged samples and 0 for flagged ones.
enum NkStatus nk_predict_series(const struct NkTube *tube,
                                const struct NkTendon *tendon,
                                const double *strokes_mm,
                                const double *forces_n,
                                uintptr_t len,
                                double *deflections_out,
                                uint8_t *engaged_out);

// Constant-curvature tip pose for a total deflection in radians.
enum NkStatus nk_tip_pose(const struct NkTube *tube, double deflection_rad, struct NkPose *out);

enum NkStatus nk_recipe_from_json(const char *json, struct NkRecipe **out);

// Bundled recipe for preset tube 1, 2 or 3.
enum NkStatus nk_recipe_preset(uint32_t index, struct NkRecipe **out);

void nk_recipe_free(struct NkRecipe *recipe);

// Compiles the pass plan and writes the canonical job JSON into `*json_out`.
// `trace_count` may be NULL.
enum NkStatus nk_compile_job(const struct NkTube *tube,
                             const struct NkRecipe *recipe,
                             char **json_out,
                             uintptr_t *trace_count);

// Unrolled pattern drawing as an SVG document.
enum NkStatus nk_pattern_svg(const struct NkTube *tube, char **svg_out);

// Runs the calibration pipeline on trial CSV text with default options and
// writes the fit report JSON (`e_t_mpa`, `rmse_deg`, `deadband_mm`,
// `samples_used`) into `*json_out`.
enum NkStatus nk_fit_trials_csv(const struct NkTube *tube,
                                double tendon_radius_mm,
                                double tendon_free_length_mm,
                                const char *csv,
                                char **json_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NOTCHKIN_H */
