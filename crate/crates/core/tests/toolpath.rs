use notchkin::toolpath::{
    compile_pass_plan, emit_job, expected_trace_count, parse_job, unroll_pattern, DrillDirection,
    Feature, Focus, LaserRecipe,
};
use notchkin::{presets, Error, TubeSpec};
use proptest::prelude::*;

fn recipe(repeat_count: u32, cuts_per_pass: u32, direction: DrillDirection) -> LaserRecipe {
    LaserRecipe {
        repeat_count,
        cuts_per_pass,
        drill_direction: direction,
        ..presets::recipe(1)
    }
}

/// Tubes whose hole sits in the tip margin, clear of the first notch.
fn arb_laid_out_tube() -> impl Strategy<Value = TubeSpec> {
    (
        0.3f64..3.0,
        0.1f64..0.9,
        0.05f64..0.9,
        0.1f64..1.5,
        0.0f64..1.5,
        1u32..16,
        0.6f64..3.0,
    )
        .prop_map(|(ro, wall, cut, h, c, n, margin)| TubeSpec {
            tip_margin: margin,
            hole_offset: 0.5 * (margin - 0.3) + 0.15,
            ..TubeSpec::new(
                ro,
                ro * (1.0 - wall),
                cut * 2.0 * std::f64::consts::PI * ro,
                h,
                c,
                n,
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn trace_count_formula(tube in arb_laid_out_tube(), reps in 1u32..9, cuts in 1u32..6) {
        let r = recipe(reps, cuts, DrillDirection::Inward);
        let plan = compile_pass_plan(&tube, &r).unwrap();
        prop_assert_eq!(plan.traces.len(), (tube.notch_count as usize + 1) * cuts as usize * 2 * reps as usize);
        prop_assert_eq!(plan.traces.len(), expected_trace_count(tube.notch_count, &r));
    }

    #[test]
    fn plan_order_and_bounds(tube in arb_laid_out_tube(), reps in 1u32..5, cuts in 1u32..5) {
        let r = recipe(reps, cuts, DrillDirection::Inward);
        let plan = compile_pass_plan(&tube, &r).unwrap();
        let key = |t: &notchkin::toolpath::Trace| {
            (t.feature, t.repeat, matches!(t.focus, Focus::Defocused), t.cut)
        };
        for w in plan.traces.windows(2) {
            prop_assert!(key(&w[0]) < key(&w[1]));
        }
        for t in &plan.traces {
            prop_assert!(t.cut < cuts && t.repeat < reps);
            match t.feature {
                Feature::Notch(k) => prop_assert!(k < tube.notch_count as usize),
                Feature::Hole => {}
            }
            let want = if t.focus == Focus::InFocus { 0.0 } else { -r.defocus_offset_mm };
            prop_assert_eq!(t.depth, want);
            prop_assert_eq!(t.polyline.first(), t.polyline.last());
            for p in &t.polyline {
                prop_assert!(p[0] >= 0.0 && p[0] <= plan.canvas_length);
                prop_assert!(p[1] >= 0.0 && p[1] <= plan.canvas_height);
            }
        }
    }

    #[test]
    fn unrolled_rects_fit_canvas(tube in arb_laid_out_tube()) {
        let p = unroll_pattern(&tube).unwrap();
        prop_assert!((p.height - 2.0 * std::f64::consts::PI * tube.outer_radius).abs() < 1e-12);
        for (_, r) in p.features() {
            prop_assert!(r.axial_start >= 0.0 && r.axial_end() <= p.length + 1e-12);
            prop_assert!(r.circ_start >= 0.0 && r.circ_end() <= p.height + 1e-12);
            prop_assert!((r.circ_center() - p.height / 2.0).abs() < 1e-12);
        }
        for (k, r) in p.notches.iter().enumerate() {
            prop_assert!((r.circ_len - tube.notch_arc).abs() < 1e-12);
            prop_assert!((r.axial_len - tube.notch_width).abs() < 1e-12);
            let start = tube.tip_margin + k as f64 * (tube.notch_width + tube.notch_spacing);
            prop_assert!((r.axial_start - start).abs() < 1e-12);
        }
    }

    #[test]
    fn drill_offsets_nest(tube in arb_laid_out_tube(), outward in any::<bool>()) {
        let dir = if outward { DrillDirection::Outward } else { DrillDirection::Inward };
        let r = recipe(1, 4, dir);
        let plan = match compile_pass_plan(&tube, &r) {
            Ok(p) => p,
            // Outward cuts may leave a tight canvas; that is reported, not clipped.
            Err(Error::Toolpath { .. }) if outward => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let width = |t: &notchkin::toolpath::Trace| t.polyline[1][0] - t.polyline[0][0];
        for w in plan.traces.windows(2) {
            if w[0].feature == w[1].feature && w[0].focus == w[1].focus && w[1].cut == w[0].cut + 1 {
                let step = width(&w[1]) - width(&w[0]);
                let want = if outward { 2.0 } else { -2.0 } * r.drill_offset_mm;
                prop_assert!((step - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn distinct_plans_emit_distinct_jobs(tube in arb_laid_out_tube(), reps in 1u32..4, other in 1u32..4) {
        prop_assume!(reps != other);
        let (a, b) = (recipe(reps, 2, DrillDirection::Inward), recipe(other, 2, DrillDirection::Inward));
        let ja = emit_job(&compile_pass_plan(&tube, &a).unwrap(), &a);
        let jb = emit_job(&compile_pass_plan(&tube, &b).unwrap(), &b);
        prop_assert_ne!(ja, jb);
    }
}

#[test]
fn preset_counts() {
    for (k, want) in [(1, 352), (2, 528), (3, 704)] {
        let plan = compile_pass_plan(&presets::tube(k), &presets::recipe(k)).unwrap();
        assert_eq!(plan.traces.len(), want);
    }
}

#[test]
fn single_notch_single_repeat() {
    let tube = TubeSpec {
        tip_margin: 0.0,
        hole_offset: 1.0,
        ..TubeSpec::new(0.75, 0.45, 2.83, 0.5, 0.5, 1)
    };
    let plan = compile_pass_plan(&tube, &recipe(1, 4, DrillDirection::Inward)).unwrap();
    assert_eq!(plan.traces.len(), 16);
}

#[test]
fn hole_over_notch_is_rejected() {
    let tube = TubeSpec {
        hole_offset: 1.2,
        ..presets::tube(1)
    };
    let err = compile_pass_plan(&tube, &presets::recipe(1)).unwrap_err();
    assert!(matches!(err, Error::Overlap { notch: 0, .. }), "{err}");
}

#[test]
fn job_parses_back() {
    for k in 1..=3 {
        let (tube, r) = (presets::tube(k), presets::recipe(k));
        let plan = compile_pass_plan(&tube, &r).unwrap();
        let doc = parse_job(&emit_job(&plan, &r)).unwrap();
        assert_eq!(doc.trace_count, plan.traces.len());
        assert_eq!(doc.traces.len(), plan.traces.len());
        assert_eq!(doc.header, r);
        for (j, t) in doc.traces.iter().zip(&plan.traces) {
            assert_eq!(j.feature, t.feature.to_string());
            assert_eq!((j.cut, j.repeat, j.focus), (t.cut, t.repeat, t.focus));
            for (a, b) in j.polyline.iter().zip(&t.polyline) {
                assert!((a[0] - b[0]).abs() <= 5e-7 && (a[1] - b[1]).abs() <= 5e-7);
            }
        }
    }
}
