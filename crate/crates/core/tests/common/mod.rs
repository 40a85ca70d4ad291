//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use notchkin::TubeSpec;
use proptest::prelude::*;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Centroid of the annular sector `r_i ≤ r ≤ r_o`, `|α| ≤ φ/2`, measured
/// along its symmetry axis, by tensor-product quadrature of
/// `∬ r²cos α dr dα / ∬ r dr dα`.
pub fn sector_centroid(ri: f64, ro: f64, phi: f64, nodes: &[(f64, f64)]) -> f64 {
    let (rm, rh) = ((ro + ri) / 2.0, (ro - ri) / 2.0);
    let ah = phi / 2.0;
    let (mut area, mut moment) = (0.0, 0.0);
    for &(u, wu) in nodes {
        let r = rm + rh * u;
        for &(v, wv) in nodes {
            let a = ah * v;
            let w = wu * wv * rh * ah;
            area += w * r;
            moment += w * r * r * a.cos();
        }
    }
    moment / area
}

/// Tip pose by marching the heading along the backbone in `steps` equal
/// steps per notch, using midpoint headings. Returns (x, y, heading, arc).
pub fn march_backbone(tube: &TubeSpec, theta: f64, steps: usize) -> (f64, f64, f64, f64) {
    let n = tube.notch_count as usize;
    let kappa = theta / n as f64 / tube.notch_width;
    let (mut x, mut y, mut h, mut arc) = (0.0, 0.0, 0.0, 0.0);
    let straight = |len: f64, x: &mut f64, y: &mut f64, h: f64, arc: &mut f64| {
        *x += len * h.sin();
        *y += len * h.cos();
        *arc += len;
    };
    for k in 0..n {
        if k > 0 {
            straight(tube.notch_spacing, &mut x, &mut y, h, &mut arc);
        }
        let ds = tube.notch_width / steps as f64;
        for _ in 0..steps {
            let mid = h + kappa * ds / 2.0;
            x += ds * mid.sin();
            y += ds * mid.cos();
            h += kappa * ds;
            arc += ds;
        }
    }
    straight(tube.tip_margin, &mut x, &mut y, h, &mut arc);
    (x, y, h, arc)
}

pub fn polyline_length(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
        .sum()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

/// Valid tubes spanning thin to thick walls and narrow to deep notches.
pub fn arb_tube() -> impl Strategy<Value = TubeSpec> {
    (
        0.2f64..5.0,
        0.05f64..0.95,
        0.02f64..0.98,
        0.1f64..2.0,
        0.0f64..2.0,
        1u32..20,
    )
        .prop_map(|(ro, wall, cut, h, c, n)| {
            TubeSpec::new(ro, ro * (1.0 - wall), cut * 2.0 * PI * ro, h, c, n)
        })
}
