//! Minimal deterministic SVG 1.1 writer used for pattern drawings and
//! model-vs-data plots.

use std::fmt::Write;

/// Formats a coordinate with fixed precision and no negative zero.
pub fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub struct SvgDoc {
    body: String,
    width: f64,
    height: f64,
    unit: &'static str,
}

impl SvgDoc {
    /// Document whose user units map one-to-one onto `unit` (e.g. "mm").
    pub fn new(width: f64, height: f64, unit: &'static str) -> Self {
        SvgDoc {
            body: String::new(),
            width,
            height,
            unit,
        }
    }

    pub fn raw(&mut self, fragment: &str) {
        self.body.push_str(fragment);
        self.body.push('\n');
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, attrs: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" {attrs}/>"#,
            num(x),
            num(y),
            num(w),
            num(h)
        );
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, attrs: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" {attrs}/>"#,
            num(x1),
            num(y1),
            num(x2),
            num(y2)
        );
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], attrs: &str) {
        let pts = points
            .iter()
            .map(|&(x, y)| format!("{},{}", num(x), num(y)))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(self.body, r#"<polyline points="{pts}" {attrs}/>"#);
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, attrs: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" {attrs}/>"#,
            num(cx),
            num(cy),
            num(r)
        );
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, text: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-size="{}" font-family="sans-serif" text-anchor="{anchor}">{}</text>"#,
            num(x),
            num(y),
            num(size),
            escape(text)
        );
    }

    pub fn finish(self) -> String {
        format!(
            concat!(
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" ",
                "width=\"{w}{u}\" height=\"{h}{u}\" viewBox=\"0 0 {w} {h}\">\n",
                "{body}</svg>\n"
            ),
            w = num(self.width),
            h = num(self.height),
            u = self.unit,
            body = self.body
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Markers,
}

pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
    pub color: &'a str,
    pub style: Style,
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;

fn bounds(series: &[Series<'_>]) -> (f64, f64, f64, f64) {
    let mut b = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for s in series {
        for &(x, y) in s.points {
            if x.is_finite() && y.is_finite() {
                b = (b.0.min(x), b.1.max(x), b.2.min(y), b.3.max(y));
            }
        }
    }
    if !b.0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| {
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let (x0, x1) = pad(b.0, b.1);
    let (y0, y1) = pad(b.2, b.3);
    (x0, x1, y0, y1)
}

/// Scatter/line chart with axis ticks and a legend.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let (x0, x1, y0, y1) = bounds(series);
    let inner_w = PLOT_W - MARGIN_L - MARGIN_R;
    let inner_h = PLOT_H - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * inner_w;
    let sy = |y: f64| MARGIN_T + inner_h - (y - y0) / (y1 - y0) * inner_h;

    let mut doc = SvgDoc::new(PLOT_W, PLOT_H, "px");
    doc.rect(0.0, 0.0, PLOT_W, PLOT_H, r#"fill="white""#);
    doc.rect(
        MARGIN_L,
        MARGIN_T,
        inner_w,
        inner_h,
        r#"fill="none" stroke="black""#,
    );
    doc.text(PLOT_W / 2.0, 24.0, 16.0, "middle", title);
    doc.text(
        MARGIN_L + inner_w / 2.0,
        PLOT_H - 16.0,
        13.0,
        "middle",
        x_label,
    );
    doc.raw(&format!(
        r#"<text x="18" y="{}" font-size="13" font-family="sans-serif" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        num(MARGIN_T + inner_h / 2.0),
        num(MARGIN_T + inner_h / 2.0),
        escape(y_label)
    ));
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        doc.line(
            sx(xv),
            MARGIN_T + inner_h,
            sx(xv),
            MARGIN_T + inner_h + 5.0,
            r#"stroke="black""#,
        );
        doc.text(
            sx(xv),
            MARGIN_T + inner_h + 18.0,
            11.0,
            "middle",
            &format!("{xv:.3}"),
        );
        doc.line(
            MARGIN_L - 5.0,
            sy(yv),
            MARGIN_L,
            sy(yv),
            r#"stroke="black""#,
        );
        doc.text(
            MARGIN_L - 8.0,
            sy(yv) + 4.0,
            11.0,
            "end",
            &format!("{yv:.3}"),
        );
    }
    for (k, s) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = s.points.iter().map(|&(x, y)| (sx(x), sy(y))).collect();
        match s.style {
            Style::Line => doc.polyline(
                &pts,
                &format!(r#"fill="none" stroke="{}" stroke-width="1.5""#, s.color),
            ),
            Style::Markers => {
                for &(x, y) in &pts {
                    doc.circle(x, y, 1.5, &format!(r#"fill="{}""#, s.color));
                }
            }
        }
        let ly = MARGIN_T + 14.0 + 16.0 * k as f64;
        doc.line(
            MARGIN_L + 10.0,
            ly - 4.0,
            MARGIN_L + 30.0,
            ly - 4.0,
            &format!(r#"stroke="{}" stroke-width="2""#, s.color),
        );
        doc.text(MARGIN_L + 36.0, ly, 11.0, "start", s.label);
    }
    doc.finish()
}
