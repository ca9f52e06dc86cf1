//! Self-contained SVG scatter charts with an optional fitted curve.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaling::ScalingFit;

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const CURVE_SAMPLES: usize = 64;

/// A shaded horizontal band with a label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub low: f64,
    pub high: f64,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
    /// Drawn as `y = fit(x)` over the x range of the points.
    pub overlay: Option<ScalingFit>,
    pub band: Option<Band>,
}

impl ChartSpec {
    pub fn new(title: &str, x_label: &str, y_label: &str, points: Vec<(f64, f64)>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            points,
            overlay: None,
            band: None,
        }
    }
}

/// Data-to-pixel mapping of a chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Frame {
    fn of(spec: &ChartSpec) -> Frame {
        let mut ys: Vec<f64> = spec.points.iter().map(|p| p.1).collect();
        let (x_min, x_max) = bounds(spec.points.iter().map(|p| p.0));
        if let Some(fit) = &spec.overlay {
            ys.extend(curve(fit, x_min, x_max).into_iter().map(|p| p.1));
        }
        if let Some(b) = &spec.band {
            ys.push(b.low);
            ys.push(b.high);
        }
        let (y_min, y_max) = bounds(ys.into_iter());
        Frame { x_min, x_max, y_min, y_max }
    }

    pub fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let w = WIDTH - LEFT - RIGHT;
        let h = HEIGHT - TOP - BOTTOM;
        (
            LEFT + (x - self.x_min) / (self.x_max - self.x_min) * w,
            TOP + h - (y - self.y_min) / (self.y_max - self.y_min) * h,
        )
    }
}

/// Padded range; a single value gets a unit-wide window.
fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    }
}

fn curve(fit: &ScalingFit, x_min: f64, x_max: f64) -> Vec<(f64, f64)> {
    (0..=CURVE_SAMPLES)
        .map(|i| {
            let x = x_min + (x_max - x_min) * i as f64 / CURVE_SAMPLES as f64;
            (x, fit.model.predict(fit, x))
        })
        .collect()
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// The mapping `emit_chart` uses for `spec`.
pub fn chart_frame(spec: &ChartSpec) -> Result<Frame> {
    if spec.points.is_empty() {
        return Err(Error::InvalidParameters("cannot chart an empty series".into()));
    }
    if spec.points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::InvalidParameters("chart points must be finite".into()));
    }
    Ok(Frame::of(spec))
}

pub fn emit_chart(spec: &ChartSpec) -> Result<String> {
    let fr = chart_frame(spec)?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, esc(&spec.title));

    if let Some(b) = &spec.band {
        let (_, y_hi) = fr.px(fr.x_min, b.high);
        let (_, y_lo) = fr.px(fr.x_min, b.low);
        let _ = writeln!(
            s,
            r##"<rect class="band" x="{LEFT}" y="{y_hi:.2}" width="{:.2}" height="{:.2}" fill="#f2c14e" fill-opacity="0.25"/>"##,
            WIDTH - LEFT - RIGHT,
            (y_lo - y_hi).max(0.0)
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" text-anchor="end" fill="#8a6d1f">{}</text>"##,
            WIDTH - RIGHT - 4.0,
            y_hi - 4.0,
            esc(&b.label)
        );
    }

    // Axes and ticks.
    let (x0, y0) = fr.px(fr.x_min, fr.y_min);
    let (x1, y1) = fr.px(fr.x_max, fr.y_max);
    let _ = writeln!(s, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black"/>"#);
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = fr.x_min + (fr.x_max - fr.x_min) * t;
        let yv = fr.y_min + (fr.y_max - fr.y_min) * t;
        let (px, _) = fr.px(xv, fr.y_min);
        let (_, py) = fr.px(fr.x_min, yv);
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y0 + 18.0, tick(xv));
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, py + 4.0, tick(yv));
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0, esc(&spec.x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        esc(&spec.y_label)
    );

    if let Some(fit) = &spec.overlay {
        let pts: Vec<String> = curve(fit, fr.x_min, fr.x_max)
            .into_iter()
            .map(|(x, y)| {
                let (px, py) = fr.px(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline class="fit" points="{}" fill="none" stroke="#c0392b" stroke-width="1.5"/>"##,
            pts.join(" ")
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" fill="#c0392b">{}: {:.4} (r² {:.3})</text>"##,
            x0 + 8.0,
            y1 + 14.0,
            fit.model,
            fit.coefficient,
            fit.r_squared
        );
    }

    for &(x, y) in &spec.points {
        let (px, py) = fr.px(x, y);
        let _ = writeln!(s, r##"<circle class="point" cx="{px:.2}" cy="{py:.2}" r="3.5" fill="#2c6fbb"/>"##);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn tick(v: f64) -> String {
    if v.abs() >= 1000.0 || v.fract().abs() < 1e-9 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::FitModel;

    fn attr_pairs(svg: &str, class: &str) -> Vec<(f64, f64)> {
        let tag = format!(r#"class="{class}" points=""#);
        let start = svg.find(&tag).unwrap() + tag.len();
        let end = start + svg[start..].find('"').unwrap();
        svg[start..end]
            .split(' ')
            .map(|p| {
                let (a, b) = p.split_once(',').unwrap();
                (a.parse().unwrap(), b.parse().unwrap())
            })
            .collect()
    }

    #[test]
    fn empty_series_is_refused() {
        assert!(emit_chart(&ChartSpec::new("t", "x", "y", vec![])).is_err());
    }

    #[test]
    fn single_point_renders() {
        let svg = emit_chart(&ChartSpec::new("t", "x", "y", vec![(3.0, 4.0)])).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("class=\"point\"").count(), 1);
    }

    #[test]
    fn fit_curve_passes_through_fitted_values() {
        let fit = ScalingFit {
            model: FitModel::ExpTwoThirds,
            coefficient: 0.43,
            intercept: 1.0,
            r_squared: 0.97,
            points_used: 5,
            censored: 0,
            excluded_sat: 0,
            sizes_used: 5,
        };
        let pts: Vec<(f64, f64)> = [60.0, 80.0, 100.0, 120.0].iter().map(|&n: &f64| (n, 0.43 * n.powf(2.0 / 3.0) + 1.2)).collect();
        let mut spec = ChartSpec::new("scaling", "n", "log2 conflicts", pts);
        spec.overlay = Some(fit.clone());
        let svg = emit_chart(&spec).unwrap();
        let fr = chart_frame(&spec).unwrap();
        let curve = attr_pairs(&svg, "fit");
        assert_eq!(curve.len(), CURVE_SAMPLES + 1);
        for (i, &(px, py)) in curve.iter().enumerate() {
            let x = fr.x_min + (fr.x_max - fr.x_min) * i as f64 / CURVE_SAMPLES as f64;
            let (ex, ey) = fr.px(x, FitModel::ExpTwoThirds.predict(&fit, x));
            assert!((px - ex).abs() < 0.01 && (py - ey).abs() < 0.01);
        }
    }

    #[test]
    fn band_is_annotated() {
        let mut spec = ChartSpec::new("shatter", "n", "inter / n", vec![(100.0, 0.34), (200.0, 0.36)]);
        spec.band = Some(Band { low: 0.35, high: 0.41, label: "0.35-0.41".into() });
        let svg = emit_chart(&spec).unwrap();
        assert!(svg.contains("class=\"band\""));
        assert!(svg.contains("0.35-0.41"));
    }
}
