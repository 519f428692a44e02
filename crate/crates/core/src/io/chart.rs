//! Static SVG load-deflection charts.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    /// `(deflection mm, load kN)` pairs.
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Axis range covering `lo..hi` with a 5% margin on each side.
pub fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
    (lo - 0.05 * span, hi + 0.05 * span)
}

/// Load (kN) against deflection (mm), one polyline per curve, with an
/// optional horizontal line at a nominal capacity.
pub fn emit_chart(curves: &[Curve], nominal: Option<f64>) -> Result<String> {
    if curves.is_empty() {
        return Err(Error::InvalidInput("chart needs at least one curve".into()));
    }
    for c in curves {
        if c.points.len() < 2 {
            return Err(Error::InvalidInput(format!("curve '{}' needs at least two points", c.name)));
        }
        if c.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidInput(format!("curve '{}' has non-finite points", c.name)));
        }
    }
    let all = curves.iter().flat_map(|c| c.points.iter().copied());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if let Some(n) = nominal {
        y0 = y0.min(n);
        y1 = y1.max(n);
    }
    let (x0, x1) = padded_range(x0, x1);
    let (y0, y1) = padded_range(y0, y1);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path class="axes" d="M{:.2} {:.2} V{:.2} H{:.2}" fill="none" stroke="black"/>"#,
        LEFT,
        TOP,
        TOP + ph,
        LEFT + pw
    );
    for k in 0..=5 {
        let xv = x0 + (x1 - x0) * k as f64 / 5.0;
        let yv = y0 + (y1 - y0) * k as f64 / 5.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{:.1}</text>"#, sx(xv), TOP + ph + 18.0, xv);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.0}</text>"#, LEFT - 6.0, sy(yv) + 4.0, yv);
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Deflection (mm)</text>"#,
        LEFT + 0.5 * pw,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">Load (kN)</text>"#,
        TOP + 0.5 * ph,
        TOP + 0.5 * ph
    );
    if let Some(n) = nominal {
        let _ = writeln!(
            s,
            r#"<line class="nominal" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="6 4"/>"#,
            LEFT,
            sy(n),
            LEFT + pw,
            sy(n)
        );
    }
    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = c.points.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="curve" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 16.0 * i as f64 + 8.0;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<path class="legend" d="M{lx:.2} {ly:.2} h24" stroke="{color}" stroke-width="1.5"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(&c.name)
        );
    }
    if nominal.is_some() {
        let ly = TOP + 16.0 * curves.len() as f64 + 8.0;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<path class="legend" d="M{lx:.2} {ly:.2} h24" stroke="gray" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}">nominal</text>"#,
            lx + 30.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(name: &str, pts: &[(f64, f64)]) -> Curve {
        Curve { name: name.into(), points: pts.to_vec() }
    }

    #[test]
    fn single_curve() {
        let svg = emit_chart(&[curve("a", &[(0.0, 0.0), (10.0, 100.0)])], None).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts.split_whitespace().count(), 2);
        assert!(!svg.contains("class=\"nominal\""));
    }

    #[test]
    fn five_curves_and_nominal() {
        let cs: Vec<Curve> = (0..5).map(|i| curve(&format!("c{i}"), &[(0.0, 0.0), (1.0 + i as f64, 50.0)])).collect();
        let svg = emit_chart(&cs, Some(40.0)).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 5);
        assert_eq!(svg.matches("class=\"nominal\"").count(), 1);
    }

    #[test]
    fn margins_and_errors() {
        assert_eq!(padded_range(0.0, 100.0), (-5.0, 105.0));
        assert!(emit_chart(&[], None).is_err());
        assert!(emit_chart(&[curve("a", &[(0.0, 0.0)])], None).is_err());
    }
}
