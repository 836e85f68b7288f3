//! Static SVG line plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 48.0;
const TICKS: usize = 5;

fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

fn label(v: f64) -> String {
    let v = if v.abs() < 1e-12 { 0.0 } else { v };
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) {
        format!("{v:.3e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Renders `curve` as a polyline with axes and tick labels.
pub fn render_svg(curve: &[(f64, f64)]) -> Result<String> {
    if curve.len() < 2 {
        return Err(Error::InsufficientData(curve.len()));
    }
    if curve.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
        return Err(Error::InvalidArgument("curve contains non-finite values".into()));
    }
    let fold = |sel: fn(&(f64, f64)) -> f64| {
        curve
            .iter()
            .map(sel)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    };
    let (x_lo, x_hi) = fold(|p| p.0);
    let (y_lo, y_hi) = fold(|p| p.1);
    let (x_lo, x_hi) = padded_range(x_lo, x_hi);
    let (y_lo, y_hi) = padded_range(y_lo, y_hi);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;
    let bottom = MARGIN_TOP + plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<g stroke="black" stroke-width="1"><line x1="{MARGIN_LEFT}" y1="{bottom}" x2="{:.2}" y2="{bottom}"/><line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{bottom}"/></g>"#,
        MARGIN_LEFT + plot_w
    );
    let _ = writeln!(out, r#"<g font-family="sans-serif" font-size="11" fill="black">"#);
    for k in 0..TICKS {
        let w = k as f64 / (TICKS - 1) as f64;
        let (xv, yv) = (x_lo + w * (x_hi - x_lo), y_lo + w * (y_hi - y_lo));
        let (x, y) = (px(xv), py(yv));
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 5.0,
            bottom + 18.0,
            label(xv)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT - 8.0,
            y + 4.0,
            label(yv)
        );
    }
    let _ = writeln!(out, "</g>");
    let points: Vec<String> = curve.iter().map(|&(t, v)| format!("{:.2},{:.2}", px(t), py(v))).collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        points.join(" ")
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes [`render_svg`] output to `path`.
pub fn emit_svg(curve: &[(f64, f64)], path: &Path) -> Result<()> {
    let svg = render_svg(curve)?;
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_one_segment() {
        let svg = render_svg(&[(0.0, 1.0), (1.0, 2.0)]).unwrap();
        let poly = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(poly.matches(',').count(), 2);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn constant_curve_is_horizontal() {
        let svg = render_svg(&[(0.0, 3.0), (0.5, 3.0), (1.0, 3.0)]).unwrap();
        let poly = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let ys: Vec<&str> = poly
            .split("points=\"")
            .nth(1)
            .unwrap()
            .trim_end_matches("\"/>")
            .split(' ')
            .map(|p| p.split(',').nth(1).unwrap())
            .collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn deterministic_and_validated() {
        let c: Vec<(f64, f64)> = (0..101).map(|i| (i as f64 / 100.0, (i as f64).sqrt())).collect();
        assert_eq!(render_svg(&c).unwrap(), render_svg(&c).unwrap());
        assert_eq!(render_svg(&c[..1]), Err(Error::InsufficientData(1)));
    }
}
