//! Bland-Altman plot as a standalone SVG document.

use std::fmt::Write as _;

use super::agreement::{AgreementResult, MethodPair};
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 120.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

/// Scatter of pair mean against `cv - ref`, with lines at the bias and both
/// limits of agreement. Output depends only on the inputs.
pub fn bland_altman_svg(pairs: &[MethodPair], result: &AgreementResult) -> Result<Vec<u8>> {
    if pairs.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: pairs.len(),
        });
    }
    if pairs.len() != result.n {
        return Err(Error::invalid(format!(
            "agreement result covers {} pairs, plot given {}",
            result.n,
            pairs.len()
        )));
    }

    let points: Vec<(f64, f64)> = pairs.iter().map(|p| (p.mean(), p.difference())).collect();
    let (x_lo, x_hi) = padded_range(points.iter().map(|p| p.0));
    let (y_lo, y_hi) = padded_range(
        points
            .iter()
            .map(|p| p.1)
            .chain([result.loa_low_cm, result.loa_high_cm]),
    );
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    // axes and ticks
    let _ = writeln!(
        s,
        r#"<g id="axes" stroke="black" fill="none"><rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}"/></g>"#
    );
    let _ = writeln!(s, r#"<g id="ticks" fill="black">"#);
    for k in 0..=TICKS {
        let fx = x_lo + (x_hi - x_lo) * k as f64 / TICKS as f64;
        let fy = y_lo + (y_hi - y_lo) * k as f64 / TICKS as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{fx:.2}</text>"#,
            sx(fx),
            TOP + plot_h + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{fy:.2}</text>"#,
            LEFT - 6.0,
            sy(fy) + 4.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text id="x-label" x="{:.2}" y="{:.2}" text-anchor="middle">Mean of methods (cm)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text id="y-label" transform="translate(18,{:.2}) rotate(-90)" text-anchor="middle">Difference, CV - reference (cm)</text>"#,
        TOP + plot_h / 2.0
    );

    // reference lines
    let _ = writeln!(s, r#"<g id="lines">"#);
    for (class, y, dash, label) in [
        ("bias", result.bias_cm, "", "bias"),
        (
            "loa-high",
            result.loa_high_cm,
            r#" stroke-dasharray="6,4""#,
            "+1.96 SD",
        ),
        (
            "loa-low",
            result.loa_low_cm,
            r#" stroke-dasharray="6,4""#,
            "-1.96 SD",
        ),
    ] {
        let py = sy(y);
        let _ = writeln!(
            s,
            r#"<line class="{class}" x1="{LEFT:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="firebrick"{dash}/>"#,
            LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" fill="firebrick">{label}: {y:.2}</text>"#,
            LEFT + plot_w + 6.0,
            py + 4.0
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g id="points" fill="steelblue" fill-opacity="0.7">"#);
    for (x, y) in &points {
        let _ = writeln!(
            s,
            r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3.5"/>"#,
            sx(*x),
            sy(*y)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Ok(s.into_bytes())
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    let span = hi - lo;
    if span > 0.0 {
        (lo - 0.1 * span, hi + 0.1 * span)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}
