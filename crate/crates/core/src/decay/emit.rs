use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::DecayCurve;
use crate::error::{Error, Result};

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// CSV with columns `t, weighted_sup, raw_sup`.
pub fn write_curve_csv(path: &Path, curve: &DecayCurve) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    w.write_record(["t", "weighted_sup", "raw_sup"])
        .map_err(|e| Error::Io(e.to_string()))?;
    for ((t, ws), rs) in curve
        .times
        .iter()
        .zip(&curve.weighted_sup)
        .zip(&curve.raw_sup)
    {
        w.write_record([t.to_string(), ws.to_string(), rs.to_string()])
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;

/// Log-log plot of the raw and weighted sup-norms of a curve.
pub fn write_curve_svg(path: &Path, curve: &DecayCurve, title: &str) -> Result<()> {
    fs::write(path, render_svg(curve, title))?;
    Ok(())
}

fn render_svg(curve: &DecayCurve, title: &str) -> String {
    let series: [(&[f64], &str, &str); 2] = [
        (&curve.raw_sup, "#1f77b4", "raw sup"),
        (&curve.weighted_sup, "#d62728", "weighted sup"),
    ];
    let positive = |v: &f64| *v > 0.0 && v.is_finite();
    let logs_t: Vec<f64> = curve
        .times
        .iter()
        .filter(|t| **t > 0.0)
        .map(|t| t.log10())
        .collect();
    let logs_v: Vec<f64> = series
        .iter()
        .flat_map(|(vals, _, _)| vals.iter().filter(|v| positive(v)).map(|v| v.log10()))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    if logs_t.is_empty() || logs_v.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">no positive values</text>"#,
            WIDTH / 2.0,
            HEIGHT / 2.0
        );
        svg.push_str("</svg>\n");
        return svg;
    }
    let (tx0, tx1) = padded_range(&logs_t);
    let (vy0, vy1) = padded_range(&logs_v);
    let px = |lt: f64| MARGIN + (lt - tx0) / (tx1 - tx0) * (WIDTH - 2.0 * MARGIN);
    let py = |lv: f64| HEIGHT - MARGIN - (lv - vy0) / (vy1 - vy0) * (HEIGHT - 2.0 * MARGIN);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for decade in (tx0.ceil() as i32)..=(tx1.floor() as i32) {
        let x = px(decade as f64);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">1e{decade}</text>"#,
            HEIGHT - MARGIN + 16.0
        );
    }
    for decade in (vy0.ceil() as i32)..=(vy1.floor() as i32) {
        let y = py(decade as f64);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{y:.2}" text-anchor="end" font-family="sans-serif" font-size="11">1e{decade}</text>"#,
            MARGIN - 6.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">t</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0
    );
    for (row, (vals, colour, label)) in series.iter().enumerate() {
        let pts: Vec<String> = curve
            .times
            .iter()
            .zip(vals.iter())
            .filter(|(t, v)| **t > 0.0 && positive(v))
            .map(|(t, v)| format!("{:.2},{:.2}", px(t.log10()), py(v.log10())))
            .collect();
        if !pts.is_empty() {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let ly = MARGIN + 16.0 + 16.0 * row as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{ly:.2}" font-family="sans-serif" font-size="11" fill="{colour}">{label}</text>"#,
            WIDTH - MARGIN - 90.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn padded_range(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pad = ((hi - lo) * 0.05).max(0.05);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
