//! SVG rendering of `𝒩_n`, its copolygon, `φ_n` and `Φ_n`.
//!
//! Coordinates are converted to `f64` and printed to 12 significant digits.
//! The output is for viewing only.

use std::fmt::Write;

use num_traits::ToPrimitive;

use crate::error::Result;
use crate::hasseherbrand::{phi_via_copolygon, WorkingBase};
use crate::limitdata::level_polygon;
use crate::plf::PLFunction;
use crate::polygeom::NewtonPolygon;
use crate::Rational;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const GAP: f64 = 24.0;
const COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// A number with at most 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A labeled set of polylines drawn in one panel.
pub struct Panel {
    pub title: String,
    pub lines: Vec<Vec<(f64, f64)>>,
}

pub fn polygon_points(poly: &NewtonPolygon<f64>) -> Vec<(f64, f64)> {
    poly.vertices().to_vec()
}

/// Samples a piecewise-linear function at its vertices between `0` and `x_end`.
pub fn plf_points(f: &PLFunction<f64>, x_end: f64) -> Vec<(f64, f64)> {
    let mut pts = vec![(0.0, f.value_at(&0.0))];
    pts.extend(f.vertices().iter().filter(|v| v.0 > 0.0 && v.0 < x_end).copied());
    pts.push((x_end, f.value_at(&x_end)));
    pts
}

fn plf_end(f: &PLFunction<f64>) -> f64 {
    f.vertices().last().map_or(1.0, |v| v.0 * 1.25)
}

fn extent(lines: &[Vec<(f64, f64)>]) -> (f64, f64, f64, f64) {
    let pts = lines.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        return (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |a: f64, b: f64| if b > a { (b - a) * 0.05 } else { 1.0 };
    let (px, py) = (pad(x0, x1), pad(y0, y1));
    (x0 - px, x1 + px, y0 - py, y1 + py)
}

/// Renders panels side by side. Each panel is a nested `<svg>` whose viewBox
/// is fitted to its data; the y axis is flipped so it points up.
pub fn render(panels: &[Panel]) -> String {
    let width = panels.len() as f64 * (PANEL_W + GAP) + GAP;
    let height = PANEL_H + 2.0 * GAP;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {} {}" width="{}" height="{}" font-family="sans-serif" font-size="13">"#,
        sig12(width),
        sig12(height),
        sig12(width),
        sig12(height)
    );
    for (i, panel) in panels.iter().enumerate() {
        let left = GAP + i as f64 * (PANEL_W + GAP);
        let (x0, x1, y0, y1) = extent(&panel.lines);
        let _ = writeln!(out, r#"  <text x="{}" y="{}">{}</text>"#, sig12(left), sig12(GAP - 6.0), escape(&panel.title));
        let _ = writeln!(
            out,
            r##"  <rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#999"/>"##,
            sig12(left),
            sig12(GAP),
            sig12(PANEL_W),
            sig12(PANEL_H)
        );
        let _ = writeln!(
            out,
            r#"  <svg x="{}" y="{}" width="{}" height="{}" viewBox="{} {} {} {}" preserveAspectRatio="none">"#,
            sig12(left),
            sig12(GAP),
            sig12(PANEL_W),
            sig12(PANEL_H),
            sig12(x0),
            sig12(-y1),
            sig12(x1 - x0),
            sig12(y1 - y0)
        );
        for (k, line) in panel.lines.iter().enumerate() {
            let pts: Vec<String> = line.iter().map(|(x, y)| format!("{},{}", sig12(*x), sig12(-*y))).collect();
            let _ = writeln!(
                out,
                r#"    <polyline fill="none" stroke="{}" stroke-width="2" vector-effect="non-scaling-stroke" points="{}"/>"#,
                COLORS[k % COLORS.len()],
                pts.join(" ")
            );
        }
        out.push_str("  </svg>\n");
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The four panels for levels `1..=depth`, one polyline per level.
pub fn tower_panels(base: &WorkingBase, depth: usize) -> Result<Vec<Panel>> {
    let (phis, tower) = base.tower(depth)?;
    let mut polys = Vec::new();
    let mut copolys = Vec::new();
    for n in 1..=depth {
        let poly = level_polygon(&base.profile, &base.data, n)?;
        let co = poly.copolygon()?.map(to_f64);
        polys.push(polygon_points(&poly.map(to_f64)));
        copolys.push(plf_points(&co, plf_end(&co)));
        // the copolygon route is the plotted φ_n's cross-check
        debug_assert_eq!(
            phi_via_copolygon(&base.profile, &base.data, n, base.d, &base.v_base).ok().as_ref(),
            Some(&phis[n - 1].plf)
        );
    }
    let phi_lines = phis
        .iter()
        .map(|t| {
            let f = t.plf.map(to_f64);
            plf_points(&f, plf_end(&f))
        })
        .collect();
    let x_end = tower.last().map_or(1.0, |t| plf_end(&t.plf.map(to_f64)));
    let tower_lines = tower.iter().map(|t| plf_points(&t.plf.map(to_f64), x_end)).collect();
    Ok(vec![
        Panel { title: "Newton polygons N_n".into(), lines: polys },
        Panel { title: "copolygons coN_n".into(), lines: copolys },
        Panel { title: "transition functions phi_n".into(), lines: phi_lines },
        Panel { title: "tower functions Phi_n".into(), lines: tower_lines },
    ])
}

pub fn render_tower(base: &WorkingBase, depth: usize) -> Result<String> {
    Ok(render(&tower_panels(base, depth)?))
}
