//! Minimal SVG output.

use std::fmt::Write;

use kleinian_dim::group::{CloudModel, PointCloud};
use kleinian_dim::hypgeom::BoundaryPoint;
use kleinian_dim::predict::PhaseTable;

const W: f64 = 480.0;
const H: f64 = 360.0;
const MARGIN: f64 = 40.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN)
    }
}

fn header(s: &mut String) {
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
}

/// Phase plot: regularity dimensions solid, Assouad and lower dimensions
/// dashed, the exponent dotted; upper quantities black, lower grey.
pub fn phase(t: &PhaseTable<f64>) -> String {
    let f = Frame { x0: t.k_max as f64 / 2.0, x1: t.d as f64, y0: 0.0, y1: (2 * t.d - t.k_min) as f64 };
    let mut s = String::new();
    header(&mut s);
    let (l, r, b, top) = (f.px(f.x0), f.px(f.x1), f.py(f.y0), f.py(f.y1));
    let _ = writeln!(s, r#"<path d="M{l},{top} L{l},{b} L{r},{b}" fill="none" stroke="black"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">k_min = {}, k_max = {}, d = {}</text>"#,
        W / 2.0,
        MARGIN / 2.0,
        t.k_min,
        t.k_max,
        t.d
    );
    type Get = fn(&kleinian_dim::predict::PhaseRow<f64>) -> f64;
    let curves: [(Get, &str, &str); 5] = [
        (|r| r.upper_reg, "black", ""),
        (|r| r.lower_reg, "grey", ""),
        (|r| r.dim_a, "black", r#" stroke-dasharray="6 4""#),
        (|r| r.dim_l, "grey", r#" stroke-dasharray="6 4""#),
        (|r| r.poincare, "black", r#" stroke-dasharray="1 3""#),
    ];
    for (get, colour, dash) in curves {
        let pts: Vec<String> =
            t.rows.iter().map(|r| format!("{:.2},{:.2}", f.px(r.delta), f.py(get(r)))).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"{dash}/>"#,
            pts.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Quantile of a sorted slice.
fn quantile(v: &[f64], q: f64) -> f64 {
    v[((v.len() - 1) as f64 * q).round() as usize]
}

/// Scatter plot of a cloud. Sphere points of two-dimensional boundaries
/// are shown in the plane; the window drops the outer percent on each
/// axis, where points run off towards infinity.
pub fn scatter(c: &PointCloud) -> String {
    let pts: Vec<(f64, f64)> = c
        .points
        .iter()
        .filter_map(|p| match c.model {
            CloudModel::Ball if c.dim == 2 => match (BoundaryPoint::Sphere { dim: 2, v: *p }).to_plane() {
                BoundaryPoint::Plane { z, .. } => Some((z.re, z.im)),
                _ => None,
            },
            _ => Some((p[0], p[1])),
        })
        .collect();
    let mut xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let mut s = String::new();
    header(&mut s);
    if !pts.is_empty() {
        let (mut x0, mut x1) = (quantile(&xs, 0.01), quantile(&xs, 0.99));
        let (mut y0, mut y1) = (quantile(&ys, 0.01), quantile(&ys, 0.99));
        // square window around the bulk
        let half = ((x1 - x0).max(y1 - y0) / 2.0).max(1e-9);
        let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
        (x0, x1, y0, y1) = (cx - half, cx + half, cy - half, cy + half);
        let f = Frame { x0, x1, y0, y1 };
        s.push_str(r#"<g fill="black">"#);
        s.push('\n');
        for &(x, y) in &pts {
            if x >= x0 && x <= x1 && y >= y0 && y <= y1 {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="0.4"/>"#, f.px(x), f.py(y));
            }
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}
