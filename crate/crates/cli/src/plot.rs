//! Static SVG plots: orbit traces and convergence curves.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone, equal_aspect: bool) -> Self {
        let (mut x0, mut x1) = bounds(xs);
        let (mut y0, mut y1) = bounds(ys);
        if equal_aspect {
            let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
            let sx = (x1 - x0) / (WIDTH - 2.0 * MARGIN);
            let sy = (y1 - y0) / (HEIGHT - 2.0 * MARGIN);
            let s = sx.max(sy);
            let (hw, hh) = (s * (WIDTH - 2.0 * MARGIN) / 2.0, s * (HEIGHT - 2.0 * MARGIN) / 2.0);
            (x0, x1, y0, y1) = (cx - hw, cx + hw, cy - hh, cy + hh);
        }
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

/// Padded `(min, max)`, widened when degenerate.
fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let span = hi - lo;
    let pad = if span > 0.0 { 0.05 * span } else { 0.5 * lo.abs().max(1.0) };
    (lo - pad, hi + pad)
}

fn header(title: &str, frame: &Frame, xlabel: &str, ylabel: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title));
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(s, r##"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="#444"/>"##, r - l, b - t);
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = frame.x0 + f * (frame.x1 - frame.x0);
        let yv = frame.y0 + f * (frame.y1 - frame.y0);
        let (xp, yp) = (frame.px(xv), frame.py(yv));
        let _ = writeln!(s, r##"<line x1="{xp:.2}" y1="{b}" x2="{xp:.2}" y2="{}" stroke="#444"/>"##, b + 5.0);
        let _ = writeln!(s, r#"<text x="{xp:.2}" y="{}" text-anchor="middle">{}</text>"#, b + 18.0, tick(xv));
        let _ = writeln!(s, r##"<line x1="{}" y1="{yp:.2}" x2="{l}" y2="{yp:.2}" stroke="#444"/>"##, l - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, l - 8.0, yp + 4.0, tick(yv));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 12.0, escape(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    );
    s
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(frame: &Frame, pts: &[(f64, f64)], color: &str, closed: bool) -> String {
    let mut d = String::new();
    for &(x, y) in pts {
        let _ = write!(d, "{:.2},{:.2} ", frame.px(x), frame.py(y));
    }
    let tag = if closed { "polygon" } else { "polyline" };
    format!(r#"<{tag} points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, d.trim_end())
}

/// Closed trace of every body, one color each, equal axis scales.
pub fn orbit_svg(title: &str, tracks: &[Vec<(f64, f64)>]) -> String {
    let xs = tracks.iter().flatten().map(|p| p.0);
    let ys = tracks.iter().flatten().map(|p| p.1);
    let frame = Frame::fit(xs, ys, true);
    let mut s = header(title, &frame, "x", "y");
    for (i, t) in tracks.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        s.push_str(&polyline(&frame, t, color, true));
        s.push('\n');
        if let Some(&(x, y)) = t.first() {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#, frame.px(x), frame.py(y));
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Action after each accepted step.
pub fn convergence_svg(title: &str, history: &[f64]) -> String {
    let pts: Vec<(f64, f64)> = history.iter().enumerate().map(|(i, &f)| (i as f64, f)).collect();
    let frame = Frame::fit(pts.iter().map(|p| p.0), pts.iter().map(|p| p.1), false);
    let mut s = header(title, &frame, "iteration", "action");
    s.push_str(&polyline(&frame, &pts, COLORS[0], false));
    s.push_str("\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svgs_are_well_formed_and_deterministic() {
        let circle: Vec<_> = (0..32)
            .map(|i| {
                let t = i as f64 / 32.0 * std::f64::consts::TAU;
                (t.cos(), t.sin())
            })
            .collect();
        let a = orbit_svg("orbit <1>", std::slice::from_ref(&circle));
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
        assert!(a.contains("orbit &lt;1&gt;") && a.contains("<polygon"));
        assert_eq!(a, orbit_svg("orbit <1>", &[circle]));
        let c = convergence_svg("c", &[3.0, 2.0, 2.0]);
        assert!(c.contains("<polyline"));
        // flat or empty input still renders
        assert!(convergence_svg("c", &[1.0]).contains("</svg>"));
        assert!(convergence_svg("c", &[]).contains("</svg>"));
    }
}
