//! Self-contained SVG figures. Output depends only on the input data, so
//! identical reports render to identical bytes.

use std::fmt::Write as _;

use crate::config::ExperimentKind;
use crate::report::ExperimentReport;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Axis-aligned data window mapped onto the plot area.
#[derive(Debug, Clone, Copy)]
struct Frame {
    x: [f64; 2],
    y: [f64; 2],
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let span = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it
                .filter(|v| v.is_finite())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            if !lo.is_finite() {
                return [0.0, 1.0];
            }
            let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
            [lo - pad, hi + pad]
        };
        Frame {
            x: span(&mut xs.clone()),
            y: span(&mut ys.clone()),
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x[0]) / (self.x[1] - self.x[0]) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y[0]) / (self.y[1] - self.y[0]) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(s: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.1} {y1:.1} L{x0:.1} {y0:.1} L{x1:.1} {y0:.1}" stroke="black" fill="none"/>"#
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let xv = f.x[0] + t * (f.x[1] - f.x[0]);
        let yv = f.y[0] + t * (f.y[1] - f.y[0]);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{:.3}</text>"#,
            f.px(xv),
            y0 + 16.0,
            xv
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{:.3}</text>"#,
            x0 - 4.0,
            f.py(yv) + 4.0,
            yv
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    );
}

fn polyline(s: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str, dashed: bool) {
    let d: Vec<String> = pts
        .iter()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(x, y)| format!("{:.2},{:.2}", f.px(*x), f.py(*y)))
        .collect();
    let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
    let _ = writeln!(
        s,
        r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="1.5"{dash}/>"#,
        d.join(" ")
    );
}

fn dots(s: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str, r: f64) {
    for (x, y) in pts.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{color}"/>"#,
            f.px(*x),
            f.py(*y)
        );
    }
}

/// Scatter plot of points in the plane.
pub fn scatter(title: &str, pts: &[(f64, f64)], xlabel: &str, ylabel: &str) -> String {
    let f = Frame::fit(pts.iter().map(|p| p.0), pts.iter().map(|p| p.1));
    let mut s = open(title);
    axes(&mut s, &f, xlabel, ylabel);
    dots(&mut s, &f, pts, PALETTE[0], 1.8);
    s.push_str("</svg>\n");
    s
}

/// Heatmap of `values[i * ny + j]` on a regular `nx × ny` grid spanning
/// `x` and `y`.
pub fn heatmap(title: &str, values: &[f64], nx: usize, ny: usize, x: [f64; 2], y: [f64; 2]) -> String {
    let f = Frame { x, y };
    let mut s = open(title);
    let top = values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let (cw, ch) = ((x[1] - x[0]) / nx as f64, (y[1] - y[0]) / ny as f64);
    for i in 0..nx {
        for j in 0..ny {
            let v = values[i * ny + j];
            let t = if top > 0.0 { (v / top).clamp(0.0, 1.0) } else { 0.0 };
            let shade = (255.0 * (1.0 - t)).round() as u8;
            let (cx, cy) = (x[0] + i as f64 * cw, y[0] + (j + 1) as f64 * ch);
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb(255,{shade},{shade})"/>"#,
                f.px(cx),
                f.py(cy),
                f.px(cx + cw) - f.px(cx),
                f.py(cy - ch) - f.py(cy)
            );
        }
    }
    axes(&mut s, &f, "Re z", "Im z");
    s.push_str("</svg>\n");
    s
}

/// Figure appropriate to the report's experiment kind.
pub fn render_report(r: &ExperimentReport) -> String {
    match r.experiment {
        ExperimentKind::Variance => variance_plot(r),
        ExperimentKind::Trajectory => trajectory_plot(r),
        ExperimentKind::Expectation => expectation_plot(r),
        ExperimentKind::Polytope => polytope_plot(r),
    }
}

fn variance_plot(r: &ExperimentReport) -> String {
    let series: Vec<Vec<(f64, f64)>> = (0..r.degrees.first().map_or(0, |b| b.pairings.len()))
        .map(|j| {
            r.degrees
                .iter()
                .map(|b| ((b.degree as f64).ln(), b.pairings[j].variance.ln()))
                .collect()
        })
        .collect();
    let all = series.iter().flatten();
    let f = Frame::fit(all.clone().map(|p| p.0), all.map(|p| p.1));
    let mut s = open(&format!("{}: log variance", r.config.ensemble));
    axes(&mut s, &f, "log N", "log Var");
    for (j, pts) in series.iter().enumerate() {
        let c = PALETTE[j % PALETTE.len()];
        dots(&mut s, &f, pts, c, 3.0);
        if let Some(fit) = r
            .fits
            .iter()
            .find(|fit| Some(fit.phi) == r.degrees[0].pairings.get(j).map(|p| p.phi))
        {
            let line: Vec<(f64, f64)> = [f.x[0], f.x[1]]
                .iter()
                .map(|x| (*x, fit.intercept + fit.slope * x))
                .collect();
            polyline(&mut s, &f, &line, c, true);
        }
    }
    s.push_str("</svg>\n");
    s
}

fn trajectory_plot(r: &ExperimentReport) -> String {
    let Some(t) = &r.trajectory else {
        return open("empty trajectory") + "</svg>\n";
    };
    let pts: Vec<(f64, f64)> = t
        .degrees
        .iter()
        .zip(&t.deviations)
        .map(|(n, d)| (*n as f64, *d))
        .collect();
    let f = Frame::fit(pts.iter().map(|p| p.0), pts.iter().map(|p| p.1).chain([0.0, t.epsilon]));
    let mut s = open(&format!("{}: deviation from the limit", r.config.ensemble));
    axes(&mut s, &f, "N", "d_N");
    polyline(&mut s, &f, &pts, PALETTE[0], false);
    dots(&mut s, &f, &pts, PALETTE[0], 2.5);
    polyline(
        &mut s,
        &f,
        &[(f.x[0], t.epsilon), (f.x[1], t.epsilon)],
        PALETTE[1],
        true,
    );
    s.push_str("</svg>\n");
    s
}

fn expectation_plot(r: &ExperimentReport) -> String {
    let mut means = Vec::new();
    let mut targets = Vec::new();
    let mut k = 0.0;
    for b in &r.degrees {
        for p in &b.pairings {
            means.push((k, p.mean));
            if let Some(v) = p.reference.or(p.kernel) {
                targets.push((k, v));
            }
            k += 1.0;
        }
    }
    let f = Frame::fit(means.iter().map(|p| p.0), means.iter().chain(&targets).map(|p| p.1));
    let mut s = open(&format!("{}: mean pairings", r.config.ensemble));
    axes(&mut s, &f, "(N, phi) index", "mean pairing");
    dots(&mut s, &f, &targets, PALETTE[1], 4.0);
    dots(&mut s, &f, &means, PALETTE[0], 2.5);
    s.push_str("</svg>\n");
    s
}

fn polytope_plot(r: &ExperimentReport) -> String {
    let pts: Vec<(f64, f64)> = r
        .degrees
        .iter()
        .filter_map(|b| b.window_mass.map(|m| (b.degree as f64, m)))
        .collect();
    let f = Frame::fit(pts.iter().map(|p| p.0), pts.iter().map(|p| p.1).chain([0.0, 1.0]));
    let mut s = open(&format!("{}: window mass", r.config.ensemble));
    axes(&mut s, &f, "N", "mass in window");
    polyline(&mut s, &f, &pts, PALETTE[0], false);
    dots(&mut s, &f, &pts, PALETTE[0], 3.0);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scatter_is_deterministic_and_closed() {
        let pts = [(0.0, 1.0), (1.0, -1.0), (f64::NAN, 0.0)];
        let a = scatter("t", &pts, "x", "y");
        assert_eq!(a, scatter("t", &pts, "x", "y"));
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<circle").count(), 2);
    }

    #[test]
    fn heatmap_has_one_rect_per_cell() {
        let s = heatmap("h", &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], 2, 3, [-1.0, 1.0], [-1.0, 1.0]);
        assert_eq!(s.matches("<rect").count(), 6 + 1);
    }
}
