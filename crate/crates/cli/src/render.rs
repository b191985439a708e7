//! Self-contained SVG drawings of rotated diagrams and limit shapes.
//!
//! Both axes are scaled by `1/n`, so the rotated `n x k` box has corners
//! `(0, 1)`, `(1, 0)`, `(c + 1, c)` and `(c, c + 1)` with `c = k / n`.

use std::fmt::Write;

use qkrawtchouk::asymptotics::LimitShape;
use qkrawtchouk::partitions::{complement_conjugate, profile, to_coords, Partition};

const SIZE: f64 = 600.0;
const MARGIN: f64 = 20.0;
const OVERLAY_POINTS: usize = 400;

struct Canvas {
    scale: f64,
    extent: f64,
    body: String,
}

impl Canvas {
    fn new(extent: f64) -> Self {
        Canvas {
            scale: SIZE / extent,
            extent,
            body: String::new(),
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (MARGIN + self.scale * x, MARGIN + self.scale * (self.extent - y))
    }

    fn points(&self, pts: &[(f64, f64)]) -> String {
        let mut s = String::new();
        for (i, &(x, y)) in pts.iter().enumerate() {
            let (u, v) = self.px(x, y);
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{u:.3},{v:.3}");
        }
        s
    }

    fn polygon(&mut self, pts: &[(f64, f64)], class: &str) {
        let p = self.points(pts);
        let _ = writeln!(self.body, r#"  <polygon class="{class}" points="{p}"/>"#);
    }

    fn polyline(&mut self, pts: &[(f64, f64)], class: &str) {
        let p = self.points(pts);
        let _ = writeln!(self.body, r#"  <polyline class="{class}" points="{p}"/>"#);
    }

    /// Rotated box outline and the axis frame `[0, c+1] x [0, c+1]`.
    fn frame(&mut self, c: f64) {
        let e = self.extent;
        self.polygon(&[(0.0, 0.0), (e, 0.0), (e, e), (0.0, e)], "axes");
        self.polygon(&[(0.0, 1.0), (1.0, 0.0), (c + 1.0, c), (c, c + 1.0)], "box");
    }

    fn finish(self, title: &str) -> String {
        let side = SIZE + 2.0 * MARGIN;
        format!(
            r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" viewBox="0 0 {side} {side}">
  <title>{title}</title>
  <style>
    .axes {{ fill: none; stroke: #bbb; stroke-width: 1 }}
    .box {{ fill: none; stroke: #888; stroke-width: 1; stroke-dasharray: 4 3 }}
    .profile {{ fill: none; stroke: #000; stroke-width: 2 }}
    .limit {{ fill: none; stroke: #c0392b; stroke-width: 2 }}
    .point {{ fill: #2c7bb6; stroke: none }}
    .dual {{ fill: #fdae61; stroke: none }}
  </style>
{body}</svg>
"#,
            body = self.body
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Sites with an ascending profile step: the coordinates of the
/// complement-conjugate diagram, in increasing order.
pub fn dual_sites(lambda: &Partition, n: usize, k: usize) -> qkrawtchouk::Result<Vec<u32>> {
    let dual = complement_conjugate(lambda, n, k)?;
    let mut sites = to_coords(&dual, k)?.coords().to_vec();
    sites.reverse();
    Ok(sites)
}

/// The rotated boundary of `lambda`, a right-triangle marker on every
/// descending step (the points `a_i`), a left-triangle marker on every
/// ascending step (the complement-conjugate points), and optionally the
/// analytic limit shape.
pub fn diagram_svg(
    lambda: &Partition,
    n: usize,
    k: usize,
    overlay: Option<&LimitShape>,
) -> qkrawtchouk::Result<String> {
    let prof = profile(lambda, n, k)?;
    let s = n as f64;
    let c = k as f64 / s;
    let mut canvas = Canvas::new(c + 1.0);
    canvas.frame(c);
    let h = |x: u32| prof.heights[x as usize] as f64;
    for &a in &prof.descents {
        let (x0, x1) = (a as f64 / s, (a + 1) as f64 / s);
        let (y0, y1) = (h(a) / s, h(a + 1) / s);
        canvas.polygon(&[(x0, y0), (x1, y1), (x0, y1)], "point");
    }
    for b in dual_sites(lambda, n, k)? {
        let (x0, x1) = (b as f64 / s, (b + 1) as f64 / s);
        let (y0, y1) = (h(b) / s, h(b + 1) / s);
        canvas.polygon(&[(x0, y0), (x1, y1), (x1, y0)], "dual");
    }
    canvas.polyline(&prof.scaled(), "profile");
    if let Some(shape) = overlay {
        canvas.polyline(&sample_curve(shape, c + 1.0), "limit");
    }
    let title = format!("lambda = {lambda}, n = {n}, k = {k}");
    Ok(canvas.finish(&escape(&title)))
}

/// The limit shape alone in its axis box.
pub fn limit_svg(shape: &LimitShape) -> String {
    let lp = shape.params();
    let mut canvas = Canvas::new(lp.length());
    canvas.frame(lp.c);
    canvas.polyline(&sample_curve(shape, lp.length()), "limit");
    let title = format!("limit shape, {} gamma = {}, c = {}", lp.spec, lp.gamma, lp.c);
    canvas.finish(&escape(&title))
}

fn sample_curve(shape: &LimitShape, length: f64) -> Vec<(f64, f64)> {
    (0..=OVERLAY_POINTS)
        .map(|i| {
            let x = length * i as f64 / OVERLAY_POINTS as f64;
            (x, shape.value(x))
        })
        .collect()
}
