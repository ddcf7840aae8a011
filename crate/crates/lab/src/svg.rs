//! Standalone SVG plots of curve snapshots.
//!
//! Output is a pure function of the input: coordinates are printed with a
//! fixed number of decimals and nothing depends on the clock or the
//! environment.

use std::fmt::Write as _;

use csflow_core::curve::ClosedCurve;

/// One snapshot to draw.
#[derive(Clone, Debug)]
pub struct PlotFrame<'a> {
    pub t: f64,
    pub curve: &'a ClosedCurve,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Style {
    /// Side of one square panel in pixels.
    pub panel: f64,
    pub padding: f64,
    pub curve_color: String,
    pub projection_color: String,
    pub stroke_width: f64,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            panel: 240.0,
            padding: 14.0,
            curve_color: "#202020".into(),
            projection_color: "#c0392b".into(),
            stroke_width: 1.2,
        }
    }
}

fn header(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
}

/// Maps a planar point set into a square panel, preserving aspect ratio.
struct View {
    ox: f64,
    oy: f64,
    cx: f64,
    cy: f64,
    scale: f64,
}

impl View {
    fn fit(points: &[[f64; 2]], x0: f64, y0: f64, style: &Style) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let inner = style.panel - 2.0 * style.padding;
        let scale = if span > 0.0 && span.is_finite() { inner / span } else { 1.0 };
        Self {
            ox: x0 + 0.5 * style.panel,
            oy: y0 + 0.5 * style.panel,
            cx: 0.5 * (lo[0] + hi[0]),
            cy: 0.5 * (lo[1] + hi[1]),
            scale,
        }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (self.ox + self.scale * (p[0] - self.cx), self.oy - self.scale * (p[1] - self.cy))
    }
}

fn closed_path(out: &mut String, view: &View, points: &[[f64; 2]], color: &str, width: f64) {
    let mut d = String::new();
    for (j, &p) in points.iter().enumerate() {
        let (x, y) = view.map(p);
        let _ = write!(d, "{}{x:.2},{y:.2}", if j == 0 { "M" } else { " L" });
    }
    d.push_str(" Z");
    let _ = writeln!(out, "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"/>");
}

/// Axis lines through the origin, where the origin is inside the panel.
fn axes(out: &mut String, view: &View, x0: f64, y0: f64, style: &Style) {
    let (ax, ay) = view.map([0.0, 0.0]);
    let (lo_x, hi_x, lo_y, hi_y) = (x0, x0 + style.panel, y0, y0 + style.panel);
    if (lo_y..=hi_y).contains(&ay) {
        let _ = writeln!(
            out,
            "<line x1=\"{lo_x:.2}\" y1=\"{ay:.2}\" x2=\"{hi_x:.2}\" y2=\"{ay:.2}\" stroke=\"#bbbbbb\" stroke-width=\"0.6\"/>"
        );
    }
    if (lo_x..=hi_x).contains(&ax) {
        let _ = writeln!(
            out,
            "<line x1=\"{ax:.2}\" y1=\"{lo_y:.2}\" x2=\"{ax:.2}\" y2=\"{hi_y:.2}\" stroke=\"#bbbbbb\" stroke-width=\"0.6\"/>"
        );
    }
}

fn label(out: &mut String, x: f64, y: f64, text: &str) {
    let _ = writeln!(out, "<text x=\"{x:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"11\">{text}</text>");
}

fn coords(curve: &ClosedCurve, a: usize, b: usize) -> Vec<[f64; 2]> {
    curve.points().map(|p| [p[a], p[b]]).collect()
}

/// A grid of panels, one column per frame. Planar frames get one row; frames
/// in ℝⁿ, n ≥ 3, get the xy-projection (in the projection color) above the
/// xz-projection. Each panel is scaled to its own frame.
///
/// An empty frame list gives an empty document and a warning.
pub fn emit_svg(frames: &[PlotFrame<'_>], style: &Style) -> String {
    let mut out = String::new();
    if frames.is_empty() {
        log::warn!("no frames to plot; writing an empty SVG document");
        header(&mut out, 0.0, 0.0);
        out.push_str("</svg>\n");
        return out;
    }
    let rows = if frames.iter().any(|f| f.curve.dim() >= 3) { 2 } else { 1 };
    header(&mut out, style.panel * frames.len() as f64, style.panel * rows as f64);
    for (col, f) in frames.iter().enumerate() {
        let x0 = style.panel * col as f64;
        let xy = coords(f.curve, 0, 1);
        let view = View::fit(&xy, x0, 0.0, style);
        axes(&mut out, &view, x0, 0.0, style);
        closed_path(&mut out, &view, &xy, &style.projection_color, style.stroke_width);
        label(&mut out, x0 + 4.0, 12.0, &format!("t = {:.4}", f.t));
        if rows == 2 && f.curve.dim() >= 3 {
            let xz = coords(f.curve, 0, 2);
            let view = View::fit(&xz, x0, style.panel, style);
            axes(&mut out, &view, x0, style.panel, style);
            closed_path(&mut out, &view, &xz, &style.curve_color, style.stroke_width);
            label(&mut out, x0 + 4.0, style.panel + 12.0, "xz");
        }
    }
    out.push_str("</svg>\n");
    out
}

/// One panel overlaying the selected frames: the space curve in an oblique
/// view and its xy-projection in the projection color, on shared axes.
pub fn emit_overlay(frames: &[PlotFrame<'_>], style: &Style) -> String {
    let mut out = String::new();
    if frames.is_empty() {
        log::warn!("no frames to plot; writing an empty SVG document");
        header(&mut out, 0.0, 0.0);
        out.push_str("</svg>\n");
        return out;
    }
    let side = 2.0 * style.panel;
    let big = Style { panel: side, ..style.clone() };
    // Oblique view: z drawn upwards, x and y foreshortened.
    let oblique = |p: &[f64]| {
        let z = p.get(2).copied().unwrap_or(0.0);
        [p[0] - 0.45 * p[1], 0.35 * p[1] + z]
    };
    let flat = |p: &[f64]| [p[0] - 0.45 * p[1], 0.35 * p[1]];
    let mut all: Vec<[f64; 2]> = Vec::new();
    for f in frames {
        all.extend(f.curve.points().map(oblique));
        all.extend(f.curve.points().map(flat));
    }
    header(&mut out, side, side);
    let view = View::fit(&all, 0.0, 0.0, &big);
    for f in frames {
        let space: Vec<[f64; 2]> = f.curve.points().map(oblique).collect();
        let shadow: Vec<[f64; 2]> = f.curve.points().map(flat).collect();
        closed_path(&mut out, &view, &shadow, &style.projection_color, style.stroke_width);
        closed_path(&mut out, &view, &space, &style.curve_color, style.stroke_width);
    }
    let times: Vec<String> = frames.iter().map(|f| format!("{:.4}", f.t)).collect();
    label(&mut out, 6.0, 14.0, &format!("t = {}", times.join(", ")));
    out.push_str("</svg>\n");
    out
}

/// Indices of `count` frames spread evenly over `0..len`, first and last
/// included.
pub fn pick_frames(len: usize, count: usize) -> Vec<usize> {
    if len == 0 || count == 0 {
        return Vec::new();
    }
    if count == 1 || len == 1 {
        return vec![len - 1];
    }
    let mut picks: Vec<usize> =
        (0..count).map(|i| ((i * (len - 1)) as f64 / (count - 1) as f64).round() as usize).collect();
    picks.dedup();
    picks
}
