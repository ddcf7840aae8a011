//! Tracking the limit region: convex hulls `D(t)` of the projected frames,
//! their nesting, and Hausdorff distances between consecutive hulls.

use csflow_core::flow::FrameSeries;
use csflow_core::planar::{boundary_distance, convex_contains, convex_hull, perimeter, signed_area, Pt};
use csflow_core::predicates::convexity_check;
use serde::Serialize;

/// Boundary samples per hull for the Hausdorff distance.
pub const HAUSDORFF_SAMPLES: usize = 512;
/// Hull vertices may lie this far outside the previous hull.
pub const NESTING_SLACK: f64 = 1e-6;
/// Relative tolerance for the hull area to decrease.
pub const AREA_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HullFrame {
    /// Index into the series.
    pub frame: usize,
    pub t: f64,
    pub hull: Vec<Pt>,
    pub area: f64,
    /// `None` for the first tracked frame.
    pub hausdorff_to_prev: Option<f64>,
    pub nested_in_prev: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitRegionTrack {
    pub frames: Vec<HullFrame>,
    /// Frames left out because their projection is not convex.
    pub excluded: Vec<(usize, String)>,
    /// Diameter of the last tracked hull, the proxy for `D = ∩ D(t)`.
    pub diam_d: f64,
    pub nesting_holds: bool,
    pub areas_decrease: bool,
}

fn hull_diameter(hull: &[Pt]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            best = best.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    best
}

/// `count` points spread evenly by arclength along a closed polygon.
fn boundary_samples(polygon: &[Pt], count: usize) -> Vec<Pt> {
    let n = polygon.len();
    if n < 2 {
        return polygon.to_vec();
    }
    let total = perimeter(polygon);
    let step = total / count as f64;
    let mut out = Vec::with_capacity(count);
    let (mut edge, mut start) = (0, 0.0);
    for k in 0..count {
        let s = k as f64 * step;
        loop {
            let (a, b) = (polygon[edge], polygon[(edge + 1) % n]);
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            if s <= start + len || edge == n - 1 {
                let u = if len > 0.0 { ((s - start) / len).clamp(0.0, 1.0) } else { 0.0 };
                out.push([a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])]);
                break;
            }
            start += len;
            edge += 1;
        }
    }
    out
}

/// Hausdorff distance of two convex bodies through their boundaries, with
/// each boundary sampled at [`HAUSDORFF_SAMPLES`] points.
pub fn hull_hausdorff(a: &[Pt], b: &[Pt]) -> f64 {
    if a == b {
        return 0.0;
    }
    let directed = |from: &[Pt], to: &[Pt]| {
        boundary_samples(from, HAUSDORFF_SAMPLES)
            .into_iter()
            .map(|p| boundary_distance(p, to))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Builds the hull track over the frames whose projection is convex.
pub fn limit_region_summary(series: &FrameSeries) -> LimitRegionTrack {
    let mut frames: Vec<HullFrame> = Vec::new();
    let mut excluded = Vec::new();
    for (i, f) in series.frames.iter().enumerate() {
        match convexity_check(&f.curve) {
            Ok(v) if v.convex => {}
            Ok(_) => {
                excluded.push((i, "projection is not convex".to_string()));
                continue;
            }
            Err(e) => {
                excluded.push((i, e.to_string()));
                continue;
            }
        }
        let pts: Vec<Pt> = f.curve.points().map(|p| [p[0], p[1]]).collect();
        let hull = convex_hull(&pts);
        let area = signed_area(&hull).abs();
        let (hausdorff_to_prev, nested_in_prev) = match frames.last() {
            Some(prev) => (
                Some(hull_hausdorff(&prev.hull, &hull)),
                hull.iter().all(|&p| convex_contains(&prev.hull, p, NESTING_SLACK)),
            ),
            None => (None, true),
        };
        frames.push(HullFrame { frame: i, t: f.t, hull, area, hausdorff_to_prev, nested_in_prev });
    }
    let nesting_holds = frames.iter().all(|f| f.nested_in_prev);
    let areas_decrease = frames.windows(2).all(|w| w[1].area < w[0].area * (1.0 + AREA_TOL));
    let diam_d = frames.last().map_or(f64::NAN, |f| hull_diameter(&f.hull));
    LimitRegionTrack { frames, excluded, diam_d, nesting_holds, areas_decrease }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(s: f64) -> Vec<Pt> {
        vec![[0.0, 0.0], [s, 0.0], [s, s], [0.0, s]]
    }

    #[test]
    fn boundary_samples_are_evenly_spaced() {
        let pts = boundary_samples(&square(1.0), 8);
        assert_eq!(pts.len(), 8);
        assert_eq!(pts[0], [0.0, 0.0]);
        assert!((pts[1][0] - 0.5).abs() < 1e-15);
        assert!((pts[2][0] - 1.0).abs() < 1e-15 && pts[2][1].abs() < 1e-15);
        assert!((pts[5][1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_of_nested_squares() {
        let outer = square(2.0);
        let inner: Vec<Pt> = square(1.0).iter().map(|p| [p[0] + 0.5, p[1] + 0.5]).collect();
        assert!((hull_hausdorff(&outer, &inner) - 0.5 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(hull_hausdorff(&outer, &outer), 0.0);
    }

    #[test]
    fn diameter_of_a_square_is_its_diagonal() {
        assert!((hull_diameter(&square(1.0)) - 2f64.sqrt()).abs() < 1e-15);
    }
}
