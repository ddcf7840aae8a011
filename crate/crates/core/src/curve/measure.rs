use std::f64::consts::PI;

use super::{dist, dist2, ClosedCurve};
use crate::planar::{is_simple, signed_area};
use crate::{Error, Result};

pub fn polyline_length(curve: &ClosedCurve) -> f64 {
    curve.segment_lengths().iter().sum()
}

/// Largest distance between any two samples, by exhaustive scan.
pub fn diameter(curve: &ClosedCurve) -> f64 {
    let n = curve.len();
    let mut best = 0.0f64;
    for i in 0..n {
        let p = curve.point(i);
        for j in i + 1..n {
            best = best.max(dist2(p, curve.point(j)));
        }
    }
    best.sqrt()
}

pub fn diameter_and_length(curve: &ClosedCurve) -> (f64, f64) {
    (diameter(curve), polyline_length(curve))
}

/// A cheap lower bound on [`diameter`]: the larger of the widest coordinate
/// extent and a two-round farthest-point chain.
pub fn diameter_lower_bound(curve: &ClosedCurve) -> f64 {
    let dim = curve.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in curve.points() {
        for d in 0..dim {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let extent = (0..dim).map(|d| hi[d] - lo[d]).fold(0.0, f64::max);
    let farthest = |from: &[f64]| {
        curve
            .points()
            .enumerate()
            .map(|(j, p)| (j, dist2(from, p)))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    };
    let (a, _) = farthest(curve.point(0));
    let (b, _) = farthest(curve.point(a));
    extent.max(dist(curve.point(a), curve.point(b)))
}

/// Isoperimetric ratio `L² / (4π|A|)` of the xy-projection, which must be
/// a simple polygon.
pub fn roundness(planar: &ClosedCurve) -> Result<f64> {
    let pts: Vec<[f64; 2]> = planar.points().map(|p| [p[0], p[1]]).collect();
    if !is_simple(&pts) {
        return Err(Error::SelfIntersecting);
    }
    let length = polyline_length(&planar.project_xy());
    let area = signed_area(&pts).abs();
    Ok(length * length / (4.0 * PI * area))
}
