use serde::{Deserialize, Serialize};

use super::counts::cyclic_maxima;
use super::MILNOR_DIRECTIONS;
use crate::curve::{frame_geometry, projection_geometry, ClosedCurve, DEFAULT_C_FLOOR};
use crate::planar::{is_simple, signed_area, Pt};
use crate::Result;

/// Convexity notions of the xy-projection, each implying the one before
/// (`uniformly ⇒ strictly ⇒ convex ⇒ simple`).
///
/// `min_kbar` is measured with the traversal normalised to counterclockwise,
/// so a convex projection traversed clockwise still reports `min_kbar > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityVerdict {
    pub injective_projection: bool,
    pub simple: bool,
    pub convex: bool,
    pub strictly_convex: bool,
    pub uniformly_convex: bool,
    pub min_kbar: f64,
    pub min_c: f64,
    /// False when some sample has `c` below the floor; `k̄` is then only
    /// known on the remaining samples and uniform convexity is not claimed.
    pub projection_valid: bool,
}

fn injective(pts: &[Pt]) -> bool {
    let n = pts.len();
    let d2 = |a: Pt, b: Pt| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    let mut diam2: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            diam2 = diam2.max(d2(pts[i], pts[j]));
        }
    }
    let tol2 = 1e-18 * diam2;
    for i in 0..n {
        if pts[i] == pts[(i + 1) % n] {
            return false;
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if d2(pts[i], pts[j]) <= tol2 {
                return false;
            }
        }
    }
    true
}

/// Edge cross products `e_j × e_{j+1}` and whether each is numerically zero.
fn turn_signs(pts: &[Pt]) -> (bool, bool, bool) {
    let n = pts.len();
    let (mut pos, mut neg, mut flat) = (false, false, false);
    for j in 0..n {
        let (a, b, c) = (pts[j], pts[(j + 1) % n], pts[(j + 2) % n]);
        let e1 = [b[0] - a[0], b[1] - a[1]];
        let e2 = [c[0] - b[0], c[1] - b[1]];
        let cross = e1[0] * e2[1] - e1[1] * e2[0];
        let scale = (e1[0].hypot(e1[1])) * (e2[0].hypot(e2[1]));
        if cross.abs() <= 1e-12 * scale {
            flat = true;
        } else if cross > 0.0 {
            pos = true;
        } else {
            neg = true;
        }
    }
    (pos, neg, flat)
}

fn milnor_one(pts: &[Pt]) -> bool {
    (0..MILNOR_DIRECTIONS).all(|k| {
        let a = std::f64::consts::TAU * k as f64 / MILNOR_DIRECTIONS as f64;
        let (s, c) = a.sin_cos();
        let h: Vec<f64> = pts.iter().map(|p| c * p[0] + s * p[1]).collect();
        cyclic_maxima(&h, 1e-10) == 1
    })
}

/// Classifies the xy-projection of `curve`.
pub fn convexity_check(curve: &ClosedCurve) -> Result<ConvexityVerdict> {
    let pg = projection_geometry(curve, DEFAULT_C_FLOOR)?;
    let pts = &pg.planar_samples;
    let injective_projection = injective(pts);
    let simple = injective_projection && is_simple(pts);
    let (pos, neg, flat) = turn_signs(pts);
    let convex = simple && !(pos && neg) && milnor_one(pts);
    let strictly_convex = convex && !flat;
    let orientation = if signed_area(pts) < 0.0 { -1.0 } else { 1.0 };
    let min_kbar = pg
        .kbar
        .iter()
        .zip(&pg.valid)
        .filter(|(_, &ok)| ok)
        .map(|(k, _)| orientation * k)
        .fold(f64::INFINITY, f64::min);
    let projection_valid = pg.all_valid();
    let min_kbar = if min_kbar.is_finite() { min_kbar } else { f64::NAN };
    Ok(ConvexityVerdict {
        injective_projection,
        simple,
        convex,
        strictly_convex,
        uniformly_convex: strictly_convex && projection_valid && min_kbar > 0.0,
        min_kbar,
        min_c: pg.min_c(),
        projection_valid,
    })
}

/// `min_j |P_xy T_j|`: zero means a vertical tangent at sample resolution.
pub fn vertical_tangent_gap(curve: &ClosedCurve) -> Result<f64> {
    let fg = frame_geometry(curve)?;
    Ok((0..curve.len())
        .map(|j| {
            let t = fg.tangent(j);
            t[0].hypot(t[1])
        })
        .fold(f64::INFINITY, f64::min))
}
