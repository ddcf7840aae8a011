//! Planar polygon primitives on `[f64; 2]` points: orientation, segment
//! intersection, simplicity, area and convex hulls.

pub type Pt = [f64; 2];

/// Twice the signed area of the triangle `abc`; positive for a left turn.
pub fn orient(a: Pt, b: Pt, c: Pt) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentRelation {
    Disjoint,
    /// Interiors cross at a single point.
    Proper,
    /// A single shared point that is an endpoint of at least one segment.
    Touch,
    /// Collinear with a shared stretch of positive length.
    Overlap,
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn on_segment(a: Pt, b: Pt, p: Pt) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Classifies segments `p1p2` and `q1q2` with floating-point orientation
/// signs (zero only on exact degeneracy).
pub fn classify_segments(p1: Pt, p2: Pt, q1: Pt, q2: Pt) -> SegmentRelation {
    if p1[0].max(p2[0]) < q1[0].min(q2[0])
        || q1[0].max(q2[0]) < p1[0].min(p2[0])
        || p1[1].max(p2[1]) < q1[1].min(q2[1])
        || q1[1].max(q2[1]) < p1[1].min(p2[1])
    {
        return SegmentRelation::Disjoint;
    }
    let d1 = sign(orient(q1, q2, p1));
    let d2 = sign(orient(q1, q2, p2));
    let d3 = sign(orient(p1, p2, q1));
    let d4 = sign(orient(p1, p2, q2));
    if d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0 {
        // Collinear: project onto the dominant axis of the union.
        let axis = if (p2[0] - p1[0]).abs() + (q2[0] - q1[0]).abs()
            >= (p2[1] - p1[1]).abs() + (q2[1] - q1[1]).abs()
        {
            0
        } else {
            1
        };
        let (a0, a1) = (p1[axis].min(p2[axis]), p1[axis].max(p2[axis]));
        let (b0, b1) = (q1[axis].min(q2[axis]), q1[axis].max(q2[axis]));
        let lo = a0.max(b0);
        let hi = a1.min(b1);
        return if hi > lo {
            SegmentRelation::Overlap
        } else if hi == lo {
            SegmentRelation::Touch
        } else {
            SegmentRelation::Disjoint
        };
    }
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return SegmentRelation::Proper;
    }
    if (d1 == 0 && on_segment(q1, q2, p1))
        || (d2 == 0 && on_segment(q1, q2, p2))
        || (d3 == 0 && on_segment(p1, p2, q1))
        || (d4 == 0 && on_segment(p1, p2, q2))
    {
        return SegmentRelation::Touch;
    }
    SegmentRelation::Disjoint
}

/// True when the closed polygon has no self-intersections: non-adjacent
/// edges are disjoint and adjacent edges share only their common vertex.
pub fn is_simple(points: &[Pt]) -> bool {
    let n = points.len();
    if n < 3 {
        return false;
    }
    let edge = |i: usize| (points[i], points[(i + 1) % n]);
    for i in 0..n {
        let (a, b) = edge(i);
        if a == b {
            return false;
        }
        // Adjacent edge: only a reversal along the same line overlaps.
        let (_, c) = edge((i + 1) % n);
        if orient(a, b, c) == 0.0 {
            let dot = (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]);
            if dot < 0.0 {
                return false;
            }
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (p, q) = edge(j);
            if classify_segments(a, b, p, q) != SegmentRelation::Disjoint {
                return false;
            }
        }
    }
    true
}

/// Shoelace area, positive for counterclockwise polygons.
pub fn signed_area(points: &[Pt]) -> f64 {
    let n = points.len();
    let mut twice = 0.0;
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        twice += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * twice
}

pub fn perimeter(points: &[Pt]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let a = points[i];
            let b = points[(i + 1) % n];
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .sum()
}

/// Convex hull by Andrew's monotone chain, counterclockwise, without
/// collinear vertices.
pub fn convex_hull(points: &[Pt]) -> Vec<Pt> {
    let mut pts: Vec<Pt> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Pt> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Pt>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

pub fn point_segment_distance(p: Pt, a: Pt, b: Pt) -> f64 {
    let e = [b[0] - a[0], b[1] - a[1]];
    let ee = e[0] * e[0] + e[1] * e[1];
    let t = if ee > 0.0 {
        (((p[0] - a[0]) * e[0] + (p[1] - a[1]) * e[1]) / ee).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + t * e[0], a[1] + t * e[1]];
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Distance from `p` to the boundary of a closed polygon.
pub fn boundary_distance(p: Pt, polygon: &[Pt]) -> f64 {
    let n = polygon.len();
    (0..n)
        .map(|i| point_segment_distance(p, polygon[i], polygon[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Membership in a counterclockwise convex polygon, allowing points up to
/// `slack` outside its boundary.
pub fn convex_contains(polygon: &[Pt], p: Pt, slack: f64) -> bool {
    let n = polygon.len();
    let inside = (0..n).all(|i| orient(polygon[i], polygon[(i + 1) % n], p) >= 0.0);
    inside || boundary_distance(p, polygon) <= slack
}
