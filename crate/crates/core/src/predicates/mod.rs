//! Checkable geometric predicates: convexity notions of the projection,
//! Milnor and Sturm counts, plane intersection counts, slopes and the
//! three-point estimator.

mod convexity;
mod counts;
mod slopes;

pub use convexity::{convexity_check, vertical_tangent_gap, ConvexityVerdict};
pub use counts::{
    cyclic_sign_changes, mu_count, plane_intersection_count, sign_change_count, PlaneCount, GRAZING_TOL,
    SIGN_ZERO_TOL,
};
pub use slopes::{
    check_diameter_bound, line_slope, plane_slope, slope_profile, triple_plane_slope, SlopeSummary,
    TRIPLE_SEED,
};

use std::f64::consts::TAU;

use crate::curve::norm;
use crate::{Error, Result};

/// A unit direction in ℝ^dim. Horizontal directions have no component
/// beyond the xy-plane.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction {
    v: Vec<f64>,
    horizontal: bool,
}

impl Direction {
    /// Normalises `v`; rejects the zero vector.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if v.len() < 2 || !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("a direction needs a finite nonzero vector of dimension ≥ 2"));
        }
        let v: Vec<f64> = v.into_iter().map(|x| x / n).collect();
        let horizontal = v[2..].iter().all(|&x| x == 0.0);
        Ok(Self { v, horizontal })
    }

    /// `(cos a, sin a, 0, …)` in ℝ^dim.
    pub fn horizontal(dim: usize, angle: f64) -> Self {
        let mut v = vec![0.0; dim.max(2)];
        v[0] = angle.cos();
        v[1] = angle.sin();
        Self { v, horizontal: true }
    }

    /// The coordinate axis `e_i` in ℝ^dim.
    pub fn axis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::invalid(format!("axis {i} out of range for dimension {dim}")));
        }
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self::new(v)
    }

    pub fn vector(&self) -> &[f64] {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn is_horizontal(&self) -> bool {
        self.horizontal
    }

    pub fn negated(&self) -> Self {
        Self { v: self.v.iter().map(|x| -x).collect(), horizontal: self.horizontal }
    }
}

/// `count` equispaced horizontal directions, starting along the x-axis.
pub fn horizontal_directions(dim: usize, count: usize) -> Vec<Direction> {
    (0..count).map(|k| Direction::horizontal(dim, TAU * k as f64 / count as f64)).collect()
}

/// The Sturm test net: 16 horizontal directions plus the z-axis when
/// `dim ≥ 3`.
pub fn sturm_directions(dim: usize) -> Vec<Direction> {
    let mut dirs = horizontal_directions(dim, 16);
    if dim >= 3 {
        dirs.push(Direction::axis(dim, 2).expect("dim >= 3"));
    }
    dirs
}

/// Number of planar directions used by the Milnor convexity test.
pub const MILNOR_DIRECTIONS: usize = 64;

/// The plane `{p ∈ ℝ³ : normal·p = offset}` with a unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    normal: [f64; 3],
    offset: f64,
}

impl Plane {
    /// Normalises `normal` (and scales `offset` with it).
    pub fn new(normal: [f64; 3], offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if !(n > 0.0) || !n.is_finite() || !offset.is_finite() {
            return Err(Error::invalid("a plane needs a finite nonzero normal"));
        }
        Ok(Self { normal: normal.map(|x| x / n), offset: offset / n })
    }

    pub fn normal(&self) -> [f64; 3] {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Signed distance of `p` (first three coordinates) to the plane.
    pub fn signed_distance(&self, p: &[f64]) -> f64 {
        self.normal[0] * p[0] + self.normal[1] * p[1] + self.normal[2] * p[2] - self.offset
    }
}
