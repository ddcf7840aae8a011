//! Closed polylines sampled on the uniform parameter grid `u_j = 2πj/N`.

mod geometry;
mod interp;
mod measure;
mod resample;
mod snapshot;

use std::f64::consts::TAU;

pub use geometry::{curvature_vectors, frame_geometry, projection_geometry, FrameGeometry, ProjectionGeometry};
pub use interp::ArclengthParam;
pub use measure::{diameter, diameter_and_length, diameter_lower_bound, polyline_length, roundness};
pub use resample::resample_uniform;
pub use snapshot::CurveSnapshot;

use crate::{Error, Result};

/// Samples below this count cannot resolve the periodic stencils.
pub const MIN_SAMPLES: usize = 8;

/// Default lower bound on `c = x_s² + y_s²` below which the projection frame
/// is declared invalid.
pub const DEFAULT_C_FLOOR: f64 = 1e-8;

/// A closed curve in ℝ^dim stored as `N` row-major samples with periodic
/// closure (sample `N` is sample `0`).
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedCurve {
    dim: usize,
    coords: Vec<f64>,
}

impl ClosedCurve {
    /// Builds a curve and checks every invariant, including discrete
    /// immersion (no two consecutive samples coincide).
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        let curve = Self::new_unchecked_immersion(dim, coords)?;
        if let Some(j) = curve.first_degenerate_segment() {
            return Err(Error::DegenerateSegment(j, (j + 1) % curve.len()));
        }
        Ok(curve)
    }

    /// Like [`ClosedCurve::new`] but tolerates coincident consecutive
    /// samples. Projections use this: a projected curve may fail to be
    /// immersed, which is reported by [`ClosedCurve::is_immersed`].
    pub fn new_unchecked_immersion(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::BadDimension(dim));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::Ragged { len: coords.len(), dim });
        }
        let n = coords.len() / dim;
        if n < MIN_SAMPLES {
            return Err(Error::TooFewSamples(n));
        }
        if let Some(k) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(k / dim));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (j, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::invalid(format!(
                    "sample {j} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords)
    }

    /// Samples `f` on the uniform grid `u_j = 2πj/n`. `f` writes the point
    /// for parameter `u` into the provided buffer.
    pub fn sample(dim: usize, n: usize, f: impl Fn(f64, &mut [f64])) -> Result<Self> {
        let mut coords = vec![0.0; dim * n];
        for (j, p) in coords.chunks_exact_mut(dim.max(1)).enumerate() {
            f(grid_parameter(j, n), p);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of samples `N`.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, j: usize) -> &[f64] {
        let j = j % self.len();
        &self.coords[j * self.dim..(j + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + DoubleEndedIterator + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Length of the segment from sample `j` to sample `j + 1` (cyclic).
    pub fn segment_length(&self, j: usize) -> f64 {
        dist(self.point(j), self.point(j + 1))
    }

    /// Lengths of all `N` segments, the closing one last.
    pub fn segment_lengths(&self) -> Vec<f64> {
        self.segments().map(|(a, b)| dist(a, b)).collect()
    }

    pub fn min_segment_length(&self) -> f64 {
        self.segments().map(|(a, b)| dist2(a, b)).fold(f64::INFINITY, f64::min).sqrt()
    }

    /// Consecutive sample pairs `(j, j + 1)` including the closing pair.
    fn segments(&self) -> impl Iterator<Item = (&[f64], &[f64])> + '_ {
        let closing = (self.point(self.len() - 1), self.point(0));
        self.coords.chunks_exact(self.dim).zip(self.coords[self.dim..].chunks_exact(self.dim)).chain([closing])
    }

    pub fn is_immersed(&self) -> bool {
        self.first_degenerate_segment().is_none()
    }

    fn first_degenerate_segment(&self) -> Option<usize> {
        self.segments().position(|(a, b)| a == b)
    }

    /// Keeps only the listed coordinates, in the given order.
    pub fn project(&self, coords: &[usize]) -> Result<ClosedCurve> {
        if coords.len() < 2 {
            return Err(Error::invalid("a projection needs at least two coordinates"));
        }
        if let Some(&bad) = coords.iter().find(|&&c| c >= self.dim) {
            return Err(Error::invalid(format!(
                "coordinate {bad} out of range for dimension {}",
                self.dim
            )));
        }
        let mut out = Vec::with_capacity(self.len() * coords.len());
        for p in self.points() {
            out.extend(coords.iter().map(|&c| p[c]));
        }
        ClosedCurve::new_unchecked_immersion(coords.len(), out)
    }

    /// Orthogonal projection onto the first two coordinates.
    pub fn project_xy(&self) -> ClosedCurve {
        self.project(&[0, 1]).expect("dim >= 2 always admits the xy projection")
    }

    /// Projection onto `(x, y, z_i)`, where `z_i` is coordinate `2 + i`.
    pub fn project_xyz(&self, i: usize) -> Result<ClosedCurve> {
        self.project(&[0, 1, 2 + i])
    }

    /// Pads with zero coordinates up to `dim`.
    pub fn embed(&self, dim: usize) -> Result<ClosedCurve> {
        if dim < self.dim {
            return Err(Error::invalid(format!("cannot embed ℝ^{} into ℝ^{dim}", self.dim)));
        }
        let mut out = Vec::with_capacity(self.len() * dim);
        for p in self.points() {
            out.extend_from_slice(p);
            out.extend(std::iter::repeat_n(0.0, dim - self.dim));
        }
        ClosedCurve::new_unchecked_immersion(dim, out)
    }

    /// Largest Euclidean norm of any sample.
    pub fn max_radius(&self) -> f64 {
        self.points().map(norm).fold(0.0, f64::max)
    }
}

/// The grid parameter `u_j = 2πj/n`.
pub fn grid_parameter(j: usize, n: usize) -> f64 {
    TAU * j as f64 / n as f64
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize) -> ClosedCurve {
        ClosedCurve::sample(2, n, |u, p| {
            p[0] = u.cos();
            p[1] = u.sin();
        })
        .unwrap()
    }

    #[test]
    fn rejects_short_and_degenerate_curves() {
        assert!(matches!(
            ClosedCurve::new(2, vec![0.0; 2 * 7]),
            Err(Error::TooFewSamples(7))
        ));
        assert!(matches!(ClosedCurve::new(1, vec![0.0; 8]), Err(Error::BadDimension(1))));
        let mut coords = circle(8).into_coords();
        coords[2] = coords[0];
        coords[3] = coords[1];
        assert!(matches!(ClosedCurve::new(2, coords), Err(Error::DegenerateSegment(0, 1))));
        assert!(matches!(ClosedCurve::new(2, vec![0.0; 17]), Err(Error::Ragged { .. })));
        let mut coords = circle(8).into_coords();
        coords[5] = f64::NAN;
        assert!(matches!(ClosedCurve::new(2, coords), Err(Error::NonFinite(2))));
    }

    #[test]
    fn point_indexing_is_cyclic() {
        let c = circle(16);
        assert_eq!(c.point(16), c.point(0));
        assert_eq!(c.point(17), c.point(1));
    }

    #[test]
    fn figure_eight_lift_projects_to_ellipse() {
        let lift = ClosedCurve::sample(3, 64, |u, p| {
            p[0] = u.cos();
            p[1] = 0.2 * u.sin();
            p[2] = (2.0 * u).sin();
        })
        .unwrap();
        let proj = lift.project_xy();
        assert_eq!(proj.dim(), 2);
        for (j, p) in proj.points().enumerate() {
            let u = grid_parameter(j, 64);
            assert_eq!(p, &[u.cos(), 0.2 * u.sin()]);
        }
    }

    #[test]
    fn planar_projection_is_identity() {
        let c = circle(32);
        assert_eq!(c.project_xy(), c);
    }

    #[test]
    fn wave_projection_is_small_circle() {
        let eps = 0.1;
        let wave = ClosedCurve::sample(5, 64, |u, p| {
            p[0] = eps * u.cos();
            p[1] = eps * u.sin();
            p[2] = u.cos();
            p[3] = 0.0;
            p[4] = (2.0 * u).sin();
        })
        .unwrap();
        for p in wave.project_xy().points() {
            assert!((norm(p) - eps).abs() < 1e-15);
        }
    }

    #[test]
    fn project_flags_instead_of_rejecting() {
        let eight = ClosedCurve::sample(3, 16, |u, p| {
            p[0] = u.cos();
            p[1] = 0.0;
            p[2] = (2.0 * u).sin();
        })
        .unwrap();
        let xz_only_x = eight.project(&[1, 1]).unwrap();
        assert!(!xz_only_x.is_immersed());
        assert!(eight.project(&[0, 3]).is_err());
    }
}
