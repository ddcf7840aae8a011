use std::f64::consts::{PI, TAU};

use super::{dist, norm, ClosedCurve};
use crate::{Error, Result};

/// Per-sample differential quantities of a space curve.
///
/// Derivatives use centered periodic differences; the curvature vector
/// `γ_ss` uses the three-point stencil with the actual (nonuniform)
/// neighbouring segment lengths.
#[derive(Clone, Debug)]
pub struct FrameGeometry {
    dim: usize,
    /// `|γ_u|` in length per radian.
    pub speed: Vec<f64>,
    tangent: Vec<f64>,
    curvature_vector: Vec<f64>,
    /// `k = |γ_ss|`.
    pub curvature: Vec<f64>,
    /// Cumulative arclength at each sample, `s_0 = 0`.
    pub arclength: Vec<f64>,
    pub segment_lengths: Vec<f64>,
    pub total_length: f64,
}

impl FrameGeometry {
    pub fn len(&self) -> usize {
        self.speed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speed.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tangent(&self, j: usize) -> &[f64] {
        &self.tangent[j * self.dim..(j + 1) * self.dim]
    }

    pub fn curvature_vector(&self, j: usize) -> &[f64] {
        &self.curvature_vector[j * self.dim..(j + 1) * self.dim]
    }

    /// Flat row-major `γ_ss`, the velocity of the flow.
    pub fn curvature_vectors(&self) -> &[f64] {
        &self.curvature_vector
    }

    pub fn max_curvature(&self) -> f64 {
        self.curvature.iter().copied().fold(0.0, f64::max)
    }

    /// Applies the same periodic nonuniform stencil to an arbitrary scalar
    /// field sampled on the curve, giving `f_ss`.
    pub fn second_derivative(&self, field: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|j| {
                let prev = (j + n - 1) % n;
                let next = (j + 1) % n;
                let a = self.segment_lengths[prev];
                let b = self.segment_lengths[j];
                2.0 * ((field[next] - field[j]) / b - (field[j] - field[prev]) / a) / (a + b)
            })
            .collect()
    }
}

/// Curvature vectors only, written into `out`, with the largest norm
/// returned. Bitwise identical to [`FrameGeometry::curvature_vectors`]; the
/// flow integrators call this once per step.
pub fn curvature_vectors(curve: &ClosedCurve, out: &mut Vec<f64>) -> Result<f64> {
    let n = curve.len();
    let dim = curve.dim();
    let x = curve.coords();
    out.clear();
    out.resize(n * dim, 0.0);
    let seg = |j: usize| {
        let (a, b) = (j * dim, if j + 1 == n { 0 } else { (j + 1) * dim });
        let mut s = 0.0;
        for d in 0..dim {
            let e = x[b + d] - x[a + d];
            s += e * e;
        }
        s.sqrt()
    };
    let mut before = seg(n - 1);
    let mut max2 = 0.0f64;
    for j in 0..n {
        let after = seg(j);
        if before == 0.0 || after == 0.0 {
            let k = if before == 0.0 { (j + n - 1) % n } else { j };
            return Err(Error::DegenerateSegment(k, (k + 1) % n));
        }
        let (p, h, q) = ((if j == 0 { n - 1 } else { j - 1 }) * dim, j * dim, (if j + 1 == n { 0 } else { j + 1 }) * dim);
        let kv = &mut out[h..h + dim];
        let mut k2 = 0.0;
        for d in 0..dim {
            let v = 2.0 * ((x[q + d] - x[h + d]) / after - (x[h + d] - x[p + d]) / before) / (before + after);
            kv[d] = v;
            k2 += v * v;
        }
        max2 = max2.max(k2);
        before = after;
    }
    Ok(max2.sqrt())
}

pub fn frame_geometry(curve: &ClosedCurve) -> Result<FrameGeometry> {
    let n = curve.len();
    let dim = curve.dim();
    let h = TAU / n as f64;
    let segment_lengths = curve.segment_lengths();
    if let Some(j) = segment_lengths.iter().position(|&l| l == 0.0) {
        return Err(Error::DegenerateSegment(j, (j + 1) % n));
    }
    let mut speed = Vec::with_capacity(n);
    let mut tangent = vec![0.0; n * dim];
    let mut curvature_vector = vec![0.0; n * dim];
    let mut curvature = Vec::with_capacity(n);
    for j in 0..n {
        let prev = curve.point(j + n - 1);
        let here = curve.point(j);
        let next = curve.point(j + 1);
        let chord = dist(prev, next);
        if chord == 0.0 {
            // Back-and-forth at a sample: no tangent is defined.
            return Err(Error::DegenerateSegment((j + n - 1) % n, (j + 1) % n));
        }
        speed.push(chord / (2.0 * h));
        let a = segment_lengths[(j + n - 1) % n];
        let b = segment_lengths[j];
        let t = &mut tangent[j * dim..(j + 1) * dim];
        let kv = &mut curvature_vector[j * dim..(j + 1) * dim];
        for d in 0..dim {
            t[d] = (next[d] - prev[d]) / chord;
            kv[d] = 2.0 * ((next[d] - here[d]) / b - (here[d] - prev[d]) / a) / (a + b);
        }
        curvature.push(norm(kv));
    }
    let mut arclength = Vec::with_capacity(n);
    let mut s = 0.0;
    for &l in &segment_lengths {
        arclength.push(s);
        s += l;
    }
    Ok(FrameGeometry {
        dim,
        speed,
        tangent,
        curvature_vector,
        curvature,
        arclength,
        segment_lengths,
        total_length: s,
    })
}

/// Geometry of the xy-projection `γ̄` parametrised by the space-curve
/// arclength.
///
/// Quantities at samples flagged invalid (vertical or near-vertical tangent,
/// or coincident projected neighbours) are `NaN`.
#[derive(Clone, Debug)]
pub struct ProjectionGeometry {
    pub planar_samples: Vec<[f64; 2]>,
    /// Signed curvature of `γ̄`, positive for counterclockwise convex
    /// traversal.
    pub kbar: Vec<f64>,
    /// Unwrapped tangent angle of `γ̄`.
    pub theta: Vec<f64>,
    /// Unit normal `N̄`, the tangent rotated by +π/2.
    pub nbar: Vec<[f64; 2]>,
    /// `c = x_s² + y_s²`.
    pub c: Vec<f64>,
    pub valid: Vec<bool>,
}

impl ProjectionGeometry {
    pub fn all_valid(&self) -> bool {
        self.valid.iter().all(|&v| v)
    }

    pub fn min_c(&self) -> f64 {
        self.c.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Sum of the wrapped angle increments around the closed grid, over
    /// valid samples only. Equals `2π × winding number` when all samples are
    /// valid.
    pub fn total_turning(&self) -> f64 {
        let valid: Vec<usize> = (0..self.theta.len()).filter(|&j| self.valid[j]).collect();
        let Some((&first, &last)) = valid.first().zip(valid.last()) else {
            return 0.0;
        };
        let open = self.theta[last] - self.theta[first];
        open + wrap_angle(self.theta[first] - self.theta[last])
    }

    pub fn winding_number(&self) -> i64 {
        (self.total_turning() / TAU).round() as i64
    }

    /// Minimum of `k̄` over valid samples, or `NaN` if none are valid.
    pub fn min_kbar(&self) -> f64 {
        self.valid_kbar().fold(f64::NAN, f64::min)
    }

    pub fn max_kbar(&self) -> f64 {
        self.valid_kbar().fold(f64::NAN, f64::max)
    }

    fn valid_kbar(&self) -> impl Iterator<Item = f64> + '_ {
        self.kbar.iter().zip(&self.valid).filter(|(_, &v)| v).map(|(&k, _)| k)
    }
}

/// Wraps an angle increment into `(−π, π]`.
pub(crate) fn wrap_angle(a: f64) -> f64 {
    let mut w = a % TAU;
    if w <= -PI {
        w += TAU;
    } else if w > PI {
        w -= TAU;
    }
    w
}

pub fn projection_geometry(curve: &ClosedCurve, c_floor: f64) -> Result<ProjectionGeometry> {
    let frame = frame_geometry(curve)?;
    let n = curve.len();
    let planar_samples: Vec<[f64; 2]> = curve.points().map(|p| [p[0], p[1]]).collect();
    let c: Vec<f64> = (0..n)
        .map(|j| {
            let t = frame.tangent(j);
            t[0] * t[0] + t[1] * t[1]
        })
        .collect();

    let mut kbar = vec![f64::NAN; n];
    let mut theta = vec![f64::NAN; n];
    let mut nbar = vec![[f64::NAN; 2]; n];
    let mut valid = vec![false; n];
    let mut raw_angle = vec![f64::NAN; n];
    for j in 0..n {
        let prev = planar_samples[(j + n - 1) % n];
        let here = planar_samples[j];
        let next = planar_samples[(j + 1) % n];
        let a = [here[0] - prev[0], here[1] - prev[1]];
        let b = [next[0] - here[0], next[1] - here[1]];
        let chord = [next[0] - prev[0], next[1] - prev[1]];
        let (la, lb, lc) = (a[0].hypot(a[1]), b[0].hypot(b[1]), chord[0].hypot(chord[1]));
        if c[j] < c_floor || la == 0.0 || lb == 0.0 || lc == 0.0 {
            continue;
        }
        valid[j] = true;
        // Signed Menger curvature of the three projected points.
        kbar[j] = 2.0 * (a[0] * b[1] - a[1] * b[0]) / (la * lb * lc);
        raw_angle[j] = chord[1].atan2(chord[0]);
        nbar[j] = [-chord[1] / lc, chord[0] / lc];
    }

    let mut prev_valid: Option<usize> = None;
    for j in 0..n {
        if !valid[j] {
            continue;
        }
        theta[j] = match prev_valid {
            None => raw_angle[j],
            Some(p) => theta[p] + wrap_angle(raw_angle[j] - raw_angle[p]),
        };
        prev_valid = Some(j);
    }

    Ok(ProjectionGeometry { planar_samples, kbar, theta, nbar, c, valid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{dot, grid_parameter, DEFAULT_C_FLOOR};

    fn circle(r: f64, n: usize, dim: usize) -> ClosedCurve {
        ClosedCurve::sample(dim, n, |u, p| {
            p[0] = r * u.cos();
            p[1] = r * u.sin();
        })
        .unwrap()
    }

    fn cardioid(eps: f64, n: usize) -> ClosedCurve {
        ClosedCurve::sample(3, n, |u, p| {
            let r = u.cos() + 1.0 - eps;
            p[0] = r * u.cos();
            p[1] = r * u.sin();
            p[2] = u.sin();
        })
        .unwrap()
    }

    #[test]
    fn circle_curvature_is_inverse_radius() {
        let g = frame_geometry(&circle(2.0, 512, 2)).unwrap();
        for &k in &g.curvature {
            assert!((k - 0.5).abs() < 1e-4, "k = {k}");
        }
        for j in 0..g.len() {
            assert!((norm(g.tangent(j)) - 1.0).abs() < 1e-12);
        }
        let sum: f64 = g.segment_lengths.iter().sum();
        assert!((g.total_length - sum).abs() < 1e-12);
    }

    #[test]
    fn cardioid_tangent_at_pi_is_vertical() {
        let g = frame_geometry(&cardioid(0.0, 512)).unwrap();
        let t = g.tangent(256);
        for (got, want) in t.iter().zip([0.0, 0.0, -1.0]) {
            assert!((got - want).abs() < 1e-4, "tangent {t:?}");
        }
    }

    #[test]
    fn back_and_forth_polyline_is_rejected() {
        // Alternating between two configurations gives coincident centered
        // neighbours at every other sample.
        let mut coords = Vec::new();
        for j in 0..8 {
            let x = if j % 2 == 0 { 0.0 } else { 1.0 };
            coords.extend_from_slice(&[x, 0.0]);
        }
        let c = ClosedCurve::new(2, coords).unwrap();
        assert!(frame_geometry(&c).is_err());
    }

    #[test]
    fn flat_circle_in_space_has_unit_c_and_kbar() {
        let pg = projection_geometry(&circle(1.0, 512, 3), DEFAULT_C_FLOOR).unwrap();
        assert!(pg.all_valid());
        for j in 0..512 {
            assert!((pg.c[j] - 1.0).abs() < 1e-12);
            assert!((pg.kbar[j] - 1.0).abs() < 1e-4);
        }
        assert_eq!(pg.winding_number(), 1);
    }

    #[test]
    fn cardioid_projection_invalid_at_vertical_tangent() {
        let pg = projection_geometry(&cardioid(0.0, 512), DEFAULT_C_FLOOR).unwrap();
        assert!(pg.c[256] < DEFAULT_C_FLOOR);
        assert!(!pg.valid[256]);
        assert!(pg.kbar[256].is_nan());
        assert_eq!(pg.valid.iter().filter(|v| !**v).count(), 1);
    }

    #[test]
    fn tilted_circle_c_matches_closed_form() {
        // Circle in the plane z = x: γ = (cos u, sin u, cos u),
        // γ_u = (−sin u, cos u, −sin u), so c = 1 / (1 + sin² u).
        let n = 512;
        let curve = ClosedCurve::sample(3, n, |u, p| {
            p[0] = u.cos();
            p[1] = u.sin();
            p[2] = u.cos();
        })
        .unwrap();
        let pg = projection_geometry(&curve, DEFAULT_C_FLOOR).unwrap();
        for j in 0..n {
            let s = grid_parameter(j, n).sin();
            let exact = 1.0 / (1.0 + s * s);
            assert!((pg.c[j] - exact).abs() < 1e-6, "j = {j}: {} vs {exact}", pg.c[j]);
        }
    }

    #[test]
    fn theta_matches_planar_tangent_and_turns_once() {
        let curve = ClosedCurve::sample(3, 400, |u, p| {
            p[0] = 2.0 * u.cos();
            p[1] = u.sin();
            p[2] = 0.3 * (3.0 * u).sin();
        })
        .unwrap();
        let pg = projection_geometry(&curve, DEFAULT_C_FLOOR).unwrap();
        for j in 0..400 {
            let prev = pg.planar_samples[(j + 399) % 400];
            let next = pg.planar_samples[(j + 1) % 400];
            let d = [next[0] - prev[0], next[1] - prev[1]];
            let l = d[0].hypot(d[1]);
            assert!((pg.theta[j].cos() - d[0] / l).abs() < 1e-6);
            assert!((pg.theta[j].sin() - d[1] / l).abs() < 1e-6);
            assert!(dot(&pg.nbar[j], &[d[0] / l, d[1] / l]).abs() < 1e-12);
        }
        assert!((pg.total_turning() - TAU).abs() < 1e-6);
        // Clockwise traversal flips the sign of k̄ and the turning.
        let reversed: Vec<Vec<f64>> = curve.points().rev().map(|p| p.to_vec()).collect();
        let rev = ClosedCurve::from_points(3, &reversed).unwrap();
        let pr = projection_geometry(&rev, DEFAULT_C_FLOOR).unwrap();
        assert!((pr.total_turning() + TAU).abs() < 1e-6);
        assert!(pr.max_kbar() < 0.0);
    }

    #[test]
    fn double_loop_turns_twice() {
        let curve = ClosedCurve::sample(2, 300, |u, p| {
            p[0] = (2.0 * u).cos();
            p[1] = (2.0 * u).sin();
        })
        .unwrap();
        assert_eq!(projection_geometry(&curve, DEFAULT_C_FLOOR).unwrap().winding_number(), 2);
    }

    #[test]
    fn second_derivative_of_coordinate_matches_curvature_vector() {
        let curve = cardioid(0.3, 256);
        let g = frame_geometry(&curve).unwrap();
        let x: Vec<f64> = curve.points().map(|p| p[0]).collect();
        let xss = g.second_derivative(&x);
        for j in 0..256 {
            assert!((xss[j] - g.curvature_vector(j)[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn lean_curvature_kernel_matches_frame_geometry() {
        let c = cardioid(0.3, 200);
        let g = frame_geometry(&c).unwrap();
        let mut kv = Vec::new();
        let max = curvature_vectors(&c, &mut kv).unwrap();
        assert_eq!(kv, g.curvature_vectors());
        assert_eq!(max, g.max_curvature());
        let mut coords = c.into_coords();
        coords.copy_within(..3, 3);
        let degenerate = ClosedCurve::new_unchecked_immersion(3, coords).unwrap();
        assert!(matches!(curvature_vectors(&degenerate, &mut kv), Err(Error::DegenerateSegment(0, 1))));
    }
}
