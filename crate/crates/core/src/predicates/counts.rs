use super::{Direction, Plane};
use crate::curve::{dot, frame_geometry, ClosedCurve};
use crate::{Error, Result};

/// Entries below this magnitude carry no sign.
pub const SIGN_ZERO_TOL: f64 = 1e-10;
/// A plane closer than this to a local extremum of the height is treated as
/// tangent to the curve.
pub const GRAZING_TOL: f64 = 1e-6;

fn check_dim(curve: &ClosedCurve, v: &Direction) -> Result<()> {
    if curve.dim() != v.dim() {
        return Err(Error::invalid(format!(
            "direction of dimension {} for a curve in ℝ^{}",
            v.dim(),
            curve.dim()
        )));
    }
    Ok(())
}

/// Strict local maxima of a cyclic sequence after merging plateaus (runs
/// whose consecutive entries differ by less than `tol`).
pub(crate) fn cyclic_maxima(h: &[f64], tol: f64) -> usize {
    let n = h.len();
    let Some(start) = (0..n).find(|&j| (h[j] - h[(j + n - 1) % n]).abs() >= tol) else {
        return 0;
    };
    let mut levels = vec![h[start]];
    for k in 1..n {
        let (prev, cur) = (h[(start + k - 1) % n], h[(start + k) % n]);
        if (cur - prev).abs() >= tol {
            levels.push(cur);
        }
    }
    let m = levels.len();
    if m < 2 {
        return 0;
    }
    (0..m).filter(|&i| levels[i] > levels[(i + m - 1) % m] && levels[i] > levels[(i + 1) % m]).count()
}

/// Milnor count `μ(γ, v)`: local maxima of the height `v·γ`.
pub fn mu_count(curve: &ClosedCurve, v: &Direction) -> Result<usize> {
    check_dim(curve, v)?;
    let h: Vec<f64> = curve.points().map(|p| dot(p, v.vector())).collect();
    Ok(cyclic_maxima(&h, 1e-10))
}

/// Cyclic sign changes of `values`, ignoring entries with `|x| < tol`.
pub fn cyclic_sign_changes(values: &[f64], tol: f64) -> usize {
    let signs: Vec<bool> = values.iter().filter(|x| x.abs() >= tol).map(|&x| x > 0.0).collect();
    let m = signs.len();
    if m < 2 {
        return 0;
    }
    (0..m).filter(|&i| signs[i] != signs[(i + 1) % m]).count()
}

/// Sign-changing number of `v·T` around the curve.
pub fn sign_change_count(curve: &ClosedCurve, v: &Direction) -> Result<usize> {
    check_dim(curve, v)?;
    let fg = frame_geometry(curve)?;
    let h: Vec<f64> = (0..curve.len()).map(|j| dot(fg.tangent(j), v.vector())).collect();
    Ok(cyclic_sign_changes(&h, SIGN_ZERO_TOL))
}

/// Intersections of a curve with a plane, and whether some near-tangency
/// makes the count fragile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlaneCount {
    pub count: usize,
    pub grazing: bool,
}

/// Counts crossings of `normal·γ = offset` on the first three coordinates:
/// every sign change between consecutive nonzero samples and every run of
/// zero samples counts once.
pub fn plane_intersection_count(curve: &ClosedCurve, plane: &Plane) -> Result<PlaneCount> {
    if curve.dim() < 3 {
        return Err(Error::BadDimension(curve.dim()));
    }
    let f: Vec<f64> = curve.points().map(|p| plane.signed_distance(p)).collect();
    let n = f.len();
    let zero = |x: f64| x.abs() < SIGN_ZERO_TOL;
    let Some(start) = (0..n).find(|&j| !zero(f[j])) else {
        return Ok(PlaneCount { count: n, grazing: true });
    };
    let mut count = 0;
    let mut in_zero_run = false;
    let mut last = f[start];
    for k in 1..=n {
        let x = f[(start + k) % n];
        if zero(x) {
            if !in_zero_run {
                count += 1;
                in_zero_run = true;
            }
            continue;
        }
        if !in_zero_run && (x > 0.0) != (last > 0.0) {
            count += 1;
        }
        in_zero_run = false;
        last = x;
    }
    let grazing = (0..n).any(|j| {
        let (a, b, c) = (f[(j + n - 1) % n], f[j], f[(j + 1) % n]);
        let extremum = (b >= a && b >= c) || (b <= a && b <= c);
        extremum && b.abs() < GRAZING_TOL
    });
    Ok(PlaneCount { count, grazing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicates::horizontal_directions;

    fn sample3(n: usize, f: impl Fn(f64) -> [f64; 3]) -> ClosedCurve {
        ClosedCurve::sample(3, n, |u, p| p.copy_from_slice(&f(u))).unwrap()
    }

    #[test]
    fn milnor_counts() {
        let ellipse = sample3(256, |u| [2.0 * u.cos(), u.sin(), 0.0]);
        for v in horizontal_directions(3, 24) {
            assert_eq!(mu_count(&ellipse, &v).unwrap(), 1);
        }
        let eight = sample3(256, |u| [u.cos(), 0.0, (2.0 * u).sin()]);
        assert_eq!(mu_count(&eight, &Direction::axis(3, 2).unwrap()).unwrap(), 2);
        let circle = sample3(100, |u| [u.cos(), u.sin(), 0.0]);
        assert_eq!(mu_count(&circle, &Direction::new(vec![0.3, -0.7, 0.1]).unwrap()).unwrap(), 1);
    }

    #[test]
    fn plateaus_merge() {
        // A flat top spread over several samples is one maximum.
        let h = [0.0, 1.0, 1.0, 1.0 + 1e-12, 1.0, 0.0, -1.0, -1.0];
        assert_eq!(cyclic_maxima(&h, 1e-10), 1);
        assert_eq!(cyclic_maxima(&[2.0; 8], 1e-10), 0);
        assert_eq!(cyclic_maxima(&[0.0, 1.0, 0.0, 1.0, 0.0, 1.0], 1e-10), 3);
    }

    #[test]
    fn sign_changes() {
        let ellipse = sample3(256, |u| [2.0 * u.cos(), u.sin(), 0.0]);
        for v in horizontal_directions(3, 16) {
            assert_eq!(sign_change_count(&ellipse, &v).unwrap(), 2);
        }
        let eight = sample3(256, |u| [u.cos(), 0.0, (2.0 * u).sin()]);
        assert_eq!(sign_change_count(&eight, &Direction::axis(3, 2).unwrap()).unwrap(), 4);
        assert_eq!(sign_change_count(&ellipse, &Direction::axis(3, 2).unwrap()).unwrap(), 0);
        assert_eq!(cyclic_sign_changes(&[1.0, 0.0, -1.0, 1e-12, 1.0], 1e-10), 2);
    }

    #[test]
    fn plane_counts() {
        let cardioid = sample3(512, |u| [(u.cos() + 1.0) * u.cos(), (u.cos() + 1.0) * u.sin(), u.sin()]);
        let y0 = Plane::new([0.0, 1.0, 0.0], 0.0).unwrap();
        assert_eq!(plane_intersection_count(&cardioid, &y0).unwrap().count, 2);
        let lift = sample3(512, |u| [u.cos(), 0.2 * u.sin(), (2.0 * u).sin()]);
        let z = |o| Plane::new([0.0, 0.0, 1.0], o).unwrap();
        assert_eq!(plane_intersection_count(&lift, &z(2.0)).unwrap(), PlaneCount { count: 0, grazing: false });
        let c = plane_intersection_count(&lift, &z(0.0)).unwrap();
        assert_eq!(c, PlaneCount { count: 4, grazing: false });
        // The plane z = 1 touches the tops of sin 2u.
        assert!(plane_intersection_count(&lift, &z(1.0)).unwrap().grazing);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let c = sample3(16, |u| [u.cos(), u.sin(), 0.0]);
        assert!(mu_count(&c, &Direction::horizontal(2, 0.0)).is_err());
    }
}
