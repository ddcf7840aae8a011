use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Plane;
use crate::curve::{diameter, frame_geometry, ClosedCurve};
use crate::{Error, Result};

/// Seed of the triple sampler; every frame draws the same index triples.
pub const TRIPLE_SEED: u64 = 0x5eed_7419;

fn slope(dx: f64, dy: f64, dz: f64, len: f64) -> f64 {
    let h = dx.hypot(dy);
    if h < 1e-14 * len {
        f64::INFINITY
    } else {
        dz.abs() / h
    }
}

/// Slope `|Δz| / |Δ(x, y)|` of the line through `p` and `q` in ℝ³;
/// `+∞` for vertical lines.
pub fn line_slope(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != 3 || q.len() != 3 {
        return Err(Error::invalid("line slope needs two points in ℝ³"));
    }
    let d = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
    let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if len == 0.0 {
        return Err(Error::invalid("line slope needs two distinct points"));
    }
    Ok(slope(d[0], d[1], d[2], len))
}

fn normal_slope(n: [f64; 3]) -> f64 {
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if n[2].abs() < 1e-14 * len {
        f64::INFINITY
    } else {
        n[0].hypot(n[1]) / n[2].abs()
    }
}

/// Slope of a plane: tangent of its dihedral angle with the xy-plane.
pub fn plane_slope(plane: &Plane) -> f64 {
    normal_slope(plane.normal())
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Slope of the plane through three points, or `None` when they are
/// collinear within `10⁻¹²` relative.
pub fn triple_plane_slope(p: &[f64], q: &[f64], r: &[f64]) -> Option<f64> {
    let (a, b) = (sub(q, p), sub(r, p));
    let n = cross(a, b);
    if norm3(n) <= 1e-12 * norm3(a) * norm3(b) {
        return None;
    }
    Some(normal_slope(n))
}

/// Per-frame slope maxima. Infinite values serialise as `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeSummary {
    #[serde(with = "inf_f64")]
    pub s_tangent_max: f64,
    #[serde(with = "inf_f64")]
    pub s_secant_max: f64,
    /// `None` when some sample has vanishing curvature.
    #[serde(with = "inf_opt")]
    pub s_osculating_max: Option<f64>,
    #[serde(with = "inf_f64")]
    pub delta_triple: f64,
    pub budget_used: u64,
}

/// Squared plane slope of the triple, compared without square roots.
fn triple_slope2(p: &[f64], q: &[f64], r: &[f64]) -> Option<f64> {
    let (a, b) = (sub(q, p), sub(r, p));
    let n = cross(a, b);
    let nn = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
    let aa = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
    let bb = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
    if nn <= 1e-24 * aa * bb {
        return None;
    }
    if n[2] * n[2] < 1e-28 * nn {
        return Some(f64::INFINITY);
    }
    Some((n[0] * n[0] + n[1] * n[1]) / (n[2] * n[2]))
}

struct TripleMax<'a> {
    coords: &'a [f64],
    best2: f64,
    used: u64,
}

impl TripleMax<'_> {
    fn visit(&mut self, i: usize, j: usize, k: usize) {
        self.used += 1;
        if i == j || j == k || i == k {
            return;
        }
        let c = self.coords;
        if let Some(s2) = triple_slope2(&c[3 * i..3 * i + 3], &c[3 * j..3 * j + 3], &c[3 * k..3 * k + 3]) {
            self.best2 = self.best2.max(s2);
        }
    }
}

/// Slope maxima over tangents, secants, osculating planes and planes
/// through sample triples of a curve in ℝ³.
///
/// The triple maximum is exhaustive when `C(N, 3) ≤ triple_budget`.
/// Otherwise it examines, in order: equispaced triples `(j, j+k, j+2k)` for
/// `k = 1, 2, 4, …`; the steepest secant pair with every other sample; and
/// seeded uniform random triples filling the rest of the budget. Each sample
/// tangent is a secant and the steepest secant lies in some examined plane,
/// so `s_tangent_max ≤ s_secant_max ≤ delta_triple`.
pub fn slope_profile(curve: &ClosedCurve, triple_budget: u64) -> Result<SlopeSummary> {
    if curve.dim() != 3 {
        return Err(Error::BadDimension(curve.dim()));
    }
    let n = curve.len();
    let fg = frame_geometry(curve)?;
    let s_tangent_max = (0..n)
        .map(|j| {
            let t = fg.tangent(j);
            slope(t[0], t[1], t[2], 1.0)
        })
        .fold(0.0, f64::max);

    // Squared slopes avoid a root per pair.
    let coords = curve.coords();
    let mut secant2: f64 = 0.0;
    let mut steepest = (0, 1);
    for i in 0..n {
        let p = &coords[3 * i..3 * i + 3];
        for j in i + 1..n {
            let d = sub(&coords[3 * j..3 * j + 3], p);
            let h2 = d[0] * d[0] + d[1] * d[1];
            let len2 = h2 + d[2] * d[2];
            if len2 == 0.0 {
                continue;
            }
            let s2 = if h2 < 1e-28 * len2 { f64::INFINITY } else { d[2] * d[2] / h2 };
            if s2 > secant2 {
                secant2 = s2;
                steepest = (i, j);
            }
        }
    }
    let s_secant_max = secant2.sqrt();

    let s_osculating_max = if fg.curvature.iter().any(|&k| k < 1e-12) {
        None
    } else {
        Some(
            (0..n)
                .map(|j| {
                    let t = fg.tangent(j);
                    let k = fg.curvature_vector(j);
                    normal_slope(cross([t[0], t[1], t[2]], [k[0], k[1], k[2]]))
                })
                .fold(0.0, f64::max),
        )
    };

    let mut acc = TripleMax { coords, best2: 0.0, used: 0 };
    let total = (n as u64) * (n as u64 - 1) * (n as u64 - 2) / 6;
    if total <= triple_budget {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    acc.visit(i, j, k);
                }
            }
        }
    } else {
        let mut stride = 1;
        while 2 * stride < n && acc.used + n as u64 <= triple_budget {
            for j in 0..n {
                acc.visit(j, (j + stride) % n, (j + 2 * stride) % n);
            }
            stride *= 2;
        }
        let (a, b) = steepest;
        for k in 0..n {
            if k != a && k != b {
                acc.visit(a, b, k);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(TRIPLE_SEED);
        while acc.used < triple_budget {
            let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            acc.visit(i, j, k);
        }
    }

    Ok(SlopeSummary {
        s_tangent_max,
        s_secant_max,
        s_osculating_max,
        delta_triple: acc.best2.sqrt(),
        budget_used: acc.used,
    })
}

/// `diam γ ≤ √(1 + Δ²) · diam γ̄` (with `10⁻⁹` slack).
pub fn check_diameter_bound(curve: &ClosedCurve, delta: f64) -> bool {
    diameter(curve) <= (1.0 + delta * delta).sqrt() * diameter(&curve.project_xy()) + 1e-9
}

mod inf_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub(super) enum Repr {
        Num(f64),
        Tag(String),
    }

    pub(super) fn to_repr(x: f64) -> Repr {
        if x.is_finite() {
            Repr::Num(x)
        } else if x > 0.0 {
            Repr::Tag("inf".into())
        } else if x < 0.0 {
            Repr::Tag("-inf".into())
        } else {
            Repr::Tag("nan".into())
        }
    }

    pub(super) fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Tag(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!("expected a number or \"inf\", got {other:?}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }
}

mod inf_opt {
    use super::inf_f64::{from_repr, to_repr, Repr};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        x.map(to_repr).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<Repr>::deserialize(d)?.map(from_repr).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample3(n: usize, f: impl Fn(f64) -> [f64; 3]) -> ClosedCurve {
        ClosedCurve::sample(3, n, |u, p| p.copy_from_slice(&f(u))).unwrap()
    }

    #[test]
    fn line_slopes() {
        assert_eq!(line_slope(&[0.0, 0.0, 0.0], &[1.0, 0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(line_slope(&[0.0, 0.0, 0.0], &[0.0, 0.0, 3.0]).unwrap(), f64::INFINITY);
        assert_eq!(line_slope(&[0.0, 0.0, 0.0], &[3.0, 4.0, 5.0]).unwrap(), 1.0);
        assert!(line_slope(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn plane_slopes() {
        assert_eq!(plane_slope(&Plane::new([0.0, 0.0, 1.0], 0.0).unwrap()), 0.0);
        assert_eq!(plane_slope(&Plane::new([1.0, 0.0, 0.0], 0.0).unwrap()), f64::INFINITY);
        assert!((plane_slope(&Plane::new([1.0, 0.0, -1.0], 0.0).unwrap()) - 1.0).abs() < 1e-15);
    }

    /// Independent brute force over all triples.
    fn brute_triples(c: &ClosedCurve) -> f64 {
        let pts: Vec<&[f64]> = c.points().collect();
        let mut best: f64 = 0.0;
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                for k in 0..pts.len() {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let (a, b) = (sub(pts[j], pts[i]), sub(pts[k], pts[i]));
                    let m = cross(a, b);
                    if norm3(m) > 1e-9 * norm3(a) * norm3(b) {
                        best = best.max(m[0].hypot(m[1]) / m[2].abs());
                    }
                }
            }
        }
        best
    }

    #[test]
    fn tilted_plane_has_uniform_slope() {
        let m = 0.7;
        let c = sample3(64, |u| [u.cos(), 0.6 * u.sin(), m * u.cos()]);
        let s = slope_profile(&c, 200_000).unwrap();
        assert_eq!(s.budget_used, 64 * 63 * 62 / 6);
        assert!((s.delta_triple - m).abs() < 1e-6);
        assert!((brute_triples(&c) - m).abs() < 1e-6);
        assert!((s.s_osculating_max.unwrap() - m).abs() < 1e-6);
        assert!(s.s_tangent_max <= m + 1e-9 && s.s_secant_max <= m + 1e-9);
        assert!((s.s_secant_max - m).abs() < 1e-6);
    }

    #[test]
    fn flat_curve_has_zero_slopes() {
        let s = slope_profile(&sample3(64, |u| [u.cos(), u.sin(), 0.0]), 1000).unwrap();
        assert_eq!((s.s_tangent_max, s.s_secant_max, s.delta_triple), (0.0, 0.0, 0.0));
        assert_eq!(s.s_osculating_max, Some(0.0));
        assert_eq!(s.budget_used, 1000);
    }

    #[test]
    fn sampled_chain_holds_and_is_deterministic() {
        let c = sample3(512, |u| [u.cos(), 0.2 * u.sin(), (2.0 * u).sin()]);
        let s = slope_profile(&c, 200_000).unwrap();
        assert!(s.s_tangent_max <= s.s_secant_max + 1e-9);
        assert!(s.s_secant_max <= s.delta_triple + 1e-9);
        assert_eq!(s.budget_used, 200_000);
        assert_eq!(slope_profile(&c, 200_000).unwrap(), s);
    }

    #[test]
    fn flat_stretch_disables_osculating_slope() {
        let pts: Vec<Vec<f64>> = (0..12)
            .map(|k| {
                let (a, b) = ([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]][k / 3], k % 3);
                let c = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]][k / 3];
                let s = b as f64 / 3.0;
                vec![a[0] + s * c[0], a[1] + s * c[1], 0.0]
            })
            .collect();
        let s = slope_profile(&ClosedCurve::from_points(3, &pts).unwrap(), 10).unwrap();
        assert_eq!(s.s_osculating_max, None);
    }

    #[test]
    fn infinite_slopes_serialise_as_tags() {
        let s = SlopeSummary {
            s_tangent_max: 1.5,
            s_secant_max: f64::INFINITY,
            s_osculating_max: None,
            delta_triple: f64::INFINITY,
            budget_used: 3,
        };
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"s_secant_max\":\"inf\""));
        let back: SlopeSummary = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn diameter_bound() {
        let flat = sample3(64, |u| [u.cos(), u.sin(), 0.0]);
        assert!(check_diameter_bound(&flat, 0.0));
        let tilted = sample3(64, |u| [u.cos(), u.sin(), u.cos()]);
        assert!(check_diameter_bound(&tilted, 1.0));
        assert!(!check_diameter_bound(&tilted, 0.9));
        let tall = sample3(64, |u| [0.1 * u.cos(), 0.1 * u.sin(), (2.0 * u).sin()]);
        assert!(!check_diameter_bound(&tall, 0.0));
    }
}
