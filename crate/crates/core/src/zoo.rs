//! Constructors for the named curve families and generic lifts.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{dot, grid_parameter, resample_uniform, ClosedCurve};
use crate::predicates::{convexity_check, mu_count, Direction};
use crate::{Error, Result};

/// `(cos u, ε sin u, sin 2u)`; `ε = 0` is the planar figure eight.
pub fn figure_eight_lift(eps: f64, n: usize) -> Result<ClosedCurve> {
    ClosedCurve::sample(3, n, |u, p| {
        p[0] = u.cos();
        p[1] = eps * u.sin();
        p[2] = (2.0 * u).sin();
    })
}

/// `((cos u + 1 − ε) cos u, (cos u + 1 − ε) sin u, sin u)`. `n` must be even
/// so that `u = π` is the grid node `n/2`.
pub fn cardioid_lift(eps: f64, n: usize) -> Result<ClosedCurve> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::invalid(format!("cardioid eps must lie in [0, 1), got {eps}")));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::invalid("cardioid lift needs an even sample count (a node at u = π)"));
    }
    ClosedCurve::sample(3, n, |u, p| {
        let r = u.cos() + 1.0 - eps;
        p[0] = r * u.cos();
        p[1] = r * u.sin();
        p[2] = u.sin();
    })
}

/// `(ε cos u, ε sin u, base(u))` for a base given as a function on the
/// circle with values in ℝ^`base_dim`.
pub fn wave_lift(base_dim: usize, eps: f64, n: usize, base: impl Fn(f64, &mut [f64])) -> Result<ClosedCurve> {
    if eps == 0.0 || !eps.is_finite() {
        return Err(Error::invalid("wave approximation needs a finite nonzero eps"));
    }
    ClosedCurve::sample(base_dim + 2, n, |u, p| {
        p[0] = eps * u.cos();
        p[1] = eps * u.sin();
        base(u, &mut p[2..]);
    })
}

/// The wave approximation of a sampled curve, resampled to `n` points first
/// when its sample count differs.
pub fn wave_approximation(base: &ClosedCurve, eps: f64, n: usize) -> Result<ClosedCurve> {
    if eps == 0.0 || !eps.is_finite() {
        return Err(Error::invalid("wave approximation needs a finite nonzero eps"));
    }
    let base = if base.len() == n { base.clone() } else { resample_uniform(base, n)? };
    let mut coords = Vec::with_capacity(n * (base.dim() + 2));
    for (j, p) in base.points().enumerate() {
        let u = grid_parameter(j, n);
        coords.extend_from_slice(&[eps * u.cos(), eps * u.sin()]);
        coords.extend_from_slice(p);
    }
    ClosedCurve::new(base.dim() + 2, coords)
}

/// An orthonormal basis of `v⊥` in ℝⁿ by Gram–Schmidt on the axes.
fn complement_basis(v: &[f64]) -> Vec<Vec<f64>> {
    let n = v.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    let skip = (0..n).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(0);
    for i in (0..n).filter(|&i| i != skip) {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let proj = dot(&e, v);
        for (x, y) in e.iter_mut().zip(v) {
            *x -= proj * y;
        }
        for b in &basis {
            let proj = dot(&e, b);
            for (x, y) in e.iter_mut().zip(b) {
                *x -= proj * y;
            }
        }
        let len = dot(&e, &e).sqrt();
        basis.push(e.into_iter().map(|x| x / len).collect());
    }
    basis
}

/// Lifts `base ⊂ ℝⁿ`, whose height `v·base` has exactly two critical points,
/// to ℝⁿ⁺¹ with coordinates `(x, v·base, components of base in v⊥)`.
///
/// The new coordinate is `x = ±ε √(1 − ŷ²)` with `ŷ` the height rescaled to
/// `[−1, 1]`: it vanishes at the two critical points, is negative on the arc
/// from the maximum down to the minimum and positive on the way back, so the
/// projection is the counterclockwise ellipse `(x/ε)² + ŷ² = 1`.
pub fn critical_pair_lift(base: &ClosedCurve, v: &Direction, eps: f64, n: usize) -> Result<ClosedCurve> {
    if eps == 0.0 || !eps.is_finite() {
        return Err(Error::invalid("critical pair lift needs a finite nonzero eps"));
    }
    let base = if base.len() == n { base.clone() } else { resample_uniform(base, n)? };
    if mu_count(&base, v)? != 1 || mu_count(&base, &v.negated())? != 1 {
        return Err(Error::Precondition("v·base must have exactly two critical points".into()));
    }
    let h: Vec<f64> = base.points().map(|p| dot(p, v.vector())).collect();
    let jmax = (0..n).max_by(|&a, &b| h[a].total_cmp(&h[b])).unwrap_or(0);
    let jmin = (0..n).min_by(|&a, &b| h[a].total_cmp(&h[b])).unwrap_or(0);
    let (mid, half) = (0.5 * (h[jmax] + h[jmin]), 0.5 * (h[jmax] - h[jmin]));
    let descending = |j: usize| (j + n - jmax) % n < (jmin + n - jmax) % n;
    let basis = complement_basis(v.vector());
    let dim = base.dim() + 1;
    let mut coords = Vec::with_capacity(n * dim);
    for j in 0..n {
        let yhat = ((h[j] - mid) / half).clamp(-1.0, 1.0);
        let arc = eps * (1.0 - yhat * yhat).sqrt();
        coords.push(if descending(j) { -arc } else { arc });
        coords.push(h[j]);
        coords.extend(basis.iter().map(|b| dot(base.point(j), b)));
    }
    ClosedCurve::new(dim, coords)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primitive {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// `(r cos u, r sin u, m r cos u)`: the curve in the plane `z = m x` whose
    /// xy-shadow is the circle of radius `r`.
    TiltedCircle { radius: f64, slope: f64 },
}

/// Standard parametrisations embedded in ℝ^`dim`.
pub fn make_primitive(kind: Primitive, dim: usize, n: usize) -> Result<ClosedCurve> {
    let positive = |x: f64, name: &str| {
        if x > 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(format!("{name} must be positive, got {x}")))
        }
    };
    if dim < 2 {
        return Err(Error::BadDimension(dim));
    }
    match kind {
        Primitive::Circle { radius } => {
            positive(radius, "radius")?;
            ClosedCurve::sample(dim, n, |u, p| {
                p[0] = radius * u.cos();
                p[1] = radius * u.sin();
            })
        }
        Primitive::Ellipse { a, b } => {
            positive(a, "a")?;
            positive(b, "b")?;
            ClosedCurve::sample(dim, n, |u, p| {
                p[0] = a * u.cos();
                p[1] = b * u.sin();
            })
        }
        Primitive::TiltedCircle { radius, slope } => {
            positive(radius, "radius")?;
            if !(slope >= 0.0 && slope.is_finite()) {
                return Err(Error::invalid(format!("tilt slope must be non-negative, got {slope}")));
            }
            if dim < 3 {
                return Err(Error::BadDimension(dim));
            }
            ClosedCurve::sample(dim, n, |u, p| {
                p[0] = radius * u.cos();
                p[1] = radius * u.sin();
                p[2] = slope * p[0];
            })
        }
    }
}

/// Smallest admissible `h + h″` for the random support function.
const MIN_RADIUS_OF_CURVATURE: f64 = 0.05;

struct SupportFunction {
    /// `(k, a_k, b_k)` for `k ≥ 2`.
    modes: Vec<(f64, f64, f64)>,
}

impl SupportFunction {
    fn eval(&self, th: f64) -> (f64, f64, f64) {
        let (mut h, mut dh, mut ddh) = (1.0, 0.0, 0.0);
        for &(k, a, b) in &self.modes {
            let (s, c) = (k * th).sin_cos();
            h += a * c + b * s;
            dh += k * (b * c - a * s);
            ddh -= k * k * (a * c + b * s);
        }
        (h, dh, ddh)
    }

    fn min_radius(&self) -> f64 {
        (0..4096)
            .map(|i| {
                let (h, _, ddh) = self.eval(TAU * i as f64 / 4096.0);
                h + ddh
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn shrink(&mut self, factor: f64) {
        for m in &mut self.modes {
            m.1 *= factor;
            m.2 *= factor;
        }
    }
}

/// A curve in ℝ^`dim` whose xy-projection is the uniformly convex curve with
/// support function `h(θ) = 1 + Σ_{k=2}^{harmonics+1} (a_k cos kθ + b_k sin kθ)`
/// and whose other coordinates are small random trigonometric polynomials.
/// Coefficients are shrunk and retried (at most 8 times) until
/// `h + h″ ≥ 0.05` and the projection passes the convexity check.
pub fn random_convex_projection(seed: u64, dim: usize, harmonics: usize, n: usize) -> Result<ClosedCurve> {
    if dim < 3 {
        return Err(Error::BadDimension(dim));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.5 / harmonics.max(1) as f64;
    let mut support = SupportFunction {
        modes: (2..harmonics + 2)
            .map(|k| {
                let amp = scale / ((k * k - 1) as f64);
                (k as f64, amp * rng.gen_range(-1.0..1.0), amp * rng.gen_range(-1.0..1.0))
            })
            .collect(),
    };
    let heights: Vec<Vec<(f64, f64)>> = (0..dim - 2)
        .map(|_| (1..=3).map(|m| {
            let amp = 0.3 / (m * m) as f64;
            (amp * rng.gen_range(-1.0..1.0), amp * rng.gen_range(-1.0..1.0))
        }).collect())
        .collect();
    for _ in 0..=8 {
        if support.min_radius() >= MIN_RADIUS_OF_CURVATURE {
            let curve = ClosedCurve::sample(dim, n, |th, p| {
                let (h, dh, _) = support.eval(th);
                let (s, c) = th.sin_cos();
                p[0] = h * c - dh * s;
                p[1] = h * s + dh * c;
                for (z, modes) in p[2..].iter_mut().zip(&heights) {
                    *z = modes
                        .iter()
                        .enumerate()
                        .map(|(m, (a, b))| {
                            let (s, c) = ((m + 1) as f64 * th).sin_cos();
                            a * c + b * s
                        })
                        .sum();
                }
            })?;
            if convexity_check(&curve)?.uniformly_convex {
                return Ok(curve);
            }
        }
        support.shrink(0.5);
    }
    Err(Error::Precondition(format!("no uniformly convex support function for seed {seed} after 8 retries")))
}

/// A named family with numeric parameters and a sample count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZooSpec {
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub n: usize,
}

/// One parameter of a family: name, default and meaning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: f64,
    pub doc: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub doc: &'static str,
    pub params: &'static [ParamInfo],
}

const fn p(name: &'static str, default: f64, doc: &'static str) -> ParamInfo {
    ParamInfo { name, default, doc }
}

const DIM: ParamInfo = p("dim", 3.0, "ambient dimension");

/// Every family `ZooSpec::build` understands.
pub const CATALOGUE: &[FamilyInfo] = &[
    FamilyInfo { name: "circle", doc: "round circle in the xy-plane", params: &[p("radius", 1.0, "radius"), DIM] },
    FamilyInfo {
        name: "ellipse",
        doc: "axis-aligned ellipse in the xy-plane",
        params: &[p("a", 2.0, "x semi-axis"), p("b", 1.0, "y semi-axis"), DIM],
    },
    FamilyInfo {
        name: "tilted_circle",
        doc: "circle in the plane z = slope·x",
        params: &[p("radius", 1.0, "radius of the xy-shadow"), p("slope", 1.0, "tilt slope m ≥ 0"), DIM],
    },
    FamilyInfo {
        name: "figure_eight_lift",
        doc: "(cos u, eps sin u, sin 2u)",
        params: &[p("eps", 0.2, "perturbation size; 0 is the planar figure eight")],
    },
    FamilyInfo {
        name: "cardioid_lift",
        doc: "((cos u + 1 − eps) cos u, (cos u + 1 − eps) sin u, sin u)",
        params: &[p("eps", 0.05, "offset in [0, 1); 0 has a vertical tangent at u = π")],
    },
    FamilyInfo {
        name: "wave_figure_eight",
        doc: "wave approximation (eps cos u, eps sin u, cos u, sin 2u) in ℝ⁴",
        params: &[p("eps", 0.1, "radius of the projected circle")],
    },
    FamilyInfo {
        name: "wave_trefoil",
        doc: "wave approximation of scale·(sin u + 2 sin 2u, cos u − 2 cos 2u, −sin 3u) in ℝ⁵",
        params: &[p("eps", 0.1, "radius of the projected circle"), p("scale", 0.08, "size of the trefoil")],
    },
    FamilyInfo {
        name: "critical_pair_figure_eight",
        doc: "planar figure eight (cos u, sin 2u) lifted along v = (1, 0) to ℝ³",
        params: &[p("eps", 0.2, "half-width of the projected ellipse")],
    },
    FamilyInfo {
        name: "random_convex",
        doc: "random uniformly convex projection with smooth random heights",
        params: &[p("seed", 0.0, "generator seed"), DIM, p("harmonics", 4.0, "support-function modes")],
    },
];

pub fn family(name: &str) -> Option<&'static FamilyInfo> {
    CATALOGUE.iter().find(|f| f.name == name)
}

/// Planar figure eight `(cos u, sin 2u)`.
pub fn planar_figure_eight(n: usize) -> Result<ClosedCurve> {
    ClosedCurve::sample(2, n, |u, p| {
        p[0] = u.cos();
        p[1] = (2.0 * u).sin();
    })
}

/// A trefoil knot `scale · (sin u + 2 sin 2u, cos u − 2 cos 2u, −sin 3u)`.
pub fn trefoil(scale: f64, n: usize) -> Result<ClosedCurve> {
    ClosedCurve::sample(3, n, |u, p| {
        p[0] = scale * (u.sin() + 2.0 * (2.0 * u).sin());
        p[1] = scale * (u.cos() - 2.0 * (2.0 * u).cos());
        p[2] = -scale * (3.0 * u).sin();
    })
}

impl ZooSpec {
    pub fn new(family: &str, n: usize) -> Self {
        Self { family: family.to_string(), params: BTreeMap::new(), n }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    /// Parameter values with defaults filled in; unknown names are errors.
    pub fn resolved(&self) -> Result<BTreeMap<&'static str, f64>> {
        let info = family(&self.family).ok_or_else(|| Error::invalid(format!("unknown family {:?}", self.family)))?;
        if let Some(bad) = self.params.keys().find(|k| !info.params.iter().any(|p| p.name == k.as_str())) {
            return Err(Error::invalid(format!("family {} has no parameter {bad:?}", info.name)));
        }
        Ok(info
            .params
            .iter()
            .map(|p| (p.name, self.params.get(p.name).copied().unwrap_or(p.default)))
            .collect())
    }

    pub fn build(&self) -> Result<ClosedCurve> {
        let v = self.resolved()?;
        let n = self.n;
        let count = |name: &str| {
            let x = v[name];
            if x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(53) {
                Ok(x as u64)
            } else {
                Err(Error::invalid(format!("parameter {name} must be a non-negative integer, got {x}")))
            }
        };
        match self.family.as_str() {
            "circle" => make_primitive(Primitive::Circle { radius: v["radius"] }, count("dim")? as usize, n),
            "ellipse" => make_primitive(Primitive::Ellipse { a: v["a"], b: v["b"] }, count("dim")? as usize, n),
            "tilted_circle" => make_primitive(
                Primitive::TiltedCircle { radius: v["radius"], slope: v["slope"] },
                count("dim")? as usize,
                n,
            ),
            "figure_eight_lift" => figure_eight_lift(v["eps"], n),
            "cardioid_lift" => cardioid_lift(v["eps"], n),
            "wave_figure_eight" => wave_lift(2, v["eps"], n, |u, out| {
                out[0] = u.cos();
                out[1] = (2.0 * u).sin();
            }),
            "wave_trefoil" => wave_approximation(&trefoil(v["scale"], n)?, v["eps"], n),
            "critical_pair_figure_eight" => {
                critical_pair_lift(&planar_figure_eight(n)?, &Direction::axis(2, 0)?, v["eps"], n)
            }
            "random_convex" => {
                random_convex_projection(count("seed")?, count("dim")? as usize, count("harmonics")? as usize, n)
            }
            other => Err(Error::invalid(format!("unknown family {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::frame_geometry;
    use crate::predicates::vertical_tangent_gap;

    #[test]
    fn figure_eight_samples() {
        let c = figure_eight_lift(0.3, 64).unwrap();
        assert_eq!(c.point(0), &[1.0, 0.0, 0.0]);
        assert!(figure_eight_lift(0.0, 64).unwrap().points().all(|p| p[1] == 0.0));
    }

    #[test]
    fn cardioid_speed_and_node_at_pi() {
        let n = 512;
        let c = cardioid_lift(0.3, n).unwrap();
        let fg = frame_geometry(&c).unwrap();
        let h = TAU / n as f64;
        for (j, s) in fg.speed.iter().enumerate() {
            let u = grid_parameter(j, n);
            let exact = ((u.cos() + 0.7).powi(2) + 1.0).sqrt();
            // Centred differences shrink the speed by O(h²).
            assert!((s / exact - 1.0).abs() < h * h);
        }
        let z = cardioid_lift(0.0, n).unwrap();
        assert_eq!(z.point(0), &[2.0, 0.0, 0.0]);
        let mid = z.point(n / 2);
        assert!(mid.iter().all(|x| x.abs() < 1e-15));
        assert!(cardioid_lift(0.1, 63).is_err());
        assert!(vertical_tangent_gap(&cardioid_lift(0.05, n).unwrap()).unwrap() > 0.0);
    }

    #[test]
    fn wave_approximation_projects_to_a_circle() {
        let base = trefoil(0.3, 300).unwrap();
        let w = wave_approximation(&base, 0.1, 300).unwrap();
        assert_eq!(w.dim(), 5);
        for p in w.points() {
            assert!((p[0].hypot(p[1]) - 0.1).abs() < 1e-12);
        }
        assert!(wave_approximation(&base, 0.0, 300).is_err());
        let eight = wave_lift(2, 0.1, 256, |u, out| {
            out[0] = u.cos();
            out[1] = (2.0 * u).sin();
        })
        .unwrap();
        assert!(convexity_check(&eight).unwrap().uniformly_convex);
        let point = wave_lift(2, 0.5, 64, |_, out| out.copy_from_slice(&[3.0, -1.0])).unwrap();
        assert!(point.points().all(|p| p[2] == 3.0 && p[3] == -1.0));
    }

    #[test]
    fn critical_pair_lift_gives_an_ellipse() {
        let base = planar_figure_eight(256).unwrap();
        let lift = critical_pair_lift(&base, &Direction::axis(2, 0).unwrap(), 0.2, 256).unwrap();
        assert_eq!(lift.dim(), 3);
        for p in lift.points() {
            assert!(((p[0] / 0.2).powi(2) + p[1].powi(2) - 1.0).abs() < 1e-12);
        }
        let v = convexity_check(&lift).unwrap();
        assert!(v.uniformly_convex, "{v:?}");
        let circle = make_primitive(Primitive::Circle { radius: 1.0 }, 3, 128).unwrap();
        let lift = critical_pair_lift(&circle, &Direction::new(vec![1.0, 1.0, 0.0]).unwrap(), 0.5, 128).unwrap();
        assert!(convexity_check(&lift).unwrap().convex);
        let wavy = ClosedCurve::sample(2, 128, |u, p| {
            p[0] = (2.0 * u).cos();
            p[1] = u.sin();
        })
        .unwrap();
        assert!(matches!(
            critical_pair_lift(&wavy, &Direction::axis(2, 0).unwrap(), 0.2, 128),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn primitives() {
        let t = make_primitive(Primitive::TiltedCircle { radius: 1.0, slope: 1.0 }, 3, 64).unwrap();
        assert!(t.points().all(|p| p[2] == p[0]));
        assert!(make_primitive(Primitive::Circle { radius: -1.0 }, 2, 64).is_err());
        assert!(make_primitive(Primitive::TiltedCircle { radius: 1.0, slope: 1.0 }, 2, 64).is_err());
    }

    #[test]
    fn random_convex_is_convex_and_deterministic() {
        for seed in 0..6 {
            let c = random_convex_projection(seed, 3, 5, 256).unwrap();
            assert!(convexity_check(&c).unwrap().uniformly_convex);
            assert_eq!(c, random_convex_projection(seed, 3, 5, 256).unwrap());
        }
        let round = random_convex_projection(7, 4, 0, 128).unwrap();
        for p in round.points() {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
        }
        assert_ne!(random_convex_projection(1, 3, 3, 64).unwrap(), random_convex_projection(2, 3, 3, 64).unwrap());
    }

    #[test]
    fn catalogue_builds_every_family() {
        for f in CATALOGUE {
            let c = ZooSpec::new(f.name, 128).build().unwrap();
            assert_eq!(c.len(), 128, "{}", f.name);
        }
        assert!(ZooSpec::new("circle", 64).with("radius2", 1.0).build().is_err());
        assert!(ZooSpec::new("nope", 64).build().is_err());
        assert!(ZooSpec::new("random_convex", 64).with("seed", 1.5).build().is_err());
        assert_eq!(ZooSpec::new("random_convex", 64).with("dim", 5.0).build().unwrap().dim(), 5);
    }
}
