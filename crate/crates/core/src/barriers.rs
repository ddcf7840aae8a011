//! The sine subsolution `φ = ε e^{−λt} sin(π(x − x₀)/M)` and the comparison
//! checks it powers on the upper branch of the projection.
//!
//! Barrier time is measured from the first frame of the series it is
//! compared against.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curve::{frame_geometry, ArclengthParam, ClosedCurve, FrameGeometry};
use crate::flow::{normal_plane_image, upper_branch, FrameSeries, GraphState, UpperBranch};
use crate::{Error, Result};

/// Allowed undershoot of the field below the barrier.
pub const MARGIN_TOL: f64 = 1e-6;
/// Boundary values of the field must exceed this.
pub const BOUNDARY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Barrier {
    /// Window width `M`.
    pub width: f64,
    pub epsilon: f64,
    pub lambda: f64,
    /// Window start; `φ` depends on `x − x_offset`.
    pub x_offset: f64,
}

impl Barrier {
    /// Validates `λ ≥ π²/M²` (up to rounding).
    pub fn new(width: f64, epsilon: f64, lambda: f64, x_offset: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) || !(epsilon > 0.0 && epsilon.is_finite()) || !x_offset.is_finite() {
            return Err(Error::Barrier("width and epsilon must be positive and finite".into()));
        }
        let floor = (PI / width).powi(2);
        if !(lambda >= floor * (1.0 - 1e-12)) || !lambda.is_finite() {
            return Err(Error::Barrier(format!("lambda {lambda} below π²/M² = {floor}")));
        }
        Ok(Self { width, epsilon, lambda, x_offset })
    }

    /// The barrier on `[a, b]` with the slowest admissible rate `λ = π²/M²`.
    pub fn on_window(window: (f64, f64), epsilon: f64) -> Result<Self> {
        let width = window.1 - window.0;
        Self::new(width, epsilon, (PI / width).powi(2), window.0)
    }

    pub fn window(&self) -> (f64, f64) {
        (self.x_offset, self.x_offset + self.width)
    }

    /// The formula without the window check.
    fn eval(&self, x: f64, t: f64) -> f64 {
        self.epsilon * (-self.lambda * t).exp() * (PI * (x - self.x_offset) / self.width).sin()
    }

    fn shape(&self, x: f64) -> f64 {
        (PI * (x - self.x_offset) / self.width).sin()
    }

    fn contains(&self, x: f64) -> bool {
        let slack = 1e-12 * self.width;
        x >= self.x_offset - slack && x <= self.x_offset + self.width + slack
    }
}

/// `φ(x, t)`; rejects `x` outside the window and negative `t`.
pub fn barrier_value(b: &Barrier, x: f64, t: f64) -> Result<f64> {
    if !b.contains(x) {
        return Err(Error::Barrier(format!("x = {x} outside the window {:?}", b.window())));
    }
    if !(t >= 0.0) {
        return Err(Error::Barrier(format!("barrier time must be non-negative, got {t}")));
    }
    Ok(b.eval(x, t))
}

/// Which scalar on the branch is compared against the barrier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSelector {
    /// The height `y`.
    Y,
    /// `x_s`, the x-rate per space arclength, oriented towards increasing x.
    Xs,
}

impl FieldSelector {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldSelector::Y => "y",
            FieldSelector::Xs => "x_s",
        }
    }

    /// The field at each node of a graph: `y`, or `1/√(1 + |r_x|²)` with
    /// centred differences inside and one-sided ones at the ends.
    pub fn on_graph(self, g: &GraphState) -> Vec<f64> {
        match self {
            FieldSelector::Y => g.component(0),
            FieldSelector::Xs => {
                let n = g.nodes();
                (0..n)
                    .map(|k| {
                        let (l, r) = (k.saturating_sub(1), (k + 1).min(n - 1));
                        let h = (r - l) as f64 * g.dx;
                        let grad2: f64 =
                            g.value(r).iter().zip(g.value(l)).map(|(p, q)| ((p - q) / h).powi(2)).sum();
                        1.0 / (1.0 + grad2).sqrt()
                    })
                    .collect()
            }
        }
    }

    fn on_sample(self, curve: &ClosedCurve, fg: &FrameGeometry, branch: &UpperBranch, j: usize) -> f64 {
        match self {
            FieldSelector::Y => curve.point(j)[1],
            FieldSelector::Xs => branch.x_direction * fg.tangent(j)[0],
        }
    }
}

/// Chooses `ε = 0.99 · min field/sin` over the nodes strictly inside the
/// barrier window, so that `field ≥ φ` at `t = 0`.
pub fn calibrate_epsilon(trace0: &GraphState, field: &[f64], template: &Barrier) -> Result<Barrier> {
    if field.len() != trace0.nodes() {
        return Err(Error::invalid("field length differs from the graph node count"));
    }
    let mut ratio = f64::INFINITY;
    for (k, &f) in field.iter().enumerate() {
        let x = trace0.x(k);
        if !template.contains(x) {
            return Err(Error::Barrier(format!("graph node x = {x} outside the barrier window")));
        }
        let s = template.shape(x);
        if s <= 1e-12 {
            continue;
        }
        if !(f > 0.0) {
            return Err(Error::Barrier(format!("field {f} not positive at interior node {k}")));
        }
        ratio = ratio.min(f / s);
    }
    if !ratio.is_finite() {
        return Err(Error::Barrier("no interior node to calibrate on".into()));
    }
    Barrier::new(template.width, 0.99 * ratio, template.lambda, template.x_offset)
}

/// Discrete `φ_t − φ_ss` for one frame pair.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameResidual {
    /// Time of the earlier frame of the pair, on the barrier clock.
    pub t: f64,
    pub max: f64,
    /// One value per tracked branch sample.
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubsolutionReport {
    pub max_residual: f64,
    pub frames: Vec<FrameResidual>,
    /// Frame pairs left out, with the reason.
    pub skipped: Vec<(usize, String)>,
}

fn phi_field(b: &Barrier, curve: &ClosedCurve, t: f64) -> Vec<f64> {
    curve.points().map(|p| b.eval(p[0], t)).collect()
}

/// Evaluates `φ_t − φ_ss` along the flow at the upper-branch samples of each
/// frame that lie in `window`, at that frame's time.
///
/// With `φ = ε e^{−λt} S(x)`, the time factor is differentiated exactly and
/// only the motion of `x` is differenced:
/// `φ_t ≈ ε e^{−λt₀} [(S(x_q) − S(x_p))/Δt − λ S(x_p)]`, where `q` is the
/// sample's image in the next frame (where that frame meets the sample's
/// normal plane). Differencing `e^{−λt}` across frames instead would need
/// `λΔt ≪ 1`, which archived frames on narrow windows do not provide.
/// `φ_ss` applies the curve's second-difference stencil to `φ` composed
/// with `x`.
pub fn subsolution_residual(b: &Barrier, series: &FrameSeries, window: (f64, f64)) -> Result<SubsolutionReport> {
    let t_first = series.frames[0].t;
    let mut frames = Vec::new();
    let mut skipped = Vec::new();
    for i in 0..series.frames.len().saturating_sub(1) {
        let (f0, f1) = (&series.frames[i], &series.frames[i + 1]);
        let g0 = match frame_geometry(&f0.curve) {
            Ok(g) => g,
            Err(e) => {
                skipped.push((i, e.to_string()));
                continue;
            }
        };
        let branch = match upper_branch(&f0.curve, window) {
            Ok(br) => br,
            Err(e) => {
                skipped.push((i, e.to_string()));
                continue;
            }
        };
        let t0 = f0.t - t_first;
        let dt = f1.t - f0.t;
        let decay = b.epsilon * (-b.lambda * t0).exp();
        let phi_ss = g0.second_derivative(&phi_field(b, &f0.curve, t0));
        let next = ArclengthParam::new(&f1.curve);
        let mut q = vec![0.0; f1.curve.dim()];
        let mut values = Vec::new();
        for &j in &branch.indices {
            let p = f0.curve.point(j);
            if !(p[0] >= window.0 && p[0] <= window.1) {
                continue;
            }
            let guess = g0.arclength[j] / g0.total_length * next.total();
            let Some(s) = normal_plane_image(&next, p, g0.tangent(j), guess, 0.25 * next.total()) else {
                continue;
            };
            next.eval_cubic(s, &mut q);
            let (sp, sq) = (b.shape(p[0]), b.shape(q[0]));
            let phi_t = decay * ((sq - sp) / dt - b.lambda * sp);
            values.push(phi_t - phi_ss[j]);
        }
        if values.is_empty() {
            skipped.push((i, "no branch samples inside the window".into()));
            continue;
        }
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        frames.push(FrameResidual { t: t0, max, values });
    }
    let max_residual = frames.iter().map(|f| f.max).fold(f64::NEG_INFINITY, f64::max);
    Ok(SubsolutionReport { max_residual, frames, skipped })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameMargin {
    pub t: f64,
    /// `min (field − φ)` over the branch samples in the window.
    pub min_margin: f64,
    /// Smaller of the field's values at the two window ends.
    pub boundary_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub field: FieldSelector,
    pub passed: bool,
    pub min_margin: f64,
    pub boundary_min: f64,
    /// Frame index of the smallest margin.
    pub tightest_frame: usize,
    pub frames: Vec<FrameMargin>,
}

impl ComparisonReport {
    /// Rows `t,min_margin,boundary_min,epsilon,lambda,M` with a header.
    pub fn to_csv(&self, b: &Barrier) -> String {
        let mut out = String::from("t,min_margin,boundary_min,epsilon,lambda,M\n");
        for f in &self.frames {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                f.t, f.min_margin, f.boundary_min, b.epsilon, b.lambda, b.width
            ));
        }
        out
    }
}

/// Linear interpolation of the field at `x` along the branch.
fn field_at(curve: &ClosedCurve, fg: &FrameGeometry, branch: &UpperBranch, sel: FieldSelector, x: f64) -> f64 {
    for w in branch.indices.windows(2) {
        let (xa, xb) = (curve.point(w[0])[0], curve.point(w[1])[0]);
        if (xa - x) * (xb - x) <= 0.0 && xa != xb {
            let s = (x - xa) / (xb - xa);
            let (fa, fb) = (sel.on_sample(curve, fg, branch, w[0]), sel.on_sample(curve, fg, branch, w[1]));
            return fa + s * (fb - fa);
        }
    }
    f64::NAN
}

/// Checks `field ≥ φ − 10⁻⁶` at every upper-branch sample inside `window`
/// (which must lie in the barrier's window) on every frame, and that the
/// field stays above `10⁻⁸` at the window ends.
pub fn comparison_check(
    series: &FrameSeries,
    b: &Barrier,
    field: FieldSelector,
    window: (f64, f64),
) -> Result<ComparisonReport> {
    if !(b.contains(window.0) && b.contains(window.1) && window.0 < window.1) {
        return Err(Error::Barrier(format!("window {window:?} not inside the barrier window {:?}", b.window())));
    }
    let t_first = series.frames[0].t;
    let mut frames = Vec::with_capacity(series.frames.len());
    for f in &series.frames {
        let branch = upper_branch(&f.curve, window)?;
        let fg = frame_geometry(&f.curve)?;
        let t = f.t - t_first;
        let min_margin = branch
            .indices
            .iter()
            .filter(|&&j| {
                let x = f.curve.point(j)[0];
                x >= window.0 && x <= window.1
            })
            .map(|&j| field.on_sample(&f.curve, &fg, &branch, j) - b.eval(f.curve.point(j)[0], t))
            .fold(f64::INFINITY, f64::min);
        let boundary_min = field_at(&f.curve, &fg, &branch, field, window.0)
            .min(field_at(&f.curve, &fg, &branch, field, window.1));
        frames.push(FrameMargin { t: f.t, min_margin, boundary_min });
    }
    let (tightest_frame, min_margin) = frames
        .iter()
        .map(|f| f.min_margin)
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, m)| if m < acc.1 { (i, m) } else { acc });
    let boundary_min = frames.iter().map(|f| f.boundary_min).fold(f64::INFINITY, f64::min);
    let passed = min_margin >= -MARGIN_TOL && boundary_min > BOUNDARY_TOL;
    Ok(ComparisonReport { field, passed, min_margin, boundary_min, tightest_frame, frames })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{extract_graph_branch, FlowState, StopReason};

    #[test]
    fn formula_values() {
        let b = Barrier::new(2.0, 0.1, PI * PI / 4.0, -1.0).unwrap();
        assert!((barrier_value(&b, 0.0, 0.0).unwrap() - 0.1).abs() < 1e-15);
        assert!(barrier_value(&b, -1.0, 0.3).unwrap().abs() < 1e-15);
        assert!(barrier_value(&b, 1.0, 0.3).unwrap().abs() < 1e-15);
        let v = barrier_value(&b, 0.0, 1.0).unwrap();
        assert!((v - 0.1 * (-PI * PI / 4.0).exp()).abs() < 1e-12);
        assert!(barrier_value(&b, 1.5, 0.0).is_err());
        assert!(barrier_value(&b, 0.0, -1.0).is_err());
        assert!(Barrier::new(2.0, 0.1, 1.0, 0.0).is_err());
    }

    #[test]
    fn calibration() {
        let b = Barrier::on_window((-1.0, 1.0), 1.0).unwrap();
        let g = GraphState::sample(-1.0, 1.0, 21, 1, |_, r| r[0] = 1.0).unwrap();
        let ones = vec![1.0; 21];
        assert!((calibrate_epsilon(&g, &ones, &b).unwrap().epsilon - 0.99).abs() < 1e-12);
        let sine: Vec<f64> = (0..21).map(|k| (PI * (g.x(k) + 1.0) / 2.0).sin()).collect();
        assert!((calibrate_epsilon(&g, &sine, &b).unwrap().epsilon - 0.99).abs() < 1e-12);
        let mut bad = ones.clone();
        bad[7] = -0.1;
        assert!(calibrate_epsilon(&g, &bad, &b).is_err());
    }

    fn circle(n: usize) -> ClosedCurve {
        ClosedCurve::sample(2, n, |u, p| {
            p[0] = u.cos();
            p[1] = u.sin();
        })
        .unwrap()
    }

    #[test]
    fn circle_branch_calibration_dominates() {
        let c = circle(1024);
        let window = (-0.5, 0.5);
        let g = extract_graph_branch(&c, window, 101).unwrap();
        let y = FieldSelector::Y.on_graph(&g);
        let b = calibrate_epsilon(&g, &y, &Barrier::on_window(window, 1.0).unwrap()).unwrap();
        for k in 0..g.nodes() {
            assert!(y[k] >= barrier_value(&b, g.x(k), 0.0).unwrap());
        }
        let series = FrameSeries::from_frames(vec![FlowState::initial(c)], StopReason::StepBudget).unwrap();
        let report = comparison_check(&series, &b, FieldSelector::Y, window).unwrap();
        assert!(report.passed);
        let mut sabotage = b;
        sabotage.epsilon *= 2.0;
        assert!(!comparison_check(&series, &sabotage, FieldSelector::Y, window).unwrap().passed);
    }

    #[test]
    fn xs_on_graph_matches_tangent() {
        let g = GraphState::sample(-0.5, 0.5, 201, 1, |x, r| r[0] = (1.0 - x * x).sqrt()).unwrap();
        let xs = FieldSelector::Xs.on_graph(&g);
        for k in 1..200 {
            let y = (1.0 - g.x(k).powi(2)).sqrt();
            assert!((xs[k] - y).abs() < 1e-4);
        }
    }

    /// A stadium whose top side is the straight segment `y = 1`, `|x| ≤ 2`.
    fn stadium(h: f64) -> ClosedCurve {
        let mut pts = Vec::new();
        let m = (4.0 / h).round() as usize;
        for k in 0..m {
            pts.push(vec![2.0 - k as f64 * h, 1.0]);
        }
        let arc = (PI / h).round() as usize;
        for k in 0..arc {
            let a = PI / 2.0 + PI * k as f64 / arc as f64;
            pts.push(vec![-2.0 + a.cos(), a.sin()]);
        }
        for k in 0..m {
            pts.push(vec![-2.0 + k as f64 * h, -1.0]);
        }
        for k in 0..arc {
            let a = -PI / 2.0 + PI * k as f64 / arc as f64;
            pts.push(vec![2.0 + a.cos(), a.sin()]);
        }
        ClosedCurve::from_points(2, &pts).unwrap()
    }

    #[test]
    fn straight_segment_binds_the_subsolution_condition() {
        let c = stadium(0.005);
        let frames = (0..4).map(|i| FlowState { curve: c.clone(), t: 1e-3 * i as f64, step_index: i }).collect();
        let series = FrameSeries::from_frames(frames, StopReason::StepBudget).unwrap();
        let window = (-1.5, 1.5);
        let b = Barrier::on_window(window, 0.1).unwrap();
        let r = subsolution_residual(&b, &series, window).unwrap();
        assert_eq!(r.frames.len(), 3);
        for f in &r.frames {
            assert!(f.values.iter().all(|v| v.abs() <= 1e-6), "{:?}", f.values);
        }
    }

    #[test]
    fn doubling_lambda_lowers_the_residual() {
        let mut s = FlowState::initial(circle(512));
        let mut frames = vec![s.clone()];
        for _ in 0..5 {
            for _ in 0..10 {
                let dt = crate::flow::choose_dt(&s, 0.4);
                s = crate::flow::csf_step(&s, dt).unwrap();
            }
            frames.push(s.clone());
        }
        let series = FrameSeries::from_frames(frames, StopReason::StepBudget).unwrap();
        let window = (-0.5, 0.5);
        let b = Barrier::on_window(window, 0.5).unwrap();
        let fast = Barrier { lambda: 2.0 * b.lambda, ..b };
        let r1 = subsolution_residual(&b, &series, window).unwrap();
        let r2 = subsolution_residual(&fast, &series, window).unwrap();
        assert!(r1.max_residual < 1e-4, "{}", r1.max_residual);
        for (a, b) in r1.frames.iter().zip(&r2.frames) {
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!(y < x);
            }
        }
    }
}
