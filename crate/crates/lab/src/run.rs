//! Executing a configured run: the flow, one record per archived frame, the
//! verdicts of the enabled checks, and the artifacts on disk.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use csflow_core::barriers::{calibrate_epsilon, comparison_check, subsolution_residual, Barrier, FieldSelector};
use csflow_core::curve::{
    diameter, frame_geometry, projection_geometry, resample_uniform, roundness, ClosedCurve,
    CurveSnapshot,
};
use csflow_core::flow::{extract_graph_branch, run_flow, FlowState, FrameSeries, RunPolicy, StopReason};
use csflow_core::predicates::{
    convexity_check, horizontal_directions, plane_intersection_count, sign_change_count, slope_profile,
    vertical_tangent_gap, ConvexityVerdict, Direction, Plane, PlaneCount, SlopeSummary,
};
use serde::{Deserialize, Serialize};

use crate::config::{ChecksConfig, CurveSource, RunConfig};
use crate::error::{LabError, Result};
use crate::limit::limit_region_summary;
use crate::svg::{emit_overlay, emit_svg, pick_frames, PlotFrame, Style};

/// Relative increase of `Δ` between frames tolerated by the three-point check.
pub const THREE_POINT_SLACK: f64 = 0.02;
/// Largest `φ_t − φ_ss` accepted by the barrier check.
pub const RESIDUAL_TOL: f64 = 1e-4;
const BARRIER_NODES: usize = 101;

/// The scalar log of one archived frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameRecord {
    pub t: f64,
    pub step: u64,
    pub length: f64,
    pub diameter: f64,
    pub proj_diameter: f64,
    pub min_c: f64,
    pub max_k: f64,
    pub min_kbar: f64,
    pub max_kbar: f64,
    /// Largest `Δ` over the `xyz_i` projections; `NaN` in the plane.
    pub delta_triple: f64,
    /// `NaN` when the projection is not simple.
    pub roundness: f64,
    /// One entry per horizontal Sturm direction, then the vertical axis
    /// (`None` in the plane).
    pub sign_changes: Vec<Option<usize>>,
    /// `None` in the plane.
    pub plane_counts: Vec<Option<PlaneCount>>,
    pub convexity: ConvexityVerdict,
    pub vertical_gap: f64,
    /// Slope summaries of the `xyz_i` projections (the curve itself in ℝ³).
    pub slopes: Vec<SlopeSummary>,
}

/// The column names of `series.csv`, fixed by the enabled checks.
pub fn csv_columns(checks: &ChecksConfig) -> Vec<String> {
    let mut cols: Vec<String> =
        ["t", "step", "length", "diameter", "proj_diameter", "min_c", "max_k", "min_kbar", "max_kbar"]
            .iter()
            .map(|s| s.to_string())
            .collect();
    if checks.slopes {
        cols.push("delta_triple".into());
    }
    cols.push("roundness".into());
    if checks.sturm {
        cols.extend((0..checks.sturm_directions).map(|k| format!("sign_changes_h{k:02}")));
        cols.push("sign_changes_z".into());
    }
    cols.extend((0..checks.planes).map(|k| format!("plane_count_{k}")));
    if checks.convexity {
        cols.extend(["simple", "convex", "strictly_convex", "uniformly_convex"].map(String::from));
    }
    if checks.vertical_tangent {
        cols.push("vertical_gap".into());
    }
    cols
}

/// 17 significant digits; non-finite values as `nan`, `inf`, `-inf`.
fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn count_cell(c: Option<usize>) -> String {
    c.map_or_else(|| "nan".into(), |c| c.to_string())
}

impl FrameRecord {
    pub fn csv_row(&self, checks: &ChecksConfig) -> String {
        let mut cells = vec![
            num(self.t),
            self.step.to_string(),
            num(self.length),
            num(self.diameter),
            num(self.proj_diameter),
            num(self.min_c),
            num(self.max_k),
            num(self.min_kbar),
            num(self.max_kbar),
        ];
        if checks.slopes {
            cells.push(num(self.delta_triple));
        }
        cells.push(num(self.roundness));
        if checks.sturm {
            cells.extend(self.sign_changes.iter().map(|&c| count_cell(c)));
        }
        cells.extend(self.plane_counts.iter().map(|c| count_cell(c.map(|c| c.count))));
        if checks.convexity {
            let v = &self.convexity;
            cells.extend([v.simple, v.convex, v.strictly_convex, v.uniformly_convex].map(|b| u8::from(b).to_string()));
        }
        if checks.vertical_tangent {
            cells.push(num(self.vertical_gap));
        }
        cells.join(",")
    }
}

/// Fixed directions and planes, chosen once from the initial curve.
struct Probes {
    directions: Vec<Direction>,
    z_axis: Option<Direction>,
    planes: Vec<Plane>,
}

impl Probes {
    fn new(curve0: &ClosedCurve, checks: &ChecksConfig) -> Result<Self> {
        let dim = curve0.dim();
        let directions = if checks.sturm { horizontal_directions(dim, checks.sturm_directions) } else { Vec::new() };
        let z_axis = if checks.sturm && dim >= 3 { Some(Direction::axis(dim, 2)?) } else { None };
        let mut planes = Vec::new();
        if dim >= 3 {
            let n = curve0.len() as f64;
            let mut c = [0.0; 3];
            for p in curve0.points() {
                for d in 0..3 {
                    c[d] += p[d] / n;
                }
            }
            // Tilted planes through the initial centroid.
            for k in 0..checks.planes {
                let a = TAU * k as f64 / checks.planes as f64;
                let normal = [a.cos(), a.sin(), 0.5];
                planes.push(Plane::new(normal, normal.iter().zip(&c).map(|(x, y)| x * y).sum())?);
            }
        }
        Ok(Self { directions, z_axis, planes })
    }
}

fn analyze_frame(f: &FlowState, probes: &Probes, cfg: &RunConfig) -> Result<FrameRecord> {
    let curve = &f.curve;
    let dim = curve.dim();
    let checks = &cfg.checks;
    let fg = frame_geometry(curve)?;
    let pg = projection_geometry(curve, cfg.c_floor)?;
    let planar = curve.project_xy();
    let slopes = if checks.slopes && dim >= 3 {
        (0..dim - 2)
            .map(|i| slope_profile(&curve.project_xyz(i)?, checks.triple_budget))
            .collect::<csflow_core::Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let delta_triple =
        if slopes.is_empty() { f64::NAN } else { slopes.iter().map(|s| s.delta_triple).fold(0.0, f64::max) };
    let mut sign_changes = Vec::new();
    if checks.sturm {
        for v in &probes.directions {
            sign_changes.push(Some(sign_change_count(curve, v)?));
        }
        sign_changes.push(probes.z_axis.as_ref().map(|v| sign_change_count(curve, v)).transpose()?);
    }
    let plane_counts = if dim >= 3 {
        probes.planes.iter().map(|p| plane_intersection_count(curve, p).map(Some)).collect::<csflow_core::Result<_>>()?
    } else {
        vec![None; checks.planes]
    };
    Ok(FrameRecord {
        t: f.t,
        step: f.step_index,
        length: fg.total_length,
        diameter: diameter(curve),
        proj_diameter: diameter(&planar),
        min_c: pg.min_c(),
        max_k: fg.max_curvature(),
        min_kbar: pg.min_kbar(),
        max_kbar: pg.max_kbar(),
        delta_triple,
        roundness: roundness(&planar).unwrap_or(f64::NAN),
        sign_changes,
        plane_counts,
        convexity: convexity_check(curve)?,
        vertical_gap: vertical_tangent_gap(curve)?,
        slopes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
    Info,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "not_applicable",
            Status::Info => "info",
        }
    }

    fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// One row of `verdicts.json`. Margins that are not finite are `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    pub detail: String,
    pub margins: BTreeMap<String, Option<f64>>,
    /// Frame index where the check came closest to failing, or failed first.
    pub tightest_frame: Option<usize>,
}

impl Verdict {
    fn new(name: &str, status: Status, detail: impl Into<String>) -> Self {
        Self { name: name.into(), status, detail: detail.into(), margins: BTreeMap::new(), tightest_frame: None }
    }

    fn margin(mut self, key: &str, x: f64) -> Self {
        self.margins.insert(key.into(), x.is_finite().then_some(x));
        self
    }

    fn at(mut self, frame: Option<usize>) -> Self {
        self.tightest_frame = frame;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub stop_reason: StopReason,
    pub steps: u64,
    pub frames: usize,
    pub final_time: f64,
    pub checks: Vec<Verdict>,
}

impl Verdicts {
    pub fn any_failure(&self) -> bool {
        self.checks.iter().any(|v| v.status == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Verdict> {
        self.checks.iter().find(|v| v.name == name)
    }
}

fn argmin(values: impl Iterator<Item = (usize, f64)>) -> Option<usize> {
    values.filter(|(_, x)| !x.is_nan()).min_by(|a, b| a.1.total_cmp(&b.1)).map(|(i, _)| i)
}

fn fold_min(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::INFINITY, f64::min)
}

/// The convexity theorem needs a convex initial projection without vertical
/// tangents.
fn theorem_hypothesis(records: &[FrameRecord]) -> std::result::Result<(), String> {
    let v = &records[0].convexity;
    if !v.convex {
        return Err("initial projection is not convex".into());
    }
    if !v.projection_valid || records[0].vertical_gap <= 0.0 {
        return Err("initial curve has a vertical tangent".into());
    }
    if records.len() < 2 {
        return Err("no frame after the initial one".into());
    }
    Ok(())
}

/// The three-point condition makes every vertical plane meet the curve at
/// most twice, so it and the checks built on it need a convex initial
/// projection, as do the barriers.
fn gated(name: &str, hypothesis: &std::result::Result<(), String>, check: impl FnOnce() -> Verdict) -> Verdict {
    match hypothesis {
        Ok(()) => check(),
        Err(why) => Verdict::new(name, Status::NotApplicable, why.clone()),
    }
}

fn theorem_1a(records: &[FrameRecord]) -> Verdict {
    const NAME: &str = "theorem_1a";
    if let Err(why) = theorem_hypothesis(records) {
        return Verdict::new(NAME, Status::NotApplicable, why);
    }
    let later = || records.iter().enumerate().skip(1);
    let failing: Vec<usize> =
        later().filter(|(_, r)| !(r.convexity.uniformly_convex && r.convexity.projection_valid)).map(|(i, _)| i).collect();
    let tightest = failing.first().copied().or_else(|| argmin(later().map(|(i, r)| (i, r.min_kbar))));
    Verdict::new(
        NAME,
        Status::from_pass(failing.is_empty()),
        format!("projection uniformly convex for t > 0 on {}/{} frames", records.len() - 1 - failing.len(), records.len() - 1),
    )
    .margin("min_kbar", fold_min(later().map(|(_, r)| r.min_kbar)))
    .margin("min_c", fold_min(later().map(|(_, r)| r.min_c)))
    .margin("min_vertical_gap", fold_min(later().map(|(_, r)| r.vertical_gap)))
    .at(tightest)
}

fn theorem_1b(records: &[FrameRecord], series: &FrameSeries, cfg: &RunConfig) -> Verdict {
    const NAME: &str = "theorem_1b";
    if let Err(why) = theorem_hypothesis(records) {
        return Verdict::new(NAME, Status::NotApplicable, why);
    }
    let last = records.len() - 1;
    let shrank = series.stop_reason == StopReason::DiameterBelowThreshold;
    Verdict::new(NAME, Status::from_pass(shrank), format!("stop reason {}", series.stop_reason.as_str()))
        .margin("final_diameter", records[last].diameter)
        .margin("diameter_min", cfg.stop.diameter_min)
        .margin("extinction_time", series.extinction_time().unwrap_or(f64::NAN))
        .at(Some(last))
}

/// Counts increases of a per-frame count sequence, skipping `None`s.
fn increases(seq: impl Iterator<Item = Option<usize>>) -> (usize, usize, Option<usize>) {
    let (mut violations, mut pairs, mut first) = (0, 0, None);
    let mut prev: Option<(usize, usize)> = None;
    for (i, c) in seq.enumerate() {
        let Some(c) = c else {
            prev = None;
            continue;
        };
        if let Some((_, p)) = prev {
            pairs += 1;
            if c > p {
                violations += 1;
                first = first.or(Some(i));
            }
        }
        prev = Some((i, c));
    }
    (violations, pairs, first)
}

fn sturm(records: &[FrameRecord]) -> Verdict {
    let columns = records[0].sign_changes.len();
    let (mut violations, mut pairs, mut first): (usize, usize, Option<usize>) = (0, 0, None);
    for k in 0..columns {
        let (v, p, f) = increases(records.iter().map(|r| r.sign_changes[k]));
        violations += v;
        pairs += p;
        first = match (first, f) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
    let initial_max = records[0].sign_changes.iter().flatten().copied().max().unwrap_or(0);
    Verdict::new(
        "sturm",
        Status::from_pass(violations == 0),
        format!("{violations} increases of sign_change_count over {pairs} frame pairs and {columns} directions"),
    )
    .margin("violations", violations as f64)
    .margin("initial_max_sign_changes", initial_max as f64)
    .at(first)
}

fn plane_counts(records: &[FrameRecord]) -> Verdict {
    const NAME: &str = "plane_counts";
    let columns = records[0].plane_counts.len();
    if records[0].plane_counts.iter().any(Option::is_none) {
        return Verdict::new(NAME, Status::NotApplicable, "plane counts need dimension ≥ 3");
    }
    let (mut violations, mut pairs, mut first, mut grazing) = (0, 0, None::<usize>, 0);
    for k in 0..columns {
        let seq = records.iter().map(|r| {
            let c = r.plane_counts[k].expect("checked above");
            if c.grazing {
                grazing += 1;
                None
            } else {
                Some(c.count)
            }
        });
        let (v, p, f) = increases(seq.collect::<Vec<_>>().into_iter());
        violations += v;
        pairs += p;
        first = match (first, f) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
    Verdict::new(
        NAME,
        Status::from_pass(violations == 0),
        format!("{violations} increases over {pairs} frame pairs and {columns} planes ({grazing} grazing samples skipped)"),
    )
    .margin("violations", violations as f64)
    .at(first)
}

/// `b − a`, or 0 when both are the same infinity.
fn slack(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        b - a
    }
}

fn gamma_chain(records: &[FrameRecord]) -> Verdict {
    const NAME: &str = "gamma_chain";
    if records[0].slopes.is_empty() {
        return Verdict::new(NAME, Status::NotApplicable, "slopes need dimension ≥ 3");
    }
    let mut failing = Vec::new();
    let mut worst = (f64::INFINITY, None);
    for (i, r) in records.iter().enumerate() {
        for s in &r.slopes {
            let m = slack(s.s_tangent_max, s.s_secant_max).min(slack(s.s_secant_max, s.delta_triple));
            if m < worst.0 {
                worst = (m, Some(i));
            }
            if !(s.s_tangent_max <= s.s_secant_max + 1e-9 && s.s_secant_max <= s.delta_triple + 1e-9) {
                failing.push(i);
            }
        }
    }
    failing.dedup();
    Verdict::new(
        NAME,
        Status::from_pass(failing.is_empty()),
        format!("tangent ≤ secant ≤ triple slope fails on {} frames", failing.len()),
    )
    .margin("min_slack", worst.0)
    .at(failing.first().copied().or(worst.1))
}

fn three_point(records: &[FrameRecord]) -> Verdict {
    const NAME: &str = "three_point";
    let d0 = records[0].delta_triple;
    if !d0.is_finite() {
        return Verdict::new(NAME, Status::NotApplicable, "no finite three-point constant on the initial frame");
    }
    let mut worst = (f64::NEG_INFINITY, None);
    let mut violations = 0;
    for (i, w) in records.windows(2).enumerate() {
        let rise = if w[1].delta_triple == w[0].delta_triple { 0.0 } else { w[1].delta_triple / w[0].delta_triple - 1.0 };
        if rise > worst.0 || rise.is_nan() {
            worst = (rise, Some(i + 1));
        }
        if !(w[1].delta_triple <= (1.0 + THREE_POINT_SLACK) * w[0].delta_triple) {
            violations += 1;
        }
    }
    Verdict::new(
        NAME,
        Status::from_pass(violations == 0),
        format!("Δ non-increasing within {}% on {}/{} frame pairs", 100.0 * THREE_POINT_SLACK, records.len() - 1 - violations, records.len() - 1),
    )
    .margin("delta_initial", d0)
    .margin("delta_final", records[records.len() - 1].delta_triple)
    .margin("worst_relative_increase", worst.0)
    .at(worst.1)
}

fn diameter_bound(records: &[FrameRecord]) -> Verdict {
    const NAME: &str = "diameter_bound";
    let delta = records[1.min(records.len() - 1)].delta_triple;
    if !delta.is_finite() {
        return Verdict::new(NAME, Status::NotApplicable, "no finite three-point constant after the initial frame");
    }
    let factor = (1.0 + delta * delta).sqrt();
    let rel: Vec<(usize, f64)> =
        records.iter().enumerate().map(|(i, r)| (i, 1.0 - r.diameter / (factor * r.proj_diameter))).collect();
    let failing = records.iter().filter(|r| !(r.diameter <= factor * r.proj_diameter + 1e-9)).count();
    Verdict::new(
        NAME,
        Status::from_pass(failing == 0),
        format!("diam ≤ √(1+Δ²)·diam of the projection with Δ = {delta:.6e}; fails on {failing} frames"),
    )
    .margin("delta", delta)
    .margin("min_relative_slack", fold_min(rel.iter().map(|x| x.1)))
    .at(argmin(rel.into_iter()))
}

fn x_range(curve: &ClosedCurve) -> (f64, f64) {
    curve.points().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[0]), hi.max(p[0])))
}

/// Comparison of `y` and `x_s` on the upper branch against calibrated
/// barriers, over a window inside the final frame's x-range.
fn barrier(series: &FrameSeries) -> Verdict {
    const NAME: &str = "barrier";
    let run = || -> csflow_core::Result<Verdict> {
        let (lo, hi) = x_range(&series.frames[series.frames.len() - 1].curve);
        let window = (lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo));
        let m = window.1 - window.0;
        let template = Barrier::on_window(window, 1.0)?;
        let first = &series.frames[0].curve;

        let g0 = extract_graph_branch(first, window, BARRIER_NODES)?;
        let b_y = calibrate_epsilon(&g0, &FieldSelector::Y.on_graph(&g0), &template)?;
        let y = comparison_check(series, &b_y, FieldSelector::Y, window)?;

        let shrunk = (window.0 + 0.1 * m, window.1 - 0.1 * m);
        let g0s = extract_graph_branch(first, shrunk, BARRIER_NODES)?;
        let b_xs = calibrate_epsilon(&g0s, &FieldSelector::Xs.on_graph(&g0s), &template)?;
        let xs = comparison_check(series, &b_xs, FieldSelector::Xs, shrunk)?;

        let residual = subsolution_residual(&b_y, series, window)?
            .max_residual
            .max(subsolution_residual(&b_xs, series, window)?.max_residual);
        let pass = y.passed && xs.passed && residual <= RESIDUAL_TOL;
        let tightest = if y.min_margin <= xs.min_margin { y.tightest_frame } else { xs.tightest_frame };
        Ok(Verdict::new(
            NAME,
            Status::from_pass(pass),
            format!(
                "window [{:.6}, {:.6}], λ = π²/M² = {:.6e}; y {}, x_s {}, max φ_t − φ_ss = {residual:.3e}",
                window.0,
                window.1,
                (PI / m).powi(2),
                Status::from_pass(y.passed).as_str(),
                Status::from_pass(xs.passed).as_str()
            ),
        )
        .margin("y_min_margin", y.min_margin)
        .margin("y_boundary_min", y.boundary_min)
        .margin("y_epsilon", b_y.epsilon)
        .margin("xs_min_margin", xs.min_margin)
        .margin("xs_boundary_min", xs.boundary_min)
        .margin("xs_epsilon", b_xs.epsilon)
        .margin("max_residual", residual)
        .at(Some(tightest)))
    };
    run().unwrap_or_else(|e| Verdict::new(NAME, Status::NotApplicable, format!("upper branch unavailable: {e}")))
}

fn vertical_tangent(records: &[FrameRecord], threshold: f64) -> Verdict {
    let first_below = records.iter().position(|r| r.vertical_gap < threshold);
    let detail = match first_below {
        Some(i) => format!("gap first below {threshold} at t = {:.6e} (frame {i})", records[i].t),
        None => format!("gap stays ≥ {threshold} on every frame"),
    };
    Verdict::new("vertical_tangent", Status::Info, detail)
        .margin("threshold", threshold)
        .margin("initial_gap", records[0].vertical_gap)
        .margin("min_gap", fold_min(records.iter().map(|r| r.vertical_gap)))
        .margin("first_t_below", first_below.map_or(f64::NAN, |i| records[i].t))
        .at(first_below.or_else(|| argmin(records.iter().map(|r| r.vertical_gap).enumerate())))
}

fn limit_region(series: &FrameSeries) -> Verdict {
    const NAME: &str = "limit_region";
    let track = limit_region_summary(series);
    if track.frames.len() < 2 {
        return Verdict::new(
            NAME,
            Status::NotApplicable,
            format!("{} frames with a convex projection; nesting needs two", track.frames.len()),
        );
    }
    let first_bad = track.frames.iter().find(|f| !f.nested_in_prev).map(|f| f.frame);
    let max_h = track.frames.iter().filter_map(|f| f.hausdorff_to_prev).fold(0.0, f64::max);
    Verdict::new(
        NAME,
        Status::from_pass(track.nesting_holds && track.areas_decrease),
        format!(
            "{} hulls tracked, {} frames excluded; nested {}, areas decreasing {}",
            track.frames.len(),
            track.excluded.len(),
            track.nesting_holds,
            track.areas_decrease
        ),
    )
    .margin("diam_d", track.diam_d)
    .margin("max_hausdorff_to_prev", max_h)
    .margin("final_area", track.frames[track.frames.len() - 1].area)
    .at(first_bad.or(Some(track.frames[track.frames.len() - 1].frame)))
}

fn extinction(series: &FrameSeries) -> Verdict {
    let (lo, hi) = series.extinction_bracket.unwrap_or((f64::NAN, f64::NAN));
    let detail = match series.extinction_time() {
        Some(t) => format!("diameter below threshold at t = {t:.6e}"),
        None => format!("no extinction estimate (stop reason {})", series.stop_reason.as_str()),
    };
    Verdict::new("extinction", Status::Info, detail)
        .margin("extinction_time", hi)
        .margin("bracket_lo", lo)
        .margin("bracket_hi", hi)
        .margin("final_time", series.final_time())
        .at(Some(series.frames.len() - 1))
}

/// The initial curve of a run.
pub fn load_curve(cfg: &RunConfig) -> Result<ClosedCurve> {
    match &cfg.curve {
        CurveSource::Zoo(spec) => Ok(spec.build()?),
        CurveSource::Snapshot { path, n } => {
            let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
            let curve = ClosedCurve::from_json(&text)?;
            Ok(match n {
                Some(n) => resample_uniform(&curve, *n)?,
                None => curve,
            })
        }
    }
}

pub fn policy(cfg: &RunConfig) -> RunPolicy {
    RunPolicy {
        safety: cfg.safety,
        archive_every: cfg.archive_every,
        diameter_min: cfg.stop.diameter_min,
        curvature_max: cfg.stop.curvature_max,
        max_steps: cfg.stop.max_steps,
        c_floor: cfg.c_floor,
        stop_on_projection_invalid: false,
    }
}

/// Frame records and verdicts of a finished series.
pub fn analyze(cfg: &RunConfig, series: &FrameSeries) -> Result<(Vec<FrameRecord>, Verdicts)> {
    let probes = Probes::new(&series.frames[0].curve, &cfg.checks)?;
    let records = series.frames.iter().map(|f| analyze_frame(f, &probes, cfg)).collect::<Result<Vec<_>>>()?;
    let c = &cfg.checks;
    let hypothesis = theorem_hypothesis(&records);
    let mut checks = Vec::new();
    if c.convexity {
        checks.push(theorem_1a(&records));
        checks.push(theorem_1b(&records, series, cfg));
    }
    if c.sturm {
        checks.push(sturm(&records));
    }
    if c.planes > 0 {
        checks.push(plane_counts(&records));
    }
    if c.slopes {
        checks.push(gamma_chain(&records));
        checks.push(gated("three_point", &hypothesis, || three_point(&records)));
        checks.push(gated("diameter_bound", &hypothesis, || diameter_bound(&records)));
    }
    if c.barrier {
        checks.push(gated("barrier", &hypothesis, || barrier(series)));
    }
    if c.vertical_tangent {
        checks.push(vertical_tangent(&records, c.vertical_tangent_threshold));
    }
    if c.limit_region {
        checks.push(limit_region(series));
    }
    checks.push(extinction(series));
    let verdicts = Verdicts {
        stop_reason: series.stop_reason,
        steps: series.steps,
        frames: series.frames.len(),
        final_time: series.final_time(),
        checks,
    };
    Ok((records, verdicts))
}

/// The contents of `series.csv`.
pub fn series_csv(checks: &ChecksConfig, records: &[FrameRecord]) -> String {
    let mut out = csv_columns(checks).join(",");
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{}", r.csv_row(checks));
    }
    out
}

/// `frames/NNNNNN.json`: a curve snapshot with its time and step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameFile {
    pub t: f64,
    pub step: u64,
    #[serde(flatten)]
    pub curve: CurveSnapshot,
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| LabError::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| LabError::io(path, e))
}

fn is_frame_file(name: &str) -> bool {
    name.len() == 11 && name.ends_with(".json") && name[..6].bytes().all(|b| b.is_ascii_digit())
}

/// Frame files of a run directory, in frame order.
pub fn frame_paths(out_dir: &Path) -> Result<Vec<PathBuf>> {
    let dir = out_dir.join("frames");
    if !dir.is_dir() {
        return Err(LabError::MissingArtifact(dir));
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .map_err(|e| LabError::io(&dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(is_frame_file))
        .collect();
    paths.sort();
    Ok(paths)
}

pub fn read_frame(path: &Path) -> Result<(f64, ClosedCurve)> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    let frame: FrameFile =
        serde_json::from_str(&text).map_err(|e| LabError::Malformed { path: path.into(), message: e.to_string() })?;
    Ok((frame.t, frame.curve.into_curve()?))
}

/// Writes `plots/panels.svg` and `plots/overlay.svg` for `count` frames
/// spread over the run.
pub fn write_plots(out_dir: &Path, frames: &[(f64, &ClosedCurve)], count: usize) -> Result<()> {
    let dir = out_dir.join("plots");
    create_dir(&dir)?;
    let picked: Vec<PlotFrame<'_>> =
        pick_frames(frames.len(), count).into_iter().map(|i| PlotFrame { t: frames[i].0, curve: frames[i].1 }).collect();
    let style = Style::default();
    write(&dir.join("panels.svg"), &emit_svg(&picked, &style))?;
    write(&dir.join("overlay.svg"), &emit_overlay(&picked, &style))
}

/// Re-plots a finished run from its frame files.
pub fn plot_run(out_dir: &Path, count: usize) -> Result<()> {
    let frames = frame_paths(out_dir)?.iter().map(|p| read_frame(p)).collect::<Result<Vec<_>>>()?;
    let refs: Vec<(f64, &ClosedCurve)> = frames.iter().map(|(t, c)| (*t, c)).collect();
    write_plots(out_dir, &refs, count)
}

pub fn write_artifacts(cfg: &RunConfig, series: &FrameSeries, records: &[FrameRecord], verdicts: &Verdicts) -> Result<()> {
    let out = &cfg.output.dir;
    create_dir(out)?;
    write(&out.join("series.csv"), &series_csv(&cfg.checks, records))?;
    let json = serde_json::to_string_pretty(verdicts).expect("verdicts always serialize");
    write(&out.join("verdicts.json"), &(json + "\n"))?;
    if cfg.output.write_frames {
        let dir = out.join("frames");
        create_dir(&dir)?;
        // Frames of an earlier, longer run would otherwise linger.
        for stale in frame_paths(out)? {
            fs::remove_file(&stale).map_err(|e| LabError::io(&stale, e))?;
        }
        for (i, f) in series.frames.iter().enumerate() {
            let file = FrameFile { t: f.t, step: f.step_index, curve: CurveSnapshot::from(&f.curve) };
            let text = serde_json::to_string(&file).expect("finite samples always serialize");
            write(&dir.join(format!("{i:06}.json")), &text)?;
        }
    }
    let frames: Vec<(f64, &ClosedCurve)> = series.frames.iter().map(|f| (f.t, &f.curve)).collect();
    write_plots(out, &frames, cfg.output.plot_frames)
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub series: FrameSeries,
    pub records: Vec<FrameRecord>,
    pub verdicts: Verdicts,
}

/// Runs the flow, evaluates the enabled checks and writes the artifacts.
/// Check failures are recorded in the verdicts; only I/O and input errors
/// are returned as errors.
pub fn execute_run(cfg: &RunConfig) -> Result<RunOutcome> {
    let curve = load_curve(cfg)?;
    log::info!("flowing a curve in ℝ^{} with {} samples", curve.dim(), curve.len());
    let series = run_flow(&curve, &policy(cfg))?;
    log::info!(
        "stopped after {} steps at t = {:.6e} ({}); {} frames archived",
        series.steps,
        series.final_time(),
        series.stop_reason.as_str(),
        series.frames.len()
    );
    let (records, verdicts) = analyze(cfg, &series)?;
    write_artifacts(cfg, &series, &records, &verdicts)?;
    Ok(RunOutcome { series, records, verdicts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(f64::NAN), "nan");
        let x = 2.0f64.sqrt();
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn increases_skip_missing_counts() {
        let seq = [Some(4), Some(4), None, Some(6), Some(2), Some(3)];
        assert_eq!(increases(seq.into_iter()), (1, 3, Some(5)));
    }

    #[test]
    fn frame_file_names() {
        assert!(is_frame_file("000012.json"));
        assert!(!is_frame_file("00012.json"));
        assert!(!is_frame_file("verdicts.json"));
    }

    #[test]
    fn slack_of_equal_infinities_is_zero() {
        assert_eq!(slack(f64::INFINITY, f64::INFINITY), 0.0);
        assert_eq!(slack(1.0, f64::INFINITY), f64::INFINITY);
    }
}
