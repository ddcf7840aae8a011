//! Explicit time stepping of `γ_t = γ_ss` with per-step arclength
//! redistribution, plus the graph flow used for interior comparisons.

mod graph;
mod residual;

pub use graph::{
    extract_graph_branch, graph_curvature, graph_stable_dt, graph_step, upper_branch, GraphState, UpperBranch,
};
pub use residual::{normal_plane_image, projection_flow_residual};

use serde::{Deserialize, Serialize};

use crate::curve::{
    curvature_vectors, diameter, diameter_lower_bound, polyline_length, resample_uniform, ClosedCurve,
    DEFAULT_C_FLOOR,
};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub curve: ClosedCurve,
    pub t: f64,
    pub step_index: u64,
}

impl FlowState {
    pub fn initial(curve: ClosedCurve) -> Self {
        Self { curve, t: 0.0, step_index: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    DiameterBelowThreshold,
    CurvatureAboveThreshold,
    StepBudget,
    ProjectionInvalid,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::DiameterBelowThreshold => "diameter_below_threshold",
            StopReason::CurvatureAboveThreshold => "curvature_above_threshold",
            StopReason::StepBudget => "step_budget",
            StopReason::ProjectionInvalid => "projection_invalid",
        }
    }
}

/// Archived frames of one run. Frame times strictly increase; the first
/// frame is the initial curve and the last is the state at the stop.
#[derive(Clone, Debug)]
pub struct FrameSeries {
    pub frames: Vec<FlowState>,
    pub stop_reason: StopReason,
    /// `[t_stop − dt, t_stop]` when the run stopped on the diameter threshold.
    pub extinction_bracket: Option<(f64, f64)>,
    pub steps: u64,
}

impl FrameSeries {
    /// Builds a series from explicit frames (for example a static curve
    /// repeated at several times). Times must strictly increase.
    pub fn from_frames(frames: Vec<FlowState>, stop_reason: StopReason) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::invalid("a frame series needs at least one frame"));
        }
        if frames.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::invalid("frame times must strictly increase"));
        }
        let steps = frames.last().map(|f| f.step_index).unwrap_or(0);
        Ok(Self { frames, stop_reason, extinction_bracket: None, steps })
    }

    pub fn final_time(&self) -> f64 {
        self.frames.last().map(|f| f.t).unwrap_or(0.0)
    }

    /// The extinction estimate: the stop time when stopped on diameter.
    pub fn extinction_time(&self) -> Option<f64> {
        self.extinction_bracket.map(|(_, hi)| hi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunPolicy {
    pub safety: f64,
    pub archive_every: u64,
    pub diameter_min: f64,
    /// Defaults to `10³ / L₀` when `None`.
    pub curvature_max: Option<f64>,
    pub max_steps: u64,
    pub c_floor: f64,
    /// Stop as soon as some sample has `c < c_floor` (after the first step).
    pub stop_on_projection_invalid: bool,
}

impl Default for RunPolicy {
    fn default() -> Self {
        Self {
            safety: 0.4,
            archive_every: 50,
            diameter_min: 0.02,
            curvature_max: None,
            max_steps: 5_000_000,
            c_floor: DEFAULT_C_FLOOR,
            stop_on_projection_invalid: false,
        }
    }
}

/// Stable explicit step: `safety × (min segment)² / 2`.
pub fn choose_dt(state: &FlowState, safety: f64) -> f64 {
    let h = state.curve.min_segment_length();
    safety * h * h / 2.0
}

fn advance(state: &FlowState, velocity: &[f64], dt: f64) -> Result<FlowState> {
    let lost = || Error::ImmersionLost { step: state.step_index + 1, t: state.t + dt };
    let coords: Vec<f64> = state.curve.coords().iter().zip(velocity).map(|(x, k)| x + dt * k).collect();
    let moved = ClosedCurve::new(state.curve.dim(), coords).map_err(|_| lost())?;
    let curve = resample_uniform(&moved, moved.len()).map_err(|_| lost())?;
    Ok(FlowState { curve, t: state.t + dt, step_index: state.step_index + 1 })
}

/// One explicit Euler step `γ ← γ + dt γ_ss` followed by equilateral
/// redistribution with the same sample count.
pub fn csf_step(state: &FlowState, dt: f64) -> Result<FlowState> {
    if !(dt > 0.0) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    let bound = choose_dt(state, 1.0);
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("time step {dt} exceeds the stability bound {bound}")));
    }
    let mut velocity = Vec::new();
    curvature_vectors(&state.curve, &mut velocity)?;
    advance(state, &velocity, dt)
}

/// Steps until exactly `t_end`, shortening the final step.
pub fn evolve_until(state: &FlowState, t_end: f64, safety: f64) -> Result<FlowState> {
    let mut s = state.clone();
    while s.t < t_end {
        let dt = choose_dt(&s, safety).min(t_end - s.t);
        if dt <= 0.0 {
            break;
        }
        s = csf_step(&s, dt)?;
    }
    Ok(s)
}

fn min_c(curve: &ClosedCurve) -> f64 {
    let n = curve.len();
    (0..n)
        .map(|j| {
            let a = curve.point(j + n - 1);
            let b = curve.point(j + 1);
            let h2: f64 = (b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2);
            let all: f64 = a.iter().zip(b).map(|(x, y)| (y - x).powi(2)).sum();
            h2 / all
        })
        .fold(f64::INFINITY, f64::min)
}

/// Runs the flow from `curve0` until a stop condition, archiving every
/// `archive_every` steps.
pub fn run_flow(curve0: &ClosedCurve, policy: &RunPolicy) -> Result<FrameSeries> {
    if !(policy.safety > 0.0 && policy.safety <= 1.0) {
        return Err(Error::invalid(format!("safety must lie in (0, 1], got {}", policy.safety)));
    }
    if policy.archive_every == 0 || !(policy.diameter_min > 0.0) {
        return Err(Error::invalid("archive_every must be ≥ 1 and diameter_min > 0"));
    }
    let curvature_max = policy.curvature_max.unwrap_or(1e3 / polyline_length(curve0));
    let mut state = FlowState::initial(curve0.clone());
    let mut frames = vec![state.clone()];
    let mut extinction_bracket = None;
    let mut velocity = Vec::new();

    let stop_reason = loop {
        if state.step_index >= policy.max_steps {
            break StopReason::StepBudget;
        }
        if curvature_vectors(&state.curve, &mut velocity)? > curvature_max {
            break StopReason::CurvatureAboveThreshold;
        }
        let dt = choose_dt(&state, policy.safety);
        state = match advance(&state, &velocity, dt) {
            Ok(next) => next,
            Err(Error::ImmersionLost { .. }) => break StopReason::CurvatureAboveThreshold,
            Err(e) => return Err(e),
        };
        if diameter_lower_bound(&state.curve) < policy.diameter_min && diameter(&state.curve) < policy.diameter_min {
            extinction_bracket = Some((state.t - dt, state.t));
            break StopReason::DiameterBelowThreshold;
        }
        if policy.stop_on_projection_invalid && min_c(&state.curve) < policy.c_floor {
            break StopReason::ProjectionInvalid;
        }
        if state.step_index.is_multiple_of(policy.archive_every) {
            frames.push(state.clone());
        }
    };
    let steps = state.step_index;
    if frames.last().is_some_and(|f| state.t > f.t) {
        frames.push(state);
    }
    Ok(FrameSeries { frames, stop_reason, extinction_bracket, steps })
}
