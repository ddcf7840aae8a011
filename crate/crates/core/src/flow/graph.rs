//! Graph representation of a branch `x ↦ (y, z₁, …)` and its flow
//! `r_t = r_xx / (1 + |r_x|²)` with frozen Dirichlet ends.

use crate::curve::ClosedCurve;
use crate::{Error, Result};

/// Node values of a graph map on a uniform grid `x_k = x0 + k·dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphState {
    pub x0: f64,
    pub dx: f64,
    /// Number of graph components, `dim − 1`.
    pub components: usize,
    /// Row-major `nodes × components`.
    pub values: Vec<f64>,
    pub t: f64,
}

impl GraphState {
    pub fn new(x0: f64, dx: f64, components: usize, values: Vec<f64>, t: f64) -> Result<Self> {
        if !(dx > 0.0) || components == 0 || !values.len().is_multiple_of(components) || values.len() / components < 3 {
            return Err(Error::invalid("graph needs dx > 0 and at least three nodes"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i / components));
        }
        Ok(Self { x0, dx, components, values, t })
    }

    /// Samples `f(x, out)` on `nodes` grid points spanning `[a, b]`.
    pub fn sample(a: f64, b: f64, nodes: usize, components: usize, f: impl Fn(f64, &mut [f64])) -> Result<Self> {
        if nodes < 3 || !(b > a) {
            return Err(Error::invalid("graph window must satisfy a < b with at least three nodes"));
        }
        let dx = (b - a) / (nodes - 1) as f64;
        let mut values = vec![0.0; nodes * components];
        for (k, row) in values.chunks_exact_mut(components).enumerate() {
            f(a + k as f64 * dx, row);
        }
        Self::new(a, dx, components, values, 0.0)
    }

    pub fn nodes(&self) -> usize {
        self.values.len() / self.components
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    pub fn value(&self, k: usize) -> &[f64] {
        &self.values[k * self.components..(k + 1) * self.components]
    }

    /// Values of one component at every node.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.values.chunks_exact(self.components).map(|r| r[i]).collect()
    }

    /// Largest node-wise Euclidean distance to another graph on the same grid.
    pub fn sup_distance(&self, other: &GraphState) -> Result<f64> {
        if self.values.len() != other.values.len() || self.components != other.components {
            return Err(Error::invalid("graphs live on different grids"));
        }
        if (self.x0 - other.x0).abs() > 1e-12 * (1.0 + self.x0.abs()) || (self.dx - other.dx).abs() > 1e-12 * self.dx {
            return Err(Error::invalid("graphs live on different grids"));
        }
        Ok(self
            .values
            .chunks_exact(self.components)
            .zip(other.values.chunks_exact(self.components))
            .map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max))
    }
}

/// Largest stable explicit step, `safety · Δx² / 2`.
pub fn graph_stable_dt(state: &GraphState, safety: f64) -> f64 {
    safety * state.dx * state.dx / 2.0
}

/// One explicit Euler step of the graph flow on interior nodes; the two end
/// values stay fixed.
pub fn graph_step(state: &GraphState, dt: f64) -> Result<GraphState> {
    if !(dt > 0.0) || dt > graph_stable_dt(state, 1.0) * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("graph step {dt} outside (0, Δx²/2]")));
    }
    let m = state.components;
    let n = state.nodes();
    let mut next = state.values.clone();
    let (h, h2) = (2.0 * state.dx, state.dx * state.dx);
    for k in 1..n - 1 {
        let (l, c, r) = (state.value(k - 1), state.value(k), state.value(k + 1));
        let grad2: f64 = (0..m).map(|i| ((r[i] - l[i]) / h).powi(2)).sum();
        for i in 0..m {
            next[k * m + i] = c[i] + dt * (r[i] - 2.0 * c[i] + l[i]) / h2 / (1.0 + grad2);
        }
    }
    Ok(GraphState { values: next, t: state.t + dt, ..state.clone() })
}

/// Curvature of the graph at interior nodes `1..nodes−1`.
pub fn graph_curvature(state: &GraphState) -> Vec<f64> {
    let m = state.components;
    let (h, h2) = (2.0 * state.dx, state.dx * state.dx);
    (1..state.nodes() - 1)
        .map(|k| {
            let (l, c, r) = (state.value(k - 1), state.value(k), state.value(k + 1));
            let (mut rx2, mut rxx2, mut cross) = (0.0, 0.0, 0.0);
            for i in 0..m {
                let rx = (r[i] - l[i]) / h;
                let rxx = (r[i] - 2.0 * c[i] + l[i]) / h2;
                rx2 += rx * rx;
                rxx2 += rxx * rxx;
                cross += rx * rxx;
            }
            let g = 1.0 + rx2;
            (g * rxx2 - cross * cross).max(0.0).sqrt() / g.powf(1.5)
        })
        .collect()
}

/// The higher of the two arcs of a curve over an x-window: the sample
/// indices along it in traversal order, starting at or before the window
/// entry and ending at or after its exit.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperBranch {
    pub indices: Vec<usize>,
    /// `+1` if x increases along `indices`, `−1` otherwise.
    pub x_direction: f64,
}

/// Run of samples on the cyclic arc `from → to` whose segments meet `[a, b]`.
fn arc_run(xs: &[f64], from: usize, to: usize, a: f64, b: f64) -> Result<Vec<usize>> {
    let n = xs.len();
    let len = (to + n - from) % n;
    let mut run: Vec<usize> = Vec::new();
    let mut closed = false;
    for step in 0..len {
        let (i, j) = ((from + step) % n, (from + step + 1) % n);
        let meets = xs[i].min(xs[j]) <= b && xs[i].max(xs[j]) >= a;
        if meets {
            if closed {
                return Err(Error::Branch("branch re-enters the window".into()));
            }
            if run.is_empty() {
                run.push(i);
            }
            run.push(j);
        } else if !run.is_empty() {
            closed = true;
        }
    }
    if run.len() < 2 {
        return Err(Error::Branch("arc does not cross the window".into()));
    }
    let sign = (xs[run[1]] - xs[run[0]]).signum();
    if sign == 0.0 || run.windows(2).any(|w| (xs[w[1]] - xs[w[0]]) * sign <= 0.0) {
        return Err(Error::Branch("x is not strictly monotone on the branch".into()));
    }
    Ok(run)
}

fn height_at(curve: &ClosedCurve, run: &[usize], x: f64) -> f64 {
    for w in run.windows(2) {
        let (p, q) = (curve.point(w[0]), curve.point(w[1]));
        if (p[0] - x) * (q[0] - x) <= 0.0 {
            let s = (x - p[0]) / (q[0] - p[0]);
            return p[1] + s * (q[1] - p[1]);
        }
    }
    f64::NAN
}

/// Finds the branch of `{a ≤ x ≤ b}` with larger y.
pub fn upper_branch(curve: &ClosedCurve, window: (f64, f64)) -> Result<UpperBranch> {
    let (a, b) = window;
    if !(a < b) {
        return Err(Error::invalid("window must satisfy a < b"));
    }
    let xs: Vec<f64> = curve.points().map(|p| p[0]).collect();
    let (imin, imax) = (0..xs.len()).fold((0, 0), |(lo, hi), j| {
        (if xs[j] < xs[lo] { j } else { lo }, if xs[j] > xs[hi] { j } else { hi })
    });
    if !(xs[imin] < a && b < xs[imax]) {
        return Err(Error::Branch(format!(
            "window [{a}, {b}] not inside the x-range ({}, {})",
            xs[imin], xs[imax]
        )));
    }
    let forward = arc_run(&xs, imin, imax, a, b)?;
    let backward = arc_run(&xs, imax, imin, a, b)?;
    let mid = 0.5 * (a + b);
    let (yf, yb) = (height_at(curve, &forward, mid), height_at(curve, &backward, mid));
    let scale = curve.max_radius().max(f64::MIN_POSITIVE);
    if !((yf - yb).abs() > 1e-12 * scale) {
        return Err(Error::Branch("the two branches cannot be separated".into()));
    }
    let indices = if yf > yb { forward } else { backward };
    let x_direction = (xs[indices[1]] - xs[indices[0]]).signum();
    Ok(UpperBranch { indices, x_direction })
}

/// Resamples the upper branch over `[a, b]` as a graph on `nodes` uniform
/// x-nodes, interpolating linearly between samples.
pub fn extract_graph_branch(curve: &ClosedCurve, window: (f64, f64), nodes: usize) -> Result<GraphState> {
    let branch = upper_branch(curve, window)?;
    let (a, b) = window;
    let m = curve.dim() - 1;
    let mut ordered: Vec<&[f64]> = branch.indices.iter().map(|&j| curve.point(j)).collect();
    if branch.x_direction < 0.0 {
        ordered.reverse();
    }
    GraphState::sample(a, b, nodes, m, |x, out| {
        let seg = ordered.partition_point(|p| p[0] <= x).clamp(1, ordered.len() - 1);
        let (p, q) = (ordered[seg - 1], ordered[seg]);
        let s = (x - p[0]) / (q[0] - p[0]);
        for i in 0..m {
            out[i] = p[i + 1] + s * (q[i + 1] - p[i + 1]);
        }
    })
}
