use super::ClosedCurve;

/// Arclength parametrisation of a closed polyline, with linear and cubic
/// (four-point Lagrange in arclength) evaluation at any `s`, taken modulo the
/// total length.
#[derive(Clone, Debug)]
pub struct ArclengthParam<'a> {
    curve: &'a ClosedCurve,
    /// `cum[k]` is the arclength at sample `k`; `cum[n]` is the total length.
    cum: Vec<f64>,
}

impl<'a> ArclengthParam<'a> {
    pub fn new(curve: &'a ClosedCurve) -> Self {
        let n = curve.len();
        let mut cum = Vec::with_capacity(n + 1);
        let mut s = 0.0;
        cum.push(0.0);
        for j in 0..n {
            s += curve.segment_length(j);
            cum.push(s);
        }
        Self { curve, cum }
    }

    pub fn curve(&self) -> &'a ClosedCurve {
        self.curve
    }

    pub fn total(&self) -> f64 {
        self.cum[self.cum.len() - 1]
    }

    pub fn node_arclength(&self, k: usize) -> f64 {
        self.cum[k]
    }

    /// Segment index and arclength offset into it, for `s` wrapped into
    /// `[0, L)`.
    fn locate(&self, s: f64) -> (usize, f64) {
        let total = self.total();
        let mut s = s % total;
        if s < 0.0 {
            s += total;
        }
        let n = self.curve.len();
        let k = match self.cum.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(k) => k.min(n - 1),
            Err(k) => k - 1,
        };
        (k, s - self.cum[k])
    }

    /// Unwrapped arclength of sample `k + offset` relative to segment `k`.
    fn knot(&self, k: usize, offset: isize) -> f64 {
        let n = self.curve.len() as isize;
        let idx = k as isize + offset;
        let wraps = idx.div_euclid(n);
        self.cum[idx.rem_euclid(n) as usize] + wraps as f64 * self.total()
    }

    pub fn eval_linear(&self, s: f64, out: &mut [f64]) {
        let (k, off) = self.locate(s);
        let len = self.cum[k + 1] - self.cum[k];
        let w = if len > 0.0 { off / len } else { 0.0 };
        let a = self.curve.point(k);
        let b = self.curve.point(k + 1);
        for d in 0..out.len() {
            out[d] = a[d] + w * (b[d] - a[d]);
        }
    }

    pub fn eval_cubic(&self, s: f64, out: &mut [f64]) {
        let (k, off) = self.locate(s);
        let x = self.cum[k] + off;
        let knots = [self.knot(k, -1), self.knot(k, 0), self.knot(k, 1), self.knot(k, 2)];
        let weights = lagrange_weights(&knots, x);
        out.fill(0.0);
        for (i, w) in weights.iter().enumerate() {
            let p = self.curve.point((k + self.curve.len() + i - 1) % self.curve.len());
            for d in 0..out.len() {
                out[d] += w * p[d];
            }
        }
    }

    /// Linear interpolation of a per-sample scalar field.
    pub fn interp_field(&self, field: &[f64], s: f64) -> f64 {
        let (k, off) = self.locate(s);
        let len = self.cum[k + 1] - self.cum[k];
        let w = if len > 0.0 { off / len } else { 0.0 };
        let n = self.curve.len();
        field[k] + w * (field[(k + 1) % n] - field[k])
    }
}

fn lagrange_weights(knots: &[f64; 4], x: f64) -> [f64; 4] {
    let mut w = [1.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                w[i] *= (x - knots[j]) / (knots[i] - knots[j]);
            }
        }
    }
    w
}
