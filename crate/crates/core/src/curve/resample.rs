use super::{ClosedCurve, MIN_SAMPLES};
use crate::{Error, Result};

/// Redistributes `n_out` samples along the piecewise-linear interpolant so
/// that all chords, including the closing one, have the same length.
///
/// Sample 0 is kept in place. The chord length is the root of the closure
/// defect of a forward march along the polyline; for an input that is
/// already equilateral with `n_out = N` the march reproduces the samples.
pub fn resample_uniform(curve: &ClosedCurve, n_out: usize) -> Result<ClosedCurve> {
    if n_out < MIN_SAMPLES {
        return Err(Error::TooFewSamples(n_out));
    }
    let march = March::new(curve)?;
    let total = march.cum[curve.len()];
    let hi = total / n_out as f64;
    // The march accumulates one rounding error per chord.
    let tol = 4.0 * f64::EPSILON * (n_out + curve.len()) as f64 * total;

    // Secant iteration on the chord length, safeguarded by a bracket. The
    // defect is nonnegative at the arclength spacing `hi` (a chord never
    // exceeds the arc it spans), so a value at or below `tol` there is
    // rounding noise on an already equilateral polyline.
    let dim = curve.dim();
    let mut buf = Vec::with_capacity(n_out * dim);
    let eval = |d: f64, buf: &mut Vec<f64>| {
        buf.clear();
        march.defect(d, n_out, Some(buf))
    };
    let mut a = hi;
    let mut fa = eval(a, &mut buf);
    if fa <= tol {
        return ClosedCurve::new(dim, buf);
    }
    let (mut lo, mut flo) = (0.0, -total);
    let (mut up, mut fup) = (a, fa);
    let mut b = hi - fa / n_out as f64;
    for _ in 0..100 {
        if !(b > lo && b < up) {
            b = 0.5 * (lo + up);
        }
        let fb = eval(b, &mut buf);
        if fb.abs() <= tol {
            return ClosedCurve::new(dim, buf);
        }
        if fb > 0.0 {
            (up, fup) = (b, fb);
        } else {
            (lo, flo) = (b, fb);
        }
        let next = if fb != fa { b - fb * (b - a) / (fb - fa) } else { 0.5 * (lo + up) };
        (a, fa) = (b, fb);
        b = next;
        if up - lo <= 1e-16 * total || (b - a).abs() <= f64::EPSILON * hi {
            break;
        }
    }
    let best = if fup.abs() < flo.abs() { up } else { lo };
    march.finish(best, n_out)
}

struct March<'a> {
    curve: &'a ClosedCurve,
    cum: Vec<f64>,
    /// Squared segment lengths and their reciprocals.
    ee: Vec<f64>,
    inv_ee: Vec<f64>,
}

impl<'a> March<'a> {
    fn new(curve: &'a ClosedCurve) -> Result<Self> {
        let n = curve.len();
        let mut cum = Vec::with_capacity(n + 1);
        let mut ee = Vec::with_capacity(n);
        let mut inv_ee = Vec::with_capacity(n);
        cum.push(0.0);
        for (j, l) in curve.segment_lengths().into_iter().enumerate() {
            if l == 0.0 {
                return Err(Error::DegenerateSegment(j, (j + 1) % n));
            }
            cum.push(cum[j] + l);
            ee.push(l * l);
            inv_ee.push(1.0 / (l * l));
        }
        Ok(Self { curve, cum, ee, inv_ee })
    }

    fn finish(&self, d: f64, n_out: usize) -> Result<ClosedCurve> {
        let mut out = Vec::with_capacity(n_out * self.curve.dim());
        self.defect(d, n_out, Some(&mut out));
        ClosedCurve::new(self.curve.dim(), out)
    }

    /// Marches `n_out` chords of length `d` from sample 0 and returns the
    /// unwrapped polyline arclength reached minus the total length. When
    /// `out` is given, the first `n_out` march points are written to it.
    fn defect(&self, d: f64, n_out: usize, mut out: Option<&mut Vec<f64>>) -> f64 {
        let n = self.curve.len();
        let dim = self.curve.dim();
        let coords = self.curve.coords();
        let total = self.cum[n];
        let d2 = d * d;
        let mut p = coords[..dim].to_vec();
        let mut wraps = 0usize;
        let mut k = 0usize; // segment index modulo n
        let mut tau = 0.0;
        if let Some(o) = out.as_deref_mut() {
            o.extend_from_slice(&p);
        }
        let mut visited = 0usize;
        for step in 0..n_out {
            loop {
                let a = &coords[k * dim..(k + 1) * dim];
                let b = if k + 1 == n { &coords[..dim] } else { &coords[(k + 1) * dim..(k + 2) * dim] };
                let mut ew = 0.0;
                let mut ww = 0.0;
                for i in 0..dim {
                    let w = a[i] - p[i];
                    ew += (b[i] - a[i]) * w;
                    ww += w * w;
                }
                // Larger root of |a + τe − p|² = d²; the march is inside the
                // ball of radius d around p until that root. A far end well
                // inside the ball puts the root past this segment.
                let ee = self.ee[k];
                if ee + 2.0 * ew + ww >= d2 * (1.0 - 1e-9) {
                    let disc = ew * ew - ee * (ww - d2);
                    if disc >= 0.0 {
                        let root = (-ew + disc.sqrt()) * self.inv_ee[k];
                        if root >= tau - 1e-12 && root <= 1.0 + 1e-12 {
                            tau = root.clamp(0.0, 1.0);
                            for i in 0..dim {
                                p[i] = a[i] + tau * (b[i] - a[i]);
                            }
                            break;
                        }
                    }
                }
                k += 1;
                if k == n {
                    k = 0;
                    wraps += 1;
                }
                tau = 0.0;
                visited += 1;
                if visited > 4 * n + 4 * n_out {
                    return f64::INFINITY;
                }
            }
            if step + 1 < n_out {
                if let Some(o) = out.as_deref_mut() {
                    o.extend_from_slice(&p);
                }
            }
        }
        wraps as f64 * total + self.cum[k] + tau * (self.cum[k + 1] - self.cum[k]) - total
    }
}
