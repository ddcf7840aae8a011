//! Consistency of archived frames with the projected normal-velocity law
//! `γ̄_t^⊥ = c k̄ N̄`.

use super::FrameSeries;
use crate::curve::{projection_geometry, ArclengthParam, ProjectionGeometry};

/// Arclength `s` on `next` whose point lies in the normal plane of the
/// sample `p` (unit tangent `tangent`), found by secant iteration from
/// `s_guess`. `None` when the iteration wanders more than `reach` away.
pub fn normal_plane_image(next: &ArclengthParam<'_>, p: &[f64], tangent: &[f64], s_guess: f64, reach: f64) -> Option<f64> {
    let mut buf = vec![0.0; p.len()];
    let mut f = |s: f64| {
        next.eval_cubic(s, &mut buf);
        buf.iter().zip(p).zip(tangent).map(|((q, p), t)| (q - p) * t).sum::<f64>()
    };
    let h = 1e-3 * reach;
    let (mut s0, mut s1) = (s_guess, s_guess + h);
    let (mut f0, mut f1) = (f(s0), f(s1));
    for _ in 0..40 {
        if f1 == 0.0 {
            break;
        }
        let den = f1 - f0;
        if den == 0.0 {
            return None;
        }
        let s2 = s1 - f1 * (s1 - s0) / den;
        if !s2.is_finite() || (s2 - s_guess).abs() > reach {
            return None;
        }
        (s0, f0) = (s1, f1);
        s1 = s2;
        f1 = f(s1);
        if (s1 - s0).abs() < 1e-14 * next.total() {
            break;
        }
    }
    Some(s1)
}

fn residual_pair(
    g0: &ProjectionGeometry,
    g1: &ProjectionGeometry,
    next: &ArclengthParam<'_>,
    s_space0: &[f64],
    l0: f64,
    dt: f64,
) -> f64 {
    let dim = next.curve().dim();
    let ck1: Vec<f64> = g1.c.iter().zip(&g1.kbar).map(|(c, k)| c * k).collect();
    let nx1: Vec<f64> = g1.nbar.iter().map(|v| v[0]).collect();
    let ny1: Vec<f64> = g1.nbar.iter().map(|v| v[1]).collect();
    let mut q = vec![0.0; dim];
    let mut worst: f64 = 0.0;
    for j in 0..g0.c.len() {
        let s = s_space0[j] / l0 * next.total();
        next.eval_cubic(s, &mut q);
        let p = g0.planar_samples[j];
        let v = [(q[0] - p[0]) / dt, (q[1] - p[1]) / dt];
        let mut nb = [g0.nbar[j][0] + next.interp_field(&nx1, s), g0.nbar[j][1] + next.interp_field(&ny1, s)];
        let nn = (nb[0] * nb[0] + nb[1] * nb[1]).sqrt();
        nb = [nb[0] / nn, nb[1] / nn];
        let ck = 0.5 * (g0.c[j] * g0.kbar[j] + next.interp_field(&ck1, s));
        worst = worst.max((v[0] * nb[0] + v[1] * nb[1] - ck).abs());
    }
    worst
}

/// Per frame pair `(i, i+1)`, the largest deviation of the projected normal
/// velocity from `c k̄`, with samples matched at equal space-arclength
/// fractions. `None` where either frame has an invalid projection sample.
pub fn projection_flow_residual(series: &FrameSeries, c_floor: f64) -> Vec<Option<f64>> {
    let geoms: Vec<Option<ProjectionGeometry>> = series
        .frames
        .iter()
        .map(|f| projection_geometry(&f.curve, c_floor).ok().filter(|g| g.all_valid()))
        .collect();
    series
        .frames
        .windows(2)
        .zip(geoms.windows(2))
        .map(|(fr, g)| {
            let (g0, g1) = (g[0].as_ref()?, g[1].as_ref()?);
            let p0 = ArclengthParam::new(&fr[0].curve);
            let next = ArclengthParam::new(&fr[1].curve);
            let s0: Vec<f64> = (0..fr[0].curve.len()).map(|k| p0.node_arclength(k)).collect();
            Some(residual_pair(g0, g1, &next, &s0, p0.total(), fr[1].t - fr[0].t))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::ClosedCurve;
    use crate::flow::{choose_dt, csf_step, FlowState, StopReason};

    fn frames_every(curve: ClosedCurve, every: usize, count: usize) -> FrameSeries {
        let mut s = FlowState::initial(curve);
        let mut frames = vec![s.clone()];
        for _ in 0..count {
            for _ in 0..every {
                let dt = choose_dt(&s, 0.4);
                s = csf_step(&s, dt).unwrap();
            }
            frames.push(s.clone());
        }
        FrameSeries::from_frames(frames, StopReason::StepBudget).unwrap()
    }

    #[test]
    fn circle_frames_follow_normal_law() {
        let c = ClosedCurve::sample(3, 512, |u, p| {
            p[0] = u.cos();
            p[1] = u.sin();
            p[2] = 0.0;
        })
        .unwrap();
        let series = frames_every(c, 10, 4);
        for r in projection_flow_residual(&series, 1e-8) {
            assert!(r.unwrap() < 1e-2);
        }
    }

    #[test]
    fn space_curve_frames_follow_normal_law() {
        let c = ClosedCurve::sample(3, 512, |u, p| {
            p[0] = u.cos();
            p[1] = 0.2 * u.sin();
            p[2] = (2.0 * u).sin();
        })
        .unwrap();
        let series = frames_every(c, 10, 3);
        for r in projection_flow_residual(&series, 1e-8) {
            assert!(r.unwrap() < 5e-2, "{r:?}");
        }
    }

    #[test]
    fn normal_plane_image_on_a_circle() {
        let c = ClosedCurve::sample(2, 256, |u, p| {
            p[0] = 0.9 * u.cos();
            p[1] = 0.9 * u.sin();
        })
        .unwrap();
        let param = ArclengthParam::new(&c);
        let ang: f64 = 0.3;
        let p = [ang.cos(), ang.sin()];
        let t = [-ang.sin(), ang.cos()];
        let s = normal_plane_image(&param, &p, &t, 0.25, 0.5).unwrap();
        let mut q = [0.0; 2];
        param.eval_cubic(s, &mut q);
        assert!((q[1].atan2(q[0]) - ang).abs() < 1e-6);
    }
}
