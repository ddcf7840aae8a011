//! Property tests for the geometric invariants of curves, the flow and the
//! predicates.

use std::f64::consts::TAU;

use csflow_core::barriers::{barrier_value, Barrier};
use csflow_core::curve::{
    frame_geometry, polyline_length, projection_geometry, resample_uniform, ClosedCurve, DEFAULT_C_FLOOR,
};
use csflow_core::flow::{choose_dt, csf_step, run_flow, FlowState, FrameSeries, RunPolicy};
use csflow_core::predicates::{
    convexity_check, horizontal_directions, mu_count, plane_intersection_count, slope_profile, Direction, Plane,
    MILNOR_DIRECTIONS,
};
use csflow_core::zoo::{random_convex_projection, ZooSpec, CATALOGUE};
use proptest::prelude::*;

/// A perturbed ellipse in ℝ³: `(a cos u, b sin u, 0)` plus two harmonics
/// per coordinate with amplitudes small enough to stay immersed.
fn wobbly(coef: &[f64; 12], n: usize) -> ClosedCurve {
    ClosedCurve::sample(3, n, |u, p| {
        p[0] = 1.5 * u.cos() + coef[0] * (2.0 * u).cos() + coef[1] * (3.0 * u).sin();
        p[1] = u.sin() + coef[2] * (2.0 * u).sin() + coef[3] * (3.0 * u).cos();
        p[2] = coef[4] * u.sin() + coef[5] * (2.0 * u).cos() + coef[6] * (3.0 * u).sin();
        p[0] += coef[7] * (4.0 * u).sin();
        p[1] += coef[8] * (4.0 * u).cos();
        p[2] += coef[9] + coef[10] * (2.0 * u).sin() + coef[11] * (5.0 * u).cos();
    })
    .unwrap()
}

fn coefficients() -> impl Strategy<Value = [f64; 12]> {
    prop::array::uniform12(-0.08f64..0.08)
}

fn short_run(curve: &ClosedCurve, steps: u64, archive_every: u64) -> FrameSeries {
    let policy = RunPolicy { max_steps: steps, archive_every, ..RunPolicy::default() };
    run_flow(curve, &policy).unwrap()
}

fn fixed_directions() -> Vec<Direction> {
    (0..16)
        .map(|k| {
            let a = TAU * k as f64 / 16.0;
            let tilt = 0.3 * (k as f64 - 7.5) / 7.5;
            Direction::new(vec![a.cos(), a.sin(), tilt]).unwrap()
        })
        .collect()
}

fn extremes(curve: &ClosedCurve, v: &Direction) -> (f64, f64) {
    curve.points().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let h: f64 = p.iter().zip(v.vector()).map(|(a, b)| a * b).sum();
        (lo.min(h), hi.max(h))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tangent_speed_integrates_back_to_the_start(coef in coefficients(), n in 16usize..200) {
        let c = wobbly(&coef, n);
        let fg = frame_geometry(&c).unwrap();
        let h = TAU / n as f64;
        let mut p = c.point(0).to_vec();
        for j in 0..n {
            // Centred differences: T·|γ_u|·h spans half of the chord (j−1, j+1).
            for (d, x) in p.iter_mut().enumerate() {
                *x += fg.tangent(j)[d] * fg.speed[j] * h;
            }
        }
        let l = fg.total_length;
        for (a, b) in p.iter().zip(c.point(0)) {
            prop_assert!((a - b).abs() <= 1e-9 * l);
        }
    }

    #[test]
    fn total_turning_is_a_multiple_of_two_pi(coef in coefficients(), n in 32usize..200) {
        let c = wobbly(&coef, n);
        let pg = projection_geometry(&c, DEFAULT_C_FLOOR).unwrap();
        prop_assume!(pg.all_valid());
        let turns = pg.total_turning() / TAU;
        prop_assert!((turns - turns.round()).abs() * TAU <= 1e-6);
    }

    #[test]
    fn c_plus_height_rates_is_one(coef in coefficients(), n in 16usize..200) {
        let c = wobbly(&coef, n);
        let pg = projection_geometry(&c, DEFAULT_C_FLOOR).unwrap();
        let fg = frame_geometry(&c).unwrap();
        for j in 0..n {
            let zs = fg.tangent(j)[2];
            prop_assert!((pg.c[j] + zs * zs - 1.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn resampling_twice_changes_nothing(coef in coefficients(), n in 16usize..200, m in 16usize..200) {
        let c = wobbly(&coef, n);
        let once = resample_uniform(&c, m).unwrap();
        let twice = resample_uniform(&once, m).unwrap();
        let l = polyline_length(&once);
        for (a, b) in once.coords().iter().zip(twice.coords()) {
            prop_assert!((a - b).abs() < 1e-9 * l);
        }
    }

    #[test]
    fn slope_chain_holds(coef in coefficients(), n in 16usize..96) {
        let s = slope_profile(&wobbly(&coef, n), 20_000).unwrap();
        prop_assert!(s.s_tangent_max <= s.s_secant_max + 1e-9);
        prop_assert!(s.s_secant_max <= s.delta_triple + 1e-9);
    }

    #[test]
    fn convex_verdict_implies_single_maxima(coef in coefficients(), n in 32usize..160) {
        let c = wobbly(&coef, n);
        prop_assume!(convexity_check(&c).unwrap().convex);
        for v in horizontal_directions(3, MILNOR_DIRECTIONS) {
            prop_assert_eq!(mu_count(&c, &v).unwrap(), 1);
        }
    }

    #[test]
    fn barrier_is_linear_in_epsilon_and_peaks_mid_window(
        a in -2.0f64..2.0, m in 0.1f64..3.0, eps in 0.01f64..2.0, s in 0.0f64..1.0, t in 0.0f64..0.5,
    ) {
        let b = Barrier::on_window((a, a + m), eps).unwrap();
        let x = a + s * m;
        let phi = barrier_value(&b, x, t).unwrap();
        let cap = eps * (-b.lambda * t).exp();
        prop_assert!(phi <= cap * (1.0 + 1e-15));
        let mid = barrier_value(&b, a + 0.5 * m, t).unwrap();
        prop_assert!((mid - cap).abs() <= 1e-15 * cap.max(1e-300));
        let scaled = Barrier { epsilon: 3.0 * eps, ..b };
        prop_assert!((barrier_value(&scaled, x, t).unwrap() - 3.0 * phi).abs() <= 1e-14 * cap.max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn length_decreases_and_curves_stay_in_the_ball(coef in coefficients()) {
        let c = wobbly(&coef, 96);
        let r0 = c.max_radius();
        let series = short_run(&c, 3000, 100);
        for w in series.frames.windows(2) {
            prop_assert!(polyline_length(&w[1].curve) < polyline_length(&w[0].curve) + 1e-12);
        }
        for f in &series.frames {
            prop_assert!(f.curve.max_radius() <= (r0 * r0 - 2.0 * f.t).sqrt() + 1e-3);
        }
    }

    #[test]
    fn extreme_heights_move_inwards(coef in coefficients()) {
        let series = short_run(&wobbly(&coef, 96), 2000, 50);
        for v in fixed_directions() {
            for w in series.frames.windows(2) {
                let (lo0, hi0) = extremes(&w[0].curve, &v);
                let (lo1, hi1) = extremes(&w[1].curve, &v);
                prop_assert!(hi1 <= hi0 + 1e-9);
                prop_assert!(lo1 >= lo0 - 1e-9);
            }
        }
    }

    #[test]
    fn plane_counts_do_not_grow(seed in 0u64..1000) {
        let c = random_convex_projection(seed, 3, 4, 128).unwrap();
        let series = short_run(&c, 4000, 100);
        let planes: Vec<Plane> = (0..8)
            .map(|k| {
                let a = TAU * k as f64 / 8.0;
                Plane::new([a.cos(), a.sin(), 0.5], 0.05 * k as f64 - 0.2).unwrap()
            })
            .collect();
        for plane in &planes {
            for w in series.frames.windows(2) {
                let before = plane_intersection_count(&w[0].curve, plane).unwrap();
                let after = plane_intersection_count(&w[1].curve, plane).unwrap();
                if before.grazing || after.grazing {
                    continue;
                }
                prop_assert!(after.count <= before.count, "{plane:?}: {} -> {}", before.count, after.count);
            }
        }
    }

    #[test]
    fn random_convex_projections_stay_convex(seed in 0u64..1000) {
        let c = random_convex_projection(seed, 3, 4, 128).unwrap();
        prop_assert!(convexity_check(&c).unwrap().uniformly_convex);
        let series = short_run(&c, 3000, 500);
        for f in &series.frames {
            prop_assert!(convexity_check(&f.curve).unwrap().uniformly_convex);
        }
    }
}

#[test]
fn circle_error_halves_with_the_time_step() {
    // A regular polygon's discrete curvature is exactly 1/r, so the only
    // error is the Euler step's.
    let t_end = 0.1;
    let exact = (1.0f64 - 2.0 * t_end).sqrt();
    let errors: Vec<f64> = [(64usize, 8e-4f64), (128, 4e-4), (256, 2e-4)]
        .iter()
        .map(|&(n, dt)| {
            let c = ClosedCurve::sample(2, n, |u, p| {
                p[0] = u.cos();
                p[1] = u.sin();
            })
            .unwrap();
            let mut s = FlowState::initial(c);
            while s.t < t_end - 1e-15 {
                s = csf_step(&s, dt.min(t_end - s.t)).unwrap();
            }
            let mean_r = s.curve.points().map(|p| p[0].hypot(p[1])).sum::<f64>() / n as f64;
            (mean_r - exact).abs()
        })
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.5..=3.0).contains(&ratio), "{errors:?}");
    }
}

#[test]
fn ellipse_run_keeps_a_convex_projection() {
    let c = ClosedCurve::sample(3, 128, |u, p| {
        p[0] = 2.0 * u.cos();
        p[1] = u.sin();
        p[2] = 0.3 * (2.0 * u).sin();
    })
    .unwrap();
    let series = short_run(&c, 20_000, 1000);
    for f in &series.frames {
        assert!(convexity_check(&f.curve).unwrap().convex, "t = {}", f.t);
    }
}

#[test]
fn every_catalogue_family_builds_a_valid_curve() {
    for fam in CATALOGUE {
        let c = ZooSpec::new(fam.name, 128).build().unwrap();
        assert!(c.is_immersed(), "{}", fam.name);
        assert!(c.coords().iter().all(|x| x.is_finite()));
        let again = ClosedCurve::new(c.dim(), c.coords().to_vec()).unwrap();
        assert_eq!(again, c);
    }
}

#[test]
fn stability_bound_scales_with_the_shortest_segment() {
    let c = ClosedCurve::sample(2, 100, |u, p| {
        p[0] = u.cos();
        p[1] = 0.5 * u.sin();
    })
    .unwrap();
    let s = FlowState::initial(c);
    let h = s.curve.min_segment_length();
    assert_eq!(choose_dt(&s, 1.0), h * h / 2.0);
    assert!(csf_step(&s, 1.01 * h * h / 2.0).is_err());
    assert!(csf_step(&s, 0.99 * h * h / 2.0).is_ok());
}
