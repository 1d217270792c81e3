//! Model, schedule and engine invariants as property tests.

use proptest::collection::vec;
use proptest::prelude::*;
use teachsim::engine::step;
use teachsim::*;

fn params_n(n: usize) -> impl Strategy<Value = ModelParams> {
    (
        vec(1e-4..0.2f64, n),
        vec(1e-5..0.05f64, n),
        0.0..=1.0f64,
        (1e-3..0.2f64, 1.0..500.0f64, 0.01..1.0f64, 1e-3..0.1f64, 0.0..1e-3f64),
    )
        .prop_map(move |(alpha, mut gamma, b, (k1, p0, k2, k3, k4))| {
            gamma.sort_by(|a, b| b.partial_cmp(a).unwrap());
            gamma.dedup();
            while gamma.len() < n {
                let last = *gamma.last().unwrap();
                gamma.push(last * 0.5);
            }
            ModelParams {
                n,
                b,
                alpha,
                gamma,
                k1,
                p0,
                k2,
                k3,
                k4,
            }
        })
}

fn model_and_state() -> impl Strategy<Value = (ModelParams, SimState)> {
    (1usize..=5).prop_flat_map(|n| {
        (
            params_n(n),
            vec(0.0..50.0f64, n),
            0.05..=1.0f64,
            0.0..1.0f64,
            0.0..600.0f64,
            0.0..2000.0f64,
        )
            .prop_map(|(params, z, r0, frac, p, t)| {
                let state = SimState {
                    t,
                    z,
                    r: r0 * frac,
                    r0_base: r0,
                    p,
                };
                (params, state)
            })
    })
}

fn effort_spec() -> impl Strategy<Value = EffortSpec> {
    prop_oneof![
        (0.01..10.0f64).prop_map(EffortSpec::Constant),
        (0.0..100.0f64).prop_map(EffortSpec::Requirement),
    ]
}

proptest! {
    #[test]
    fn euler_step_keeps_knowledge_non_negative(
        (params, state) in model_and_state(),
        spec in effort_spec(),
        s in 0.0..0.99f64,
        frac in 0.01..0.99f64,
    ) {
        // Sum of outflow and forgetting rates bounds the admissible step.
        let worst = params
            .gamma
            .iter()
            .enumerate()
            .map(|(i, g)| g + state.r0_base * (1.0 - s) * params.alpha.get(i + 1).copied().unwrap_or(0.0))
            .fold(0.0, f64::max)
            .max(params.k3);
        let dt = frac / worst;
        for seg in [Segment::lesson(1.0, spec, s), Segment::rest(1.0)] {
            let next = step(&state, &seg, dt, &params, Method::Euler).unwrap();
            prop_assert!(next.z.iter().all(|z| *z >= 0.0), "{:?}", next.z);
        }
    }

    #[test]
    fn workability_is_decreasing_and_linear(
        (params, _) in model_and_state(),
        r0 in 0.01..=1.0f64,
        p in 0.0..1000.0f64,
        dp in 1e-3..100.0f64,
        scale in 0.01..1.0f64,
    ) {
        let (lo, hi) = (workability(r0, p + dp, &params), workability(r0, p, &params));
        prop_assert!(lo <= hi);
        // strictness is only observable where 1 + exp(k1 (P - P0)) is not rounded to 1
        if (params.k1 * (p - params.p0)).abs() < 20.0 {
            prop_assert!(lo < hi);
        }
        let lhs = workability(scale * r0, p, &params);
        let rhs = scale * workability(r0, p, &params);
        prop_assert!((lhs - rhs).abs() <= 1e-15 * rhs.max(1e-300) + f64::MIN_POSITIVE);
        prop_assert_eq!(workability(r0, params.p0, &params), r0 / 2.0);
    }

    #[test]
    fn strength_bounds_and_monotone_transfer(
        z in (2usize..=6).prop_flat_map(|n| vec(0.0..100.0f64, n)),
        from_to in (0usize..6, 0usize..6),
        amount_frac in 0.01..1.0f64,
    ) {
        let pr = strength_coefficient(&z);
        prop_assert!((0.0..=1.0).contains(&pr));
        let n = z.len();
        let (i, j) = (from_to.0 % n, from_to.1 % n);
        let (i, j) = (i.min(j), i.max(j));
        prop_assume!(i < j && z[i] > 1e-6);
        let mut moved = z.clone();
        let amount = z[i] * amount_frac;
        moved[i] -= amount;
        moved[j] += amount;
        prop_assert!(strength_coefficient(&moved) > pr);
    }

    #[test]
    fn single_category_is_basic_model(
        (params, state) in (params_n(1), vec(0.0..50.0f64, 1), 0.05..=1.0f64, 0.0..600.0f64)
            .prop_map(|(p, z, r0, work)| (p, SimState { t: 0.0, z, r: r0, r0_base: r0, p: work })),
        spec in effort_spec(),
        s in 0.0..0.99f64,
    ) {
        let rates = lesson_derivatives(&state, spec, s, &params).unwrap();
        let z = state.z[0];
        let r = workability(state.r0_base, state.p, &params);
        let expected = r * (1.0 - s) * params.alpha[0] * effort(spec, z) * z.powf(params.b) - params.gamma[0] * z;
        prop_assert!((rates.dz[0] - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
    }

    #[test]
    fn transfer_between_first_two_categories_conserves_mass(
        (mut params, state) in model_and_state().prop_filter("n = 2", |(p, _)| p.n == 2),
        s in 0.0..0.99f64,
    ) {
        params.gamma = vec![0.0, 0.0];
        let u = state.z.iter().sum::<f64>();
        let rates = lesson_derivatives(&state, EffortSpec::Requirement(u), s, &params).unwrap();
        prop_assert!((rates.dz[0] + rates.dz[1]).abs() <= 1e-12 * (1.0 + rates.dz[0].abs()));
    }

    #[test]
    fn segment_lookup_is_total_and_monotone(
        n_lessons in 1usize..7,
        tu in 1u32..400,
        tp in 1u32..200,
        ts in vec(0.0..1.0f64, 1..40),
    ) {
        let day = Schedule::uniform_day(
            n_lessons,
            f64::from(tu),
            f64::from(tp),
            &vec![EffortSpec::Constant(1.0); n_lessons],
            &vec![0.0; n_lessons],
        )
        .unwrap();
        prop_assert!(day.validate(1.0).is_empty());
        prop_assert!(day.validate(0.5).is_empty());
        let total = day.total_duration();
        let mut ts: Vec<f64> = ts.into_iter().map(|f| f * total).collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut last = 0;
        for t in ts {
            let (idx, local) = day.segment_at(t).unwrap();
            prop_assert!(idx >= last);
            prop_assert!(local >= 0.0 && local < day.segments[idx].duration);
            last = idx;
        }
    }

    #[test]
    fn config_round_trip(
        (params, _) in model_and_state(),
        lessons in vec((effort_spec(), 0.0..0.99f64), 1..5),
        tp in 1u32..50,
        method in prop_oneof![Just(Method::Euler), Just(Method::Rk4)],
        stride in 1usize..1000,
    ) {
        let (efforts, complexities): (Vec<_>, Vec<_>) = lessons.into_iter().unzip();
        let schedule = Schedule::uniform_day(efforts.len(), 30.0, f64::from(tp), &efforts, &complexities).unwrap();
        let cfg = SimConfig {
            initial: SimState::initial(vec![1.5; params.n], 0.75),
            params,
            schedule,
            dt: 0.5,
            method,
            record_stride: stride,
        };
        prop_assert_eq!(parse_config(&serialize_config(&cfg)).unwrap(), cfg);
    }
}

#[test]
fn break_only_run_matches_closed_form_decay() {
    let params = ModelParams::pr1();
    let z0 = [40.0, 25.0];
    for method in [Method::Euler, Method::Rk4] {
        let cfg = SimConfig {
            params: params.clone(),
            schedule: Schedule::new(vec![Segment::rest(1000.0)]),
            initial: SimState::initial(z0.to_vec(), 1.0),
            dt: 0.01,
            method,
            record_stride: 10_000,
        };
        let traj = run(&cfg).unwrap();
        for row in &traj.rows {
            for (i, (&z, &gamma)) in z0.iter().zip(&params.gamma).enumerate() {
                let exact = z * (-gamma * row.t).exp();
                let rel = ((row.z[i] - exact) / z).abs();
                let bound = match method {
                    Method::Euler => gamma * row.t * cfg.dt,
                    Method::Rk4 => 1e-10,
                };
                assert!(
                    rel <= bound.max(1e-15),
                    "{method:?} t={} Z{}: {rel:e} > {bound:e}",
                    row.t,
                    i + 1
                );
            }
        }
    }
}

#[test]
fn constant_effort_lessons_drain_workability() {
    let traj = replicate_pr1();
    let segments = &traj.config.schedule.segments;
    for w in traj.rows.windows(2) {
        if w[0].segment == w[1].segment && segments[w[1].segment].is_lesson() && w[0].t > 0.0 {
            assert!(w[1].p > w[0].p, "P at t={}", w[1].t);
            assert!(w[1].r < w[0].r, "r at t={}", w[1].t);
        }
    }
}

#[test]
fn runs_are_bit_identical() {
    let a = replicate_pr1();
    let b = replicate_pr1();
    assert_eq!(a, b);
    let mut x = Vec::new();
    let mut y = Vec::new();
    write_csv(&a, &mut x).unwrap();
    write_csv(&b, &mut y).unwrap();
    assert_eq!(x, y);
}
