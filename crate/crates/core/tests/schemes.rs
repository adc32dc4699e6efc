use ecdyn_core::problems::{CoupledToy, LinearSystem};
use ecdyn_core::schemes::*;
use ecdyn_core::subsolvers::SparseSymmetric;
use ecdyn_core::Error;
use proptest::prelude::*;

fn cfg(tau: f64, scheme: Scheme) -> SchemeConfig {
    SchemeConfig::new(tau, scheme)
}

fn oscillator_state(u: f64, v: f64) -> State3F {
    State3F {
        t: 0.0,
        u: vec![u],
        v: vec![v],
        pi: vec![],
        zeta: vec![],
    }
}

#[test]
fn cn_oscillator_matches_hand_solved_midpoint_system() {
    let p = LinearSystem::diagonal(&[1.0], &[1.0]).unwrap();
    let tau = 0.1;
    let (s1, e) = step_cn_monolithic(&p, &oscillator_state(1.0, 0.0), &cfg(tau, Scheme::CnMonolithic)).unwrap();
    // u1 - tau/2 v1 = u0 + tau/2 v0 ;  tau/2 u1 + v1 = v0 - tau/2 u0
    let (a11, a12, a21, a22) = (1.0, -tau / 2.0, tau / 2.0, 1.0);
    let (r1, r2) = (1.0, -tau / 2.0);
    let det = a11 * a22 - a12 * a21;
    let u1 = (r1 * a22 - a12 * r2) / det;
    let v1 = (a11 * r2 - a21 * r1) / det;
    assert!((s1.u[0] - u1).abs() < 1e-14);
    assert!((s1.v[0] - v1).abs() < 1e-14);
    assert!((u1 - 0.9950125).abs() < 1e-7);
    assert!((v1 + 0.0997506).abs() < 1e-7);
    assert!(e.residual.abs() < 1e-15);
    // CN relation
    assert!(((s1.u[0] - 1.0) / tau - 0.5 * (s1.v[0] + 0.0)).abs() < 1e-12);
}

#[test]
fn zero_state_is_a_fixed_point() {
    let p = LinearSystem::diagonal(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
    let s0 = State3F::at_rest(p.dims());
    for step in [step_cn_monolithic::<LinearSystem>, step_fractional, step_backward_euler] {
        let (s1, e) = step(&p, &s0, &cfg(0.1, Scheme::CnMonolithic)).unwrap();
        assert_eq!(s1.u, s0.u);
        assert_eq!(s1.v, s0.v);
        assert_eq!(e.total(), 0.0);
        assert_eq!(e.residual, 0.0);
        assert_eq!(e.work, 0.0);
    }
}

#[test]
fn backward_euler_amplification_factor() {
    // |amplification|^2 of BE for u'' = -w^2 u is 1/(1 + w^2 tau^2)
    let w: f64 = 3.0;
    let tau = 0.1;
    let p = LinearSystem::diagonal(&[1.0], &[w * w]).unwrap();
    let mut st = Stepper::new(cfg(tau, Scheme::BackwardEuler)).unwrap();
    let mut s = oscillator_state(0.7, -0.4);
    let mut e_prev = total_energy(&p, &s).unwrap();
    for _ in 0..20 {
        let (s1, _) = st.step(&p, &s).unwrap();
        let e = total_energy(&p, &s1).unwrap();
        assert!((e / e_prev - 1.0 / (1.0 + w * w * tau * tau)).abs() < 1e-12);
        e_prev = e;
        s = s1;
    }
}

#[test]
fn cn_is_time_reversible() {
    let m = SparseSymmetric::from_upper_triplets(2, &[(0, 0, 2.0), (0, 1, 0.5), (1, 1, 1.0)]);
    let k = SparseSymmetric::from_upper_triplets(2, &[(0, 0, 5.0), (0, 1, -2.0), (1, 1, 3.0)]);
    let p = LinearSystem::new(m, k).unwrap();
    let s0 = State3F {
        t: 0.0,
        u: vec![0.3, -0.1],
        v: vec![0.2, 0.5],
        pi: vec![],
        zeta: vec![],
    };
    let mut st = Stepper::new(cfg(0.05, Scheme::CnMonolithic)).unwrap();
    let mut s = s0.clone();
    for _ in 0..200 {
        s = st.step(&p, &s).unwrap().0;
    }
    s.v.iter_mut().for_each(|v| *v = -*v);
    for _ in 0..200 {
        s = st.step(&p, &s).unwrap().0;
    }
    for i in 0..2 {
        assert!((s.u[i] - s0.u[i]).abs() <= 1e-8 * 0.3);
        assert!((-s.v[i] - s0.v[i]).abs() <= 1e-8 * 0.5);
    }
}

#[test]
fn ledger_is_additive_under_damping_and_load() {
    let d = SparseSymmetric::from_upper_triplets(2, &[(0, 0, 0.1), (1, 1, 0.05)]);
    let mut p = LinearSystem::diagonal(&[1.0, 1.0], &[4.0, 9.0])
        .unwrap()
        .with_damping(d)
        .unwrap()
        .with_force(|t| vec![t.sin(), 0.5 * (2.0 * t).cos()]);
    let s0 = oscillator_state(0.0, 0.0);
    let s0 = State3F {
        u: vec![0.1, 0.0],
        v: vec![0.0, 0.2],
        ..s0
    };
    let n = 400;
    let tr = run_trajectory(&mut p, &s0, &cfg(0.01, Scheme::CnMonolithic), n, &mut []).unwrap();
    let last = tr.ledger.rows()[n];
    let e0 = tr.ledger.initial_total();
    assert!((last.residual - tr.ledger.step_residual_sum()).abs() <= 1e-12 * n as f64 * e0);
    assert!(tr.ledger.max_relative_residual() < 1e-12);
    let rows = tr.ledger.rows();
    assert!(rows.windows(2).all(|w| w[1].dissip_viscous_cum >= w[0].dissip_viscous_cum));
    assert!(rows.windows(2).all(|w| w[1].t > w[0].t));
}

#[test]
fn run_trajectory_rejects_zero_steps() {
    let mut p = LinearSystem::diagonal(&[1.0], &[1.0]).unwrap();
    let r = run_trajectory(&mut p, &oscillator_state(1.0, 0.0), &cfg(0.1, Scheme::CnMonolithic), 0, &mut []);
    assert!(matches!(r, Err(Error::InvalidArgument(_))));
}

#[test]
fn dimension_mismatch_is_reported() {
    let p = LinearSystem::diagonal(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
    let r = step_cn_monolithic(&p, &oscillator_state(1.0, 0.0), &cfg(0.1, Scheme::CnMonolithic));
    assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
}

fn toy() -> CoupledToy {
    CoupledToy::new(1.0, 4.0, 0.5, 2.0, 0.3)
        .with_force(1.0, 2.0)
        .with_zeta_force(1.0)
}

fn toy_state() -> State3F {
    State3F {
        t: 0.0,
        u: vec![0.05],
        v: vec![0.1],
        pi: vec![],
        zeta: vec![0.5],
    }
}

fn run(p: &mut CoupledToy, scheme: Scheme, tau: f64, n: usize) -> State3F {
    run_trajectory(p, &toy_state(), &cfg(tau, scheme), n, &mut []).unwrap().final_state
}

#[test]
fn split_and_monolithic_balance_every_step() {
    for scheme in [Scheme::CnMonolithic, Scheme::FractionalStep] {
        let mut p = toy();
        let tr = run_trajectory(&mut p, &toy_state(), &cfg(0.01, scheme), 300, &mut []).unwrap();
        assert!(tr.ledger.max_relative_residual() < 1e-12, "{scheme}");
    }
}

#[test]
fn monolithic_cn_is_second_order_on_the_coupled_toy() {
    let t_end = 1.0;
    let u: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&tau| run(&mut toy(), Scheme::CnMonolithic, tau, (t_end / tau) as usize).u[0])
        .collect();
    let order = ((u[0] - u[1]) / (u[1] - u[2])).abs().log2();
    assert!(order >= 1.9, "order {order}");
}

#[test]
fn split_step_differs_from_monolithic_at_second_order() {
    let p = toy();
    let s = toy_state();
    let diff = |tau: f64| {
        let (a, _) = step_cn_monolithic(&p, &s, &cfg(tau, Scheme::CnMonolithic)).unwrap();
        let (b, _) = step_fractional(&p, &s, &cfg(tau, Scheme::FractionalStep)).unwrap();
        (a.u[0] - b.u[0])
            .abs()
            .max((a.v[0] - b.v[0]).abs())
            .max((a.zeta[0] - b.zeta[0]).abs())
    };
    let d: Vec<f64> = [0.02, 0.01, 0.005].iter().map(|&t| diff(t)).collect();
    for w in d.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.9, "{d:?}");
    }
}

#[test]
fn split_trajectory_converges_to_the_same_limit() {
    let t_end = 1.0;
    let taus = [0.02, 0.01, 0.005, 0.0025];
    let reference = run(&mut toy(), Scheme::CnMonolithic, 1e-4, 10_000).u[0];
    let err: Vec<f64> = taus
        .iter()
        .map(|&tau| (run(&mut toy(), Scheme::FractionalStep, tau, (t_end / tau) as usize).u[0] - reference).abs())
        .collect();
    // sequential substeps lag the damage field by half a step, so the
    // global error is first order
    for w in err.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order > 0.8, "{err:?}");
    }
}

#[test]
fn frozen_damage_split_equals_monolithic() {
    let p = LinearSystem::diagonal(&[1.0, 3.0], &[2.0, 5.0]).unwrap();
    let s = State3F {
        t: 0.0,
        u: vec![0.1, 0.2],
        v: vec![-0.3, 0.0],
        pi: vec![],
        zeta: vec![],
    };
    let (a, _) = step_cn_monolithic(&p, &s, &cfg(0.05, Scheme::CnMonolithic)).unwrap();
    let (b, _) = step_fractional(&p, &s, &cfg(0.05, Scheme::CnMonolithic)).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cn_conserves_and_be_dissipates(
        m1 in 0.5f64..3.0, m2 in 0.5f64..3.0,
        k1 in 0.5f64..10.0, k2 in 0.5f64..10.0, k12 in -0.4f64..0.4,
        u0 in -1.0f64..1.0, v0 in -1.0f64..1.0,
        tau in 0.01f64..0.5,
    ) {
        let m = SparseSymmetric::from_upper_triplets(2, &[(0, 0, m1), (1, 1, m2)]);
        let k = SparseSymmetric::from_upper_triplets(2, &[(0, 0, k1), (0, 1, k12 * (k1 * k2).sqrt()), (1, 1, k2)]);
        let p = LinearSystem::new(m, k).unwrap();
        let s0 = State3F { t: 0.0, u: vec![u0, 0.1], v: vec![v0, -0.2], pi: vec![], zeta: vec![] };
        let e0 = total_energy(&p, &s0).unwrap();
        let mut cn = Stepper::new(cfg(tau, Scheme::CnMonolithic)).unwrap();
        let mut be = Stepper::new(cfg(tau, Scheme::BackwardEuler)).unwrap();
        let (mut a, mut b) = (s0.clone(), s0.clone());
        let mut e_be = e0;
        for _ in 0..50 {
            a = cn.step(&p, &a).unwrap().0;
            b = be.step(&p, &b).unwrap().0;
            let e_new = total_energy(&p, &b).unwrap();
            prop_assert!(e_new <= e_be * (1.0 + 1e-13));
            e_be = e_new;
        }
        let e_cn = total_energy(&p, &a).unwrap();
        prop_assert!((e_cn - e0).abs() <= 1e-12 * e0);
    }
}
