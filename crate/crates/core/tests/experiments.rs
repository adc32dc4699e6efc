use std::path::Path;

use ecdyn_core::experiments::{
    hysteresis_loop, observed_order, refinement_study, relative_l2, run_experiment, simulate, ExperimentConfig,
    ExperimentKind,
};
use ecdyn_core::schemes::Scheme;
use ecdyn_core::Error;

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn short(kind: ExperimentKind, t_end: f64, out: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::defaults(kind);
    c.t_end = t_end;
    c.out = out.to_path_buf();
    c
}

#[test]
fn parse_and_echo_round_trip() {
    let text = "# friction run\nsigma_y = 6e6\nexperiment=friction\ndt=1e-6 # finer\nscheme=be\nmesh_level=2\n";
    let c = ExperimentConfig::parse_str(text).unwrap();
    assert_eq!(c.experiment, ExperimentKind::Friction);
    assert_eq!(c.sigma_y, 6e6);
    assert_eq!(c.tau, 1e-6);
    assert_eq!(c.scheme, Scheme::BackwardEuler);
    assert_eq!(c.mesh_level, 2);
    let back = ExperimentConfig::parse_str(&c.echo()).unwrap();
    assert_eq!(back, c);

    for kind in [ExperimentKind::Friction, ExperimentKind::Delamination, ExperimentKind::Bulk] {
        let d = ExperimentConfig::defaults(kind);
        d.validate().unwrap();
        assert_eq!(ExperimentConfig::parse_str(&d.echo()).unwrap(), d);
    }
}

#[test]
fn experiment_line_resets_defaults_wherever_it_appears() {
    let c = ExperimentConfig::parse_str("toughness=100\nexperiment=delamination\n").unwrap();
    assert_eq!(c.experiment, ExperimentKind::Delamination);
    assert_eq!(c.toughness, 100.0);
    assert_eq!(c.t_end, 1e-3);
    assert_eq!(c.n_steps(), 5000);
}

#[test]
fn default_step_counts() {
    assert_eq!(ExperimentConfig::defaults(ExperimentKind::Friction).n_steps(), 500);
    assert_eq!(ExperimentConfig::defaults(ExperimentKind::Delamination).n_steps(), 5000);
}

#[test]
fn config_errors() {
    assert!(matches!(ExperimentConfig::parse_str("nonsense"), Err(Error::Config(_))));
    assert!(matches!(ExperimentConfig::parse_str("colour=red"), Err(Error::Config(_))));
    assert!(matches!(ExperimentConfig::parse_str("dt=fast"), Err(Error::Config(_))));
    assert!(matches!(ExperimentConfig::parse_str("experiment=creep"), Err(Error::Config(_))));
    let mut c = ExperimentConfig::defaults(ExperimentKind::Friction);
    c.amplitude = -1.0;
    assert!(matches!(c.validate(), Err(Error::Config(_))));
    let mut c = ExperimentConfig::defaults(ExperimentKind::Friction);
    c.tau = 1e-3;
    c.t_end = 4e-4;
    assert!(matches!(c.validate(), Err(Error::Config(_))));
}

#[test]
fn zero_horizon_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let c = short(ExperimentKind::Friction, 0.0, &out);
    assert!(matches!(run_experiment(&c), Err(Error::Config(_))));
    assert!(!out.exists());
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    for kind in [ExperimentKind::Friction, ExperimentKind::Delamination, ExperimentKind::Bulk] {
        let a = dir.path().join(format!("{kind}-a"));
        let b = dir.path().join(format!("{kind}-b"));
        run_experiment(&short(kind, 4e-5, &a)).unwrap();
        run_experiment(&short(kind, 4e-5, &b)).unwrap();
        for f in ["energies.csv", "trace.csv", "hysteresis.csv", "damage.csv"] {
            if a.join(f).exists() {
                assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{kind} {f}");
            }
        }
    }
}

#[test]
fn parallel_and_sequential_runs_agree() {
    let mut a = ExperimentConfig::defaults(ExperimentKind::Bulk);
    a.t_end = 2e-5;
    let mut b = a.clone();
    b.parallel = false;
    let sa = simulate(&a, None).unwrap();
    let sb = simulate(&b, None).unwrap();
    for (x, y) in sa.final_state.u.iter().zip(&sb.final_state.u) {
        assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
    }
}

#[test]
fn csv_rows_are_complete_and_balanced() {
    let dir = tempfile::tempdir().unwrap();
    for kind in [ExperimentKind::Friction, ExperimentKind::Delamination, ExperimentKind::Bulk] {
        let out = dir.path().join(kind.to_string());
        let c = short(kind, ExperimentConfig::defaults(kind).t_end.min(4e-4), &out);
        run_experiment(&c).unwrap();
        let (h, rows) = read_csv(&out.join("energies.csv"));
        assert_eq!(h.len(), 9);
        assert_eq!(rows.len(), c.n_steps() + 1, "{kind}");
        for (k, r) in rows.iter().enumerate() {
            assert!((r[0] - k as f64 * c.tau).abs() <= 1e-9 * c.tau, "{kind} row {k}");
            if k > 0 {
                assert!(r[0] > rows[k - 1][0]);
                assert!(r[5] >= rows[k - 1][5] && r[6] >= rows[k - 1][6], "dissipation decreased");
            }
            let e0 = rows[0][1] + rows[0][2] + rows[0][3] + rows[0][4];
            let balance = r[1] + r[2] + r[3] + r[4] - r[7] + r[5] + r[6] - e0;
            let scale = r[1] + r[2] + r[3] + r[4] + r[5] + r[6] + r[7].abs();
            assert!((balance - r[8]).abs() <= 1e-12 * scale.max(1e-30), "{kind} row {k}");
        }
        for f in ["trace.csv", "hysteresis.csv", "damage.csv"] {
            let p = out.join(f);
            if p.exists() {
                let (_, r) = read_csv(&p);
                assert_eq!(r.len(), rows.len(), "{kind} {f}");
                assert!(r.windows(2).all(|w| w[1][0] > w[0][0]));
            }
        }
    }
}

#[test]
fn hysteresis_from_csv_matches_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f");
    let c = short(ExperimentKind::Friction, 1e-3, &out);
    let summary = run_experiment(&c).unwrap();
    let (_, rows) = read_csv(&out.join("hysteresis.csv"));
    let u: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let t: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    let from_csv = hysteresis_loop(&u, &t, c.sigma_y, c.k_adh).unwrap();
    let h = summary.hysteresis.unwrap();
    assert_eq!((from_csv.start, from_csv.end), (h.start, h.end));
    assert!((from_csv.area - h.area).abs() <= 1e-9 * h.area.abs());
    assert!(h.area > 0.0, "loop is clockwise");
    assert!((h.area - h.dissipation).abs() <= 0.01 * h.dissipation);
}

#[test]
fn delamination_defaults_rupture_once() {
    let mut c = ExperimentConfig::defaults(ExperimentKind::Delamination);
    c.t_end = 4e-4;
    let sim = simulate(&c, None).unwrap();
    assert_eq!(sim.summary.rupture_intervals, 1);
    let t = sim.summary.rupture_time.unwrap();
    assert!(t > 0.2e-3 && t < 0.35e-3, "rupture at {t}");
    assert!(sim.final_state.zeta.iter().all(|&z| z == 0.0));
}

#[test]
fn refinement_of_identical_levels_is_exactly_zero() {
    let mut c = ExperimentConfig::defaults(ExperimentKind::Friction);
    c.t_end = 4e-5;
    let r = refinement_study(&c, &[1, 1], &[1, 1]).unwrap();
    assert_eq!(r.pairwise.len(), 1);
    assert_eq!(r.pairwise[0].relative_l2, 0.0);
    assert!(matches!(refinement_study(&c, &[1], &[1]), Err(Error::Config(_))));
    assert!(matches!(refinement_study(&c, &[1, 2], &[1]), Err(Error::Config(_))));
}

#[test]
fn order_and_distance_helpers() {
    // error c h^2 with h = 1, 1/2, 1/4
    assert!((observed_order(1.0 + 0.4, 1.0 + 0.1, 1.0 + 0.025) - 2.0).abs() < 1e-12);
    assert_eq!(relative_l2(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
    assert!((relative_l2(&[3.0, 4.0], &[0.0, 0.0]) - 1.0).abs() < 1e-15);
    assert_eq!(relative_l2(&[0.0], &[0.0]), 0.0);
}
