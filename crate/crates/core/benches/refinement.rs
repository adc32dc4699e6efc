use criterion::{criterion_group, criterion_main, Criterion};
use ecdyn_core::experiments::{refinement_study, ExperimentConfig, ExperimentKind};

fn refinement(c: &mut Criterion) {
    let mut g = c.benchmark_group("friction_refinement_levels_1_2_3");
    g.sample_size(10);
    for (name, parallel) in [("parallel", true), ("sequential", false)] {
        let mut cfg = ExperimentConfig::defaults(ExperimentKind::Friction);
        cfg.t_end = 1e-4;
        cfg.parallel = parallel;
        g.bench_function(name, |b| b.iter(|| refinement_study(&cfg, &[1, 2, 3], &[1, 2, 3]).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, refinement);
criterion_main!(benches);
