use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mustab_bench::{generated, worked_example};
use mustab_core::criterion::compute_limits;
use mustab_core::dde::{fit_rate, simulate, HistorySpec};
use mustab_core::model::analyze_structure;
use mustab_core::sampling::Sampling;
use mustab_core::transform::{transform_field, verify_lemma2};
use mustab_core::{DelayFunction, MuFunction};

fn field_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("field");
    for n in [2, 4, 8] {
        let sys = generated(n, 3);
        let x = vec![0.7; n];
        group.bench_with_input(BenchmarkId::new("eval", n), &x, |b, x| b.iter(|| sys.f.eval(black_box(x))));
        group.bench_with_input(BenchmarkId::new("jacobian", n), &x, |b, x| b.iter(|| sys.f.jacobian(black_box(x))));
        group.bench_function(BenchmarkId::new("transform", n), |b| b.iter(|| transform_field(&sys.f, &sys.r)));
    }
    group.finish();
}

fn analysis_kernels(c: &mut Criterion) {
    let sys = generated(3, 5);
    c.bench_function("structure/analyze_n3", |b| {
        b.iter(|| analyze_structure(&sys.f, &sys.g, &sys.r, &Sampling::default()))
    });
    c.bench_function("lemma2/200_trials_n3", |b| b.iter(|| verify_lemma2(&sys.f, &sys.r, 200, 1)));
    c.bench_function("limits/loglog_powerlag", |b| {
        b.iter(|| compute_limits(&MuFunction::LogLog, &DelayFunction::PowerLag { alpha: 0.5 }, 0.0, 1.0))
    });
}

fn simulation_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate");
    group.sample_size(10);
    for t_end in [1e3, 1e4] {
        let doc = worked_example(t_end);
        let cfg = doc.sim.clone().unwrap();
        let history = HistorySpec::Constant(vec![1.0, 4.0]);
        group.bench_with_input(BenchmarkId::new("worked_example", t_end as u64), &cfg, |b, cfg| {
            b.iter(|| simulate(&doc.f, &doc.g, &doc.delay, &history, cfg).unwrap())
        });
    }
    group.finish();

    let doc = worked_example(1e4);
    let traj = simulate(&doc.f, &doc.g, &doc.delay, &HistorySpec::Constant(vec![1.0, 4.0]), doc.sim.as_ref().unwrap())
        .unwrap();
    c.bench_function("fit/worked_example_1e4", |b| b.iter(|| fit_rate(&traj, &MuFunction::Log, 0.5)));
}

criterion_group!(benches, field_kernels, analysis_kernels, simulation_kernels);
criterion_main!(benches);
