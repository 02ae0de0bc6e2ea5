use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ambc::harness::{run_ber, run_mae, Executor, ExperimentConfig, ExperimentKind};

fn workers() -> Vec<usize> {
    let all = std::thread::available_parallelism().map_or(1, |n| n.get());
    vec![1, all.max(2)]
}

fn mae(c: &mut Criterion) {
    let cfg = ExperimentConfig {
        snr_grid: vec![10.0],
        pilot_pairs: vec![30],
        trials: 2_000,
        ..ExperimentConfig::new(ExperimentKind::MaeVsSnr)
    };
    let mut group = c.benchmark_group("mae_2k_trials");
    group.sample_size(10);
    for t in workers() {
        let exec = Executor::new(t).unwrap();
        group.bench_with_input(BenchmarkId::new("workers", t), &exec, |b, exec| {
            b.iter(|| run_mae(&cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn ber(c: &mut Criterion) {
    let cfg = ExperimentConfig {
        snr_grid: vec![10.0],
        trials: 500,
        ..ExperimentConfig::new(ExperimentKind::BerCompare)
    };
    let mut group = c.benchmark_group("ber_500_frames");
    group.sample_size(10);
    for t in workers() {
        let exec = Executor::new(t).unwrap();
        group.bench_with_input(BenchmarkId::new("workers", t), &exec, |b, exec| {
            b.iter(|| run_ber(&cfg, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, mae, ber);
criterion_main!(benches);
