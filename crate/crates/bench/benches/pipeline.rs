use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use anyon_bench::{small_config, state, ETAS};
use anyon_entropy::special_fns::ScriptDTable;
use anyon_entropy::{
    build_rdm, entropy_sweep, FourPointEvaluator, FourPointMethod, LogBase, RdmMethod, StatisticsParameter,
    TruncationConfig,
};

fn script_d_table(c: &mut Criterion) {
    let mut g = c.benchmark_group("script_d_table");
    for eta in ETAS {
        g.bench_with_input(BenchmarkId::from_parameter(eta), &eta, |b, &eta| {
            b.iter(|| ScriptDTable::new(black_box(eta), 160).unwrap())
        });
    }
    g.finish();
}

fn four_point(c: &mut Criterion) {
    let eta = StatisticsParameter::new(1.0).unwrap();
    let eval = FourPointEvaluator::new(eta, 40, FourPointMethod::Series).unwrap();
    c.bench_function("four_point/series_row", |b| {
        b.iter(|| (0..40).map(|k| eval.eval(black_box(7), k, 1, 0).unwrap()).sum::<f64>())
    });
    c.bench_function("four_point/evaluator_setup", |b| {
        b.iter(|| FourPointEvaluator::new(eta, black_box(40), FourPointMethod::Series).unwrap())
    });
}

fn rdm(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_rdm");
    g.sample_size(20);
    let cfg = small_config();
    for (j, i) in [(0, 0), (1, 0)] {
        for method in [RdmMethod::Generic, RdmMethod::ClosedForm] {
            let id = BenchmarkId::new(format!("{j}{i}/{method}"), cfg.basis_dim);
            g.bench_function(id, |b| b.iter(|| build_rdm(&state(j, i, 1.0), &cfg, method).unwrap()));
        }
    }
    let full = TruncationConfig::default();
    g.bench_function(BenchmarkId::new("00/generic", full.basis_dim), |b| {
        b.iter(|| build_rdm(&state(0, 0, 1.0), &full, RdmMethod::Generic).unwrap())
    });
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let grid: Vec<f64> = (0..41).map(|k| 0.1 * k as f64).collect();
    let cfg = TruncationConfig::default();
    let mut g = c.benchmark_group("entropy_sweep");
    g.sample_size(10);
    g.bench_function("10/41_points", |b| {
        b.iter(|| entropy_sweep((1, 0), &grid, &cfg, RdmMethod::Generic, LogBase::Two).unwrap())
    });
    g.finish();
}

criterion_group!(benches, script_d_table, four_point, rdm, sweep);
criterion_main!(benches);
