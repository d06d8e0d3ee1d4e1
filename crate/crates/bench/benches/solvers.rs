use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use tsq_bench::{coverage_suite, rate_suite};
use tsq_core::{
    additional_greedy, bootstrap_solve, build_three_objective_qubo, normalize_costs, reference_frontier,
    solve_exact, solve_sa, AnnealConfig, BootstrapConfig,
};

fn qubo_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_three_objective_qubo");
    for tests in [50, 200, 567] {
        let suite = coverage_suite(tests, 400, 0.05, 1);
        let costs = normalize_costs(&suite).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(tests), &tests, |b, _| {
            b.iter(|| build_three_objective_qubo(black_box(&suite), &costs, 0.5, None).unwrap())
        });
    }
    group.finish();
}

fn annealing(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_sa");
    group.sample_size(10);
    for tests in [12, 100] {
        let suite = coverage_suite(tests, 40, 0.1, 2);
        let costs = normalize_costs(&suite).unwrap();
        let model = build_three_objective_qubo(&suite, &costs, 0.5, None).unwrap();
        let config = AnnealConfig {
            num_reads: 20,
            sweeps: 500,
            beta_range: None,
            seed: 7,
        };
        group.bench_with_input(BenchmarkId::from_parameter(tests), &tests, |b, _| {
            b.iter(|| solve_sa(black_box(&model), &config).unwrap())
        });
    }
    group.finish();
}

fn exhaustive(c: &mut Criterion) {
    let suite = coverage_suite(16, 20, 0.15, 3);
    let costs = normalize_costs(&suite).unwrap();
    let model = build_three_objective_qubo(&suite, &costs, 0.5, None).unwrap();
    c.bench_function("solve_exact/16", |b| b.iter(|| solve_exact(black_box(&model)).unwrap()));
}

fn greedy_and_frontier(c: &mut Criterion) {
    let suite = coverage_suite(567, 2000, 0.01, 4);
    let costs = normalize_costs(&suite).unwrap();
    c.bench_function("additional_greedy/567", |b| {
        b.iter(|| additional_greedy(black_box(&suite), &costs).unwrap())
    });
    let frontiers: Vec<_> = (0..10)
        .map(|seed| {
            let s = coverage_suite(100, 300, 0.02, seed);
            let c = normalize_costs(&s).unwrap();
            additional_greedy(&s, &c).unwrap().frontier
        })
        .collect();
    c.bench_function("reference_frontier/10x100", |b| {
        b.iter(|| reference_frontier(black_box(&frontiers)).unwrap())
    });
}

fn bootstrap(c: &mut Criterion) {
    let suite = rate_suite(287, 5);
    let costs = normalize_costs(&suite).unwrap();
    let bconfig = BootstrapConfig {
        n: 20,
        m: 21,
        beta_coverage: 0.9,
        seed: 1,
    };
    let aconfig = AnnealConfig {
        num_reads: 10,
        sweeps: 200,
        beta_range: None,
        seed: 2,
    };
    c.bench_function("bootstrap_solve/287", |b| {
        b.iter(|| bootstrap_solve(black_box(&suite), &costs, 0.5, &bconfig, &aconfig).unwrap())
    });
}

criterion_group!(benches, qubo_build, annealing, exhaustive, greedy_and_frontier, bootstrap);
criterion_main!(benches);
