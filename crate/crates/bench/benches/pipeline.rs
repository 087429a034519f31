use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rnaqubo::models::build;
use rnaqubo::pipeline::candidates_for;
use rnaqubo::solvers::solve;
use rnaqubo::{worst_case_sequence, ModelKind, ModelParams, PredictConfig, SolveMethod, SolveRequest};
use rnaqubo_bench::{kissing_hairpins, random_sequence};

fn enumeration(c: &mut Criterion) {
    let cfg = PredictConfig::default();
    let mut g = c.benchmark_group("enumerate");
    for n in [31, 41, 61] {
        let seq = worst_case_sequence(n);
        g.bench_with_input(BenchmarkId::new("worst-case", n), &seq, |b, seq| {
            b.iter(|| candidates_for(ModelKind::One, seq, &cfg).unwrap())
        });
    }
    for n in [50, 100, 200] {
        let seq = random_sequence(n, 1);
        g.bench_with_input(BenchmarkId::new("random-quartets", n), &seq, |b, seq| {
            b.iter(|| candidates_for(ModelKind::Two, seq, &cfg).unwrap())
        });
    }
    g.finish();
}

fn construction(c: &mut Criterion) {
    let cfg = PredictConfig::default();
    let seq = kissing_hairpins(3);
    let mut g = c.benchmark_group("build");
    for kind in ModelKind::ALL {
        let set = candidates_for(kind, &seq, &cfg).unwrap();
        let params = ModelParams::defaults(kind);
        g.bench_function(BenchmarkId::new("model", kind.number()), |b| {
            b.iter(|| build(&set, &params, &cfg.loops).unwrap())
        });
    }
    g.finish();
}

fn solving(c: &mut Criterion) {
    let cfg = PredictConfig::default();
    let mut g = c.benchmark_group("solve");
    g.sample_size(10);
    for (name, seq) in [("random-25", random_sequence(25, 7)), ("kissing-2", kissing_hairpins(2))] {
        let set = candidates_for(ModelKind::Three, &seq, &cfg).unwrap();
        let qubo = build(&set, &ModelParams::defaults(ModelKind::Three), &cfg.loops).unwrap();
        for method in [SolveMethod::Exhaustive, SolveMethod::SimAnneal, SolveMethod::Tabu] {
            if method == SolveMethod::Exhaustive && qubo.num_vars() > 64 {
                continue;
            }
            let req = SolveRequest::new(method, 0);
            g.bench_function(BenchmarkId::new(format!("{method:?}"), name), |b| {
                b.iter(|| solve(&qubo, &req).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, enumeration, construction, solving);
criterion_main!(benches);
