use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lbclust::gen::{gen_random, GenSpec, Geometry};
use lbclust::harness::Problem;
use lbclust::par::Parallelism;
use lbclust::sum_radii::SolveOptions;
use std::hint::black_box;

fn instances(problem: Problem) -> Vec<lbclust::Instance> {
    let spec = GenSpec {
        max_facilities: 6,
        max_clients: 12,
        max_lower: 2,
        max_k: 3,
        max_m: if problem.has_outliers() { 2 } else { 0 },
        geometry: Geometry::Plane,
    };
    (0..8).map(|seed| gen_random(seed, &spec)).collect()
}

fn solvers(c: &mut Criterion) {
    for problem in Problem::ALL {
        let insts = instances(problem);
        let mut group = c.benchmark_group(problem.name());
        group.sample_size(10);
        for (label, parallelism) in [("parallel", Parallelism::Auto), ("sequential", Parallelism::Sequential)] {
            let opts = SolveOptions { parallelism, ..SolveOptions::default() };
            group.bench_with_input(BenchmarkId::from_parameter(label), &insts, |b, insts| {
                b.iter(|| {
                    for inst in insts {
                        let _ = black_box(problem.solve(inst, &opts));
                    }
                })
            });
        }
        group.finish();
    }
}

criterion_group!(benches, solvers);
criterion_main!(benches);
