use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use upadic_core::umatrix::build_matrix_oracle;
use upadic_core::ExecMode;

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle_matrix");
    g.sample_size(10);
    for (p, n) in [(3u64, 20usize), (7, 15)] {
        for mode in [ExecMode::Sequential, ExecMode::Parallel] {
            g.bench_with_input(BenchmarkId::new(format!("{mode:?}"), format!("p{p}_n{n}")), &(p, n), |b, &(p, n)| {
                b.iter(|| build_matrix_oracle(p, n, n, mode).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, oracle);
criterion_main!(benches);
