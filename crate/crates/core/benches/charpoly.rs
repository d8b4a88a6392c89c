use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use upadic_core::charseries::char_poly_coeffs;
use upadic_core::umatrix::build_matrix_genfun;
use upadic_core::ExecMode;

fn charpoly(c: &mut Criterion) {
    let mut g = c.benchmark_group("charpoly_p3");
    g.sample_size(10);
    for n in [20usize, 40] {
        let m = build_matrix_genfun(3, n, n).unwrap();
        for mode in [ExecMode::Sequential, ExecMode::Parallel] {
            g.bench_with_input(BenchmarkId::new(format!("{mode:?}"), n), &m, |b, m| {
                b.iter(|| char_poly_coeffs(&m.entries, n, mode))
            });
        }
    }
    g.finish();
}

criterion_group!(benches, charpoly);
criterion_main!(benches);
