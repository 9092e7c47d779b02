use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nilnorm::normalform::normal_form;
use nilnorm_bench::{dense_2d, symbolic_3d};

fn numeric_2d(c: &mut Criterion) {
    let mut g = c.benchmark_group("normal_form/2d numeric");
    g.sample_size(20);
    for nu in 1..=3 {
        let p = dense_2d(nu, 4 * (nu + 1));
        g.bench_with_input(BenchmarkId::from_parameter(nu), &p, |b, p| {
            b.iter(|| normal_form(p).unwrap())
        });
    }
    g.finish();
}

fn symbolic_first_level(c: &mut Criterion) {
    let mut g = c.benchmark_group("normal_form/3d symbolic");
    g.sample_size(10);
    for max_grade in [3u32, 4] {
        let p = symbolic_3d(max_grade);
        g.bench_with_input(BenchmarkId::from_parameter(max_grade), &p, |b, p| {
            b.iter(|| normal_form(p).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, numeric_2d, symbolic_first_level);
criterion_main!(benches);
