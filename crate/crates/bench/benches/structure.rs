use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use nilnorm::cgc::{lambda_coeff, product_orbit};
use nilnorm::sl2rep::{realize, to_orbit_coords, OrbitFunction};
use nilnorm::{bracket, Dim, OrbitElement};

fn brackets(c: &mut Criterion) {
    let mut g = c.benchmark_group("bracket");
    for (a, b) in [
        ((0, 1, 0), (4, 2, 0)),
        ((2, 3, 0), (14, 13, 0)),
        ((3, 4, 1), (5, 6, 2)),
    ] {
        let x = OrbitElement::new3(a.0, a.1, a.2);
        let y = OrbitElement::new3(b.0, b.1, b.2);
        g.bench_with_input(
            BenchmarkId::from_parameter(format!("{x},{y}")),
            &(x, y),
            |bch, (x, y)| bch.iter(|| bracket(black_box(x), black_box(y)).unwrap()),
        );
    }
    g.finish();
}

fn lambda(c: &mut Criterion) {
    c.bench_function("lambda/mu<=8 sweep", |b| {
        b.iter(|| {
            let mut n = 0usize;
            for mu1 in 0..=8 {
                for mu2 in 0..=8 {
                    for rho in 0..=2 {
                        n += usize::from(!lambda_coeff(mu1 / 2, mu1, mu2 / 2, mu2, rho).is_zero());
                    }
                }
            }
            n
        })
    });
}

fn orbit_coords(c: &mut Criterion) {
    let mut g = c.benchmark_group("to_orbit_coords");
    for d in [4u32, 8, 12] {
        let o1 = OrbitFunction::new(Dim::Three, d / 2, d / 2, 0);
        let o2 = OrbitFunction::new(Dim::Three, 1, d - d / 2, 0);
        let f = realize(&o1).unwrap().mul(&realize(&o2).unwrap()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(d), &f, |b, f| {
            b.iter(|| to_orbit_coords(black_box(f)).unwrap())
        });
        g.bench_with_input(
            BenchmarkId::new("closed form", d),
            &(o1, o2),
            |b, (x, y)| b.iter(|| product_orbit(Dim::Three, black_box(x), black_box(y)).unwrap()),
        );
    }
    g.finish();
}

criterion_group!(benches, brackets, lambda, orbit_coords);
criterion_main!(benches);
