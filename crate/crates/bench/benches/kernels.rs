use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use hostlab::fourier::{ft_adic, scaled_sq_integral, SmoothingParams};
use hostlab::seed;
use hostlab::{AdicTransform, MeasureGen, OrbitKernel, Scaled, UnitPoint};

fn orbit_step(c: &mut Criterion) {
    let gen = MeasureGen::cantor();
    let mut rng = seed::rng_from_seed(1);
    // Roughly the precision a 10^5-step ×2 orbit needs in base 3.
    let x = UnitPoint::from_digits(3, &gen.sample_digits(&mut rng, 63_200)).unwrap();
    c.bench_function("orbit_step_x2_L63200", |bch| {
        bch.iter_batched_ref(
            || OrbitKernel::new(&x, 2).unwrap(),
            |k| {
                for _ in 0..100 {
                    k.step();
                }
                black_box(k.top_bits53())
            },
            BatchSize::SmallInput,
        )
    });
}

fn fourier(c: &mut Criterion) {
    let mu = MeasureGen::bernoulli(vec![0.2, 0.5, 0.3]).unwrap().realize(10).unwrap();
    c.bench_function("ft_adic_3^10", |bch| bch.iter(|| ft_adic(&mu, black_box(17.5))));
}

fn correlation(c: &mut Criterion) {
    let mu = MeasureGen::cantor().realize(12).unwrap();
    c.bench_function("correlation_integral_cantor12", |bch| {
        bch.iter(|| mu.correlation_integral(black_box(3f64.powi(-6))).unwrap())
    });
}

fn smoothing(c: &mut Criterion) {
    let mu = AdicTransform::from_generator(&MeasureGen::cantor(), None, 8).unwrap();
    let nu = Scaled::new(mu, 81.0).unwrap();
    let params = SmoothingParams::new(2.0, 1, 1.0 / 9.0).unwrap();
    let mut group = c.benchmark_group("smoothing");
    group.sample_size(10);
    group.bench_function("scaled_sq_integral_cantor8", |bch| bch.iter(|| scaled_sq_integral(&nu, &params).unwrap()));
    group.finish();
}

criterion_group!(benches, orbit_step, fourier, correlation, smoothing);
criterion_main!(benches);
