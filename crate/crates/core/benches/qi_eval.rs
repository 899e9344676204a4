use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;
use svqi::fields::FieldId;
use svqi::kernels::{KernelFamily, ZonalKernel};
use svqi::par::ExecMode;
use svqi::points::fibonacci_points;
use svqi::qi::{qi_decompose_with, VectorFieldSamples};
use svqi::sbf::assemble_with;

const EVAL: usize = 2000;

fn samples(n: usize) -> VectorFieldSamples {
    VectorFieldSamples::from_fn(fibonacci_points(n).unwrap(), |x| FieldId::Field1.eval(x).unwrap().f)
}

fn qi_modes(c: &mut Criterion) {
    let evals = fibonacci_points(EVAL).unwrap().nodes;
    let mut group = c.benchmark_group("qi_decompose");
    group.sample_size(10);
    for n in [1000, 4000] {
        let s = samples(n);
        let k = ZonalKernel::new(KernelFamily::Gaussian, 0.75 / (n as f64).powf(0.25), 4).unwrap();
        group.throughput(Throughput::Elements((n * EVAL) as u64));
        for mode in [ExecMode::Parallel, ExecMode::Sequential] {
            group.bench_with_input(BenchmarkId::new(mode.to_string(), n), &mode, |b, &mode| {
                b.iter(|| qi_decompose_with(&k, black_box(&s), &evals, mode))
            });
        }
    }
    group.finish();
}

fn sbf_modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("sbf_assemble_solve");
    group.sample_size(10);
    let n = 600;
    let s = samples(n);
    let k = ZonalKernel::new(KernelFamily::Gaussian, 0.4, 2).unwrap();
    for mode in [ExecMode::Parallel, ExecMode::Sequential] {
        group.bench_with_input(BenchmarkId::new(mode.to_string(), n), &mode, |b, &mode| {
            b.iter(|| assemble_with(&k, black_box(&s), mode).solve().unwrap())
        });
    }
    group.finish();
}

fn kernel_values(c: &mut Criterion) {
    let k = ZonalKernel::new(KernelFamily::WE32, 0.5, 8).unwrap();
    let ts: Vec<f64> = (0..1000).map(|i| -1.0 + 2.0 * (i as f64 + 0.5) / 1000.0).collect();
    c.bench_function("we32_m8_kappa_1000", |b| b.iter(|| ts.iter().map(|&t| k.kappa(black_box(t))).sum::<f64>()));
}

criterion_group!(benches, qi_modes, sbf_modes, kernel_values);
criterion_main!(benches);
