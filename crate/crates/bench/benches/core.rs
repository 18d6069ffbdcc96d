use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qed_bench::{bell, seeded_code};
use qed_core::experiments::CodeFamily;
use qed_core::sim::FrameSampler;
use qed_core::{
    enumerate_codewords, exact_postselection, rref_gf2, sample_detection, CheckMatrix,
    EnumerationPath, NoiseModel,
};

fn codewords(c: &mut Criterion) {
    let mut g = c.benchmark_group("codewords");
    g.sample_size(10);
    for n in [8, 12, 16] {
        let code = seeded_code(n, true, n as u64);
        g.bench_with_input(BenchmarkId::new("general", n), &code, |b, code| {
            b.iter(|| enumerate_codewords(code, EnumerationPath::default()).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("css", n), &code, |b, code| {
            b.iter(|| enumerate_codewords(code, EnumerationPath::Css).unwrap())
        });
    }
    g.finish();
}

fn rref(c: &mut Criterion) {
    let mut g = c.benchmark_group("rref");
    for n in [16, 64, 128] {
        let code = seeded_code(n, false, 1);
        let m = CheckMatrix::new(n, code.generators.clone()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| rref_gf2(m)));
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sampling");
    g.sample_size(10);
    let nm = NoiseModel::depolarizing1q(0.001).unwrap();
    for d in [3, 5, 7] {
        let e = bell(CodeFamily::Color, d, 10);
        g.bench_with_input(BenchmarkId::new("frame_10k_shots", d), &e, |b, e| {
            b.iter(|| sample_detection(e, &nm, 10_000, 1).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sampler_setup", d), &e, |b, e| {
            b.iter(|| FrameSampler::for_experiment(e, &nm).unwrap())
        });
    }
    for d in [3, 5] {
        let e = bell(CodeFamily::Color, d, 10);
        g.bench_with_input(BenchmarkId::new("exact_postselection", d), &e, |b, e| {
            b.iter(|| exact_postselection(e, &nm, 26).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, codewords, rref, sampling);
criterion_main!(benches);
