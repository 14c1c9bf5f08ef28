use criterion::{black_box, criterion_group, criterion_main, Criterion};

use toeplitz_pnt::averaging::{poly_average, prime_average, semiprime_average};
use toeplitz_pnt::sturmian::vinogradov_sum;
use toeplitz_pnt::{ObservableSpec, PolynomialSpec, PrimeTable, RotationSpec};
use toeplitz_pnt_bench::bounded_skeleton;

fn averages(c: &mut Criterion) {
    let table = PrimeTable::new(10_000_000).unwrap();
    let sk = bounded_skeleton();
    let f = ObservableSpec::parity(2);
    let mut group = c.benchmark_group("averages");
    group.sample_size(10);
    group.bench_function("primes 1e7", |b| {
        b.iter(|| prime_average(&sk, &f, black_box(10_000_000), 0, &table).unwrap())
    });
    group.bench_function("semiprimes 1e7", |b| {
        b.iter(|| semiprime_average(&sk, &f, black_box(10_000_000), 0, &table).unwrap())
    });
    group.bench_function("squares 1e6", |b| {
        b.iter(|| {
            poly_average(&sk, &PolynomialSpec::square(), &f, black_box(1_000_000), 0).unwrap()
        })
    });
    let spec = RotationSpec::golden();
    group.bench_function("exponential sum 1e7", |b| {
        b.iter(|| vinogradov_sum(spec.alpha, black_box(10_000_000), &table).unwrap())
    });
    group.finish();
}

criterion_group!(benches, averages);
criterion_main!(benches);
