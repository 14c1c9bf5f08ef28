use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use toeplitz_pnt::arith::SemiprimeMode;
use toeplitz_pnt::PrimeTable;

fn sieve(c: &mut Criterion) {
    let mut group = c.benchmark_group("sieve");
    group.sample_size(10);
    for limit in [1_000_000u64, 10_000_000] {
        group.bench_with_input(BenchmarkId::from_parameter(limit), &limit, |b, &n| {
            b.iter(|| PrimeTable::new(black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn counts(c: &mut Criterion) {
    let table = PrimeTable::new(10_000_000).unwrap();
    c.bench_function("prime_pi_ap 1e7 mod 30030", |b| {
        b.iter(|| table.prime_pi_ap(black_box(10_000_000), 30030, 1).unwrap())
    });
    c.bench_function("semiprime_pi 1e7", |b| {
        b.iter(|| {
            table
                .semiprime_pi(black_box(10_000_000), SemiprimeMode::SmallFactorPairs)
                .unwrap()
        })
    });
}

criterion_group!(benches, sieve, counts);
criterion_main!(benches);
