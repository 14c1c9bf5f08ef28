//! Build, serialize, reload and re-check skeletons through the public API.

use toeplitz_pnt::averaging::{oscillation_witness, prime_average};
use toeplitz_pnt::constructions::{build_squares_counterexample, build_theorem_a, validate_all};
use toeplitz_pnt::{
    BuildConfig, IndexSet, ObservableSpec, PolynomialSpec, PrimeTable, Theorem, ToeplitzSkeleton,
};

#[test]
fn theorem_a_round_trip() {
    let b = build_theorem_a(&BuildConfig::default()).unwrap();
    let text = b.skeleton.to_text().unwrap();
    let back = ToeplitzSkeleton::from_text(&text).unwrap();
    assert_eq!(back.to_text().unwrap(), text);
    let which = Theorem::from_metadata(back.metadata()).unwrap();
    assert_eq!(which, Theorem::A { growth: 2 });
    let certs = validate_all(&back, &which).unwrap();
    assert!(certs.iter().all(|c| c.passed()));

    let table = PrimeTable::new(1_000_000).unwrap();
    let f = ObservableSpec::parity(2);
    let w = oscillation_witness(&back, &IndexSet::Primes, &f, &[1, 2], 0, Some(&table)).unwrap();
    assert!(w[1].gap.unwrap() >= 0.5);
    // the periodic closure is defined everywhere, so averages are finite sums
    let a = prime_average(&back, &f, 1_000_000, 0, &table).unwrap();
    assert!(a.value.abs() <= 1.0);
}

#[test]
fn squares_round_trip() {
    let b = build_squares_counterexample(&BuildConfig::default()).unwrap();
    let back = ToeplitzSkeleton::from_text(&b.skeleton.to_text().unwrap()).unwrap();
    let which = Theorem::from_metadata(back.metadata()).unwrap();
    assert!(validate_all(&back, &which)
        .unwrap()
        .iter()
        .all(|c| c.passed()));
    let w = oscillation_witness(
        &back,
        &IndexSet::Polynomial(PolynomialSpec::square()),
        &ObservableSpec::parity(2),
        &[1, 2],
        0,
        None,
    )
    .unwrap();
    assert!(w[1].gap.unwrap() >= 1.0 / 60.0);
}
