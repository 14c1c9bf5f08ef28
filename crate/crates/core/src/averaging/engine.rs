use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::observable::ObservableSpec;
use crate::arith::{isqrt, PrimeTable, SemiprimeMode};
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::polyres::PolynomialSpec;
use crate::toeplitz::ToeplitzSkeleton;

/// Times along which orbits are averaged.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "polynomial")]
pub enum IndexSet {
    Primes,
    /// Ordered pairs `(p1, p2)`, `p1 <= sqrt N`, `p1 p2 <= N`, as in pi_2.
    Semiprimes,
    Polynomial(PolynomialSpec),
}

impl IndexSet {
    pub fn name(&self) -> String {
        match self {
            IndexSet::Primes => "primes".into(),
            IndexSet::Semiprimes => "semiprimes".into(),
            IndexSet::Polynomial(p) => format!("poly:{p}"),
        }
    }
}

/// One averaged value with its normalization and optional prediction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageReport {
    pub kind: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub r: i64,
    pub value: f64,
    pub normalization: u64,
    pub predicted: Option<f64>,
    pub error_bound: Option<f64>,
}

/// Counts of index times up to `N` in each residue class mod `modulus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexHistogram {
    pub kind: String,
    pub n: u64,
    pub modulus: u64,
    pub counts: Vec<u64>,
    pub total: u64,
}

const CHUNK: u64 = 1 << 20;

fn merge(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("N must be >= 1".into()));
    }
    Ok(())
}

/// Primes `p <= N` by residue mod `modulus`.
pub fn prime_histogram(table: &PrimeTable, n: u64, modulus: u64) -> Result<IndexHistogram> {
    check_n(n)?;
    table.prime_pi(n)?;
    let m = modulus as usize;
    let counts = (0..=n / CHUNK)
        .into_par_iter()
        .fold(
            || vec![0u64; m],
            |mut h, c| {
                let lo = c * CHUNK;
                for p in table.primes_in(lo, (lo + CHUNK - 1).min(n)) {
                    h[(p % modulus) as usize] += 1;
                }
                h
            },
        )
        .reduce(|| vec![0u64; m], merge);
    let total = counts.iter().sum();
    Ok(IndexHistogram {
        kind: IndexSet::Primes.name(),
        n,
        modulus,
        counts,
        total,
    })
}

/// Semiprime pairs (pi_2 normalization) by residue of `p1 p2` mod `modulus`.
pub fn semiprime_histogram(table: &PrimeTable, n: u64, modulus: u64) -> Result<IndexHistogram> {
    check_n(n)?;
    table.prime_pi(n / 2)?;
    let m = modulus as usize;
    let small: Vec<u64> = table.primes_up_to(isqrt(n)).collect();
    let counts = small
        .par_iter()
        .fold(
            || vec![0u64; m],
            |mut h, &p1| {
                let r1 = p1 % modulus;
                for p2 in table.primes_in(2, n / p1) {
                    h[(r1 * (p2 % modulus) % modulus) as usize] += 1;
                }
                h
            },
        )
        .reduce(|| vec![0u64; m], merge);
    let total: u64 = counts.iter().sum();
    debug_assert_eq!(
        total,
        table
            .semiprime_pi(n, SemiprimeMode::SmallFactorPairs)
            .unwrap_or(total)
    );
    Ok(IndexHistogram {
        kind: IndexSet::Semiprimes.name(),
        n,
        modulus,
        counts,
        total,
    })
}

/// `P(m)`, `1 <= m <= N`, by residue mod `modulus`.
pub fn poly_histogram(p: &PolynomialSpec, n: u64, modulus: u64) -> Result<IndexHistogram> {
    check_n(n)?;
    let mut counts = vec![0u64; modulus as usize];
    for m in 1..=n.min(modulus) {
        counts[p.eval_mod(m, modulus) as usize] += (n - m) / modulus + 1;
    }
    Ok(IndexHistogram {
        kind: IndexSet::Polynomial(p.clone()).name(),
        n,
        modulus,
        counts,
        total: n,
    })
}

impl IndexHistogram {
    /// `(1/total) sum_a counts[a] F(S^(a+r) x)`, grouping the exact integer
    /// counts by window code before the single floating-point pass.
    pub fn average(
        &self,
        sk: &ToeplitzSkeleton,
        f: &ObservableSpec,
        r: i64,
    ) -> Result<AverageReport> {
        let codes = f.codes(sk)?;
        self.average_codes(&codes, f, r)
    }

    pub(crate) fn average_codes(
        &self,
        codes: &[u32],
        f: &ObservableSpec,
        r: i64,
    ) -> Result<AverageReport> {
        let len = codes.len() as u64;
        if self.modulus % len != 0 {
            return Err(Error::Contract(format!(
                "histogram modulus {} is not a multiple of the skeleton period {len}",
                self.modulus
            )));
        }
        if self.total == 0 {
            return Err(Error::Precondition(format!(
                "no {} up to N = {}",
                self.kind, self.n
            )));
        }
        let mut per_code = vec![0u128; f.table().len()];
        let shift = r.rem_euclid(len as i64) as u64;
        for (a, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                per_code[codes[((a as u64 % len + shift) % len) as usize] as usize] += c as u128;
            }
        }
        let sum = compensated_sum(
            per_code
                .iter()
                .zip(f.table())
                .filter(|(c, _)| **c > 0)
                .map(|(&c, &v)| c as f64 * v),
        );
        Ok(AverageReport {
            kind: self.kind.clone(),
            n: self.n,
            r,
            value: sum / self.total as f64,
            normalization: self.total,
            predicted: None,
            error_bound: None,
        })
    }
}

/// `(1/pi(N)) sum_{p <= N} F(S^(p+r) x)`.
pub fn prime_average(
    sk: &ToeplitzSkeleton,
    f: &ObservableSpec,
    n: u64,
    r: i64,
    table: &PrimeTable,
) -> Result<AverageReport> {
    prime_histogram(table, n, sk.resolved().len() as u64)?.average(sk, f, r)
}

/// `(1/pi_2(N)) sum_{p1 p2 <= N} F(S^(p1 p2 + r) x)` over the pairs of pi_2.
pub fn semiprime_average(
    sk: &ToeplitzSkeleton,
    f: &ObservableSpec,
    n: u64,
    r: i64,
    table: &PrimeTable,
) -> Result<AverageReport> {
    semiprime_histogram(table, n, sk.resolved().len() as u64)?.average(sk, f, r)
}

/// `(1/N) sum_{m=1}^N F(S^(P(m)+r) x)`.
pub fn poly_average(
    sk: &ToeplitzSkeleton,
    p: &PolynomialSpec,
    f: &ObservableSpec,
    n: u64,
    r: i64,
) -> Result<AverageReport> {
    poly_histogram(p, n, sk.resolved().len() as u64)?.average(sk, f, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyres::rho_count;
    use crate::toeplitz::{parse_word, random_skeleton, window, RandomSkeletonConfig};
    use proptest::prelude::*;

    fn periodic(word: &str) -> ToeplitzSkeleton {
        ToeplitzSkeleton::new("01", vec![parse_word("01", word).unwrap()]).unwrap()
    }

    #[test]
    fn period_two_examples() {
        let sk = periodic("01");
        let t = PrimeTable::new(100).unwrap();
        let f = ObservableSpec::parity(2);
        let a = prime_average(&sk, &f, 100, 0, &t).unwrap();
        assert_eq!(a.normalization, 25);
        assert!((a.value - (-23.0 / 25.0)).abs() < 1e-15);
        let p = poly_average(&sk, &PolynomialSpec::square(), &f, 10, 0).unwrap();
        assert_eq!(p.value, 0.0);
    }

    #[test]
    fn semiprime_matches_enumeration() {
        let sk = periodic("0110");
        let t = PrimeTable::new(100).unwrap();
        let f = ObservableSpec::parity(2);
        for n in [4u64, 10, 30, 97] {
            let mut sum = 0.0;
            let mut count = 0u64;
            for p1 in t.primes_up_to(isqrt(n)) {
                for p2 in t.primes_in(2, n / p1) {
                    sum += f.table()[sk.eval((p1 * p2) as i64 + 3) as usize];
                    count += 1;
                }
            }
            let a = semiprime_average(&sk, &f, n, 3, &t).unwrap();
            assert_eq!(a.normalization, count);
            assert!((a.value - sum / count as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_observable() {
        let sk = random_skeleton(3, &RandomSkeletonConfig::default());
        let t = PrimeTable::new(10_000).unwrap();
        let c = ObservableSpec::constant(sk.alphabet_size(), -0.75).unwrap();
        for r in [-5, 0, 17] {
            assert_eq!(prime_average(&sk, &c, 10_000, r, &t).unwrap().value, -0.75);
            assert_eq!(
                semiprime_average(&sk, &c, 10_000, r, &t).unwrap().value,
                -0.75
            );
            assert_eq!(
                poly_average(&sk, &PolynomialSpec::square(), &c, 999, r)
                    .unwrap()
                    .value,
                -0.75
            );
        }
    }

    #[test]
    fn zero_n_rejected() {
        let sk = periodic("01");
        let t = PrimeTable::new(100).unwrap();
        let f = ObservableSpec::parity(2);
        assert!(matches!(
            prime_average(&sk, &f, 0, 0, &t),
            Err(Error::Precondition(_))
        ));
        assert!(prime_average(&sk, &f, 1, 0, &t).is_err());
        assert!(prime_average(&sk, &f, 1000, 0, &t).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn windowed_reduction_is_exact(seed in 0u64..500, m in 0u32..3, n in 2u64..5000, r in -20i64..20) {
            let sk = random_skeleton(seed, &RandomSkeletonConfig::default());
            let t = PrimeTable::new(5000).unwrap();
            let f = ObservableSpec::from_fn(sk.alphabet_size(), m, |w| {
                w.iter().enumerate().map(|(i, &s)| (i as f64 + 1.0) * s as f64).sum::<f64>().sin()
            }).unwrap();
            let w = window(&sk, m).unwrap();
            let flat = f.flattened().unwrap();
            let a = prime_average(&sk, &f, n, r, &t).unwrap();
            let b = prime_average(&w, &flat, n, r, &t).unwrap();
            prop_assert_eq!(a.value, b.value);
            prop_assert!(a.value.abs() <= f.sup_norm() + 1e-12);
        }

        #[test]
        fn poly_average_matches_rho_counts(seed in 0u64..500, n in 1u64..3000, r in 0i64..10) {
            let sk = random_skeleton(seed, &RandomSkeletonConfig::default());
            let f = ObservableSpec::parity(sk.alphabet_size());
            for p in [PolynomialSpec::square(), "m^2+m".parse().unwrap()] {
                let len = sk.resolved().len() as u64;
                let direct: f64 = (0..len)
                    .map(|a| rho_count(&p, n, len, a as i64) as f64 * f.table()[sk.eval(a as i64 + r) as usize])
                    .sum::<f64>() / n as f64;
                let got = poly_average(&sk, &p, &f, n, r).unwrap().value;
                prop_assert_eq!(got, direct);
            }
        }
    }
}
