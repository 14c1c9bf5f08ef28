use serde::{Deserialize, Serialize};

use super::engine::{prime_histogram, semiprime_histogram, IndexSet};
use super::observable::ObservableSpec;
use crate::arith::PrimeTable;
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::polyres::PolynomialSpec;
use crate::toeplitz::ToeplitzSkeleton;

/// Average at the scale of one stage and its gap to the previous scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessPoint {
    pub stage: usize,
    pub scale: u64,
    pub normalization: f64,
    pub value: f64,
    pub gap: Option<f64>,
}

/// Real `x >= 0` with `P(x) = n`, by bisection.
fn real_inverse(p: &PolynomialSpec, n: u64) -> f64 {
    let eval = |x: f64| {
        p.coefficients()
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c as f64)
    };
    let target = n as f64;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while eval(hi) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eval(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Stage-scale averages for the given stages:
/// primes and semiprimes below `n_t` normalized by their count, and
/// `(1/P^-1(n_t)) sum_{m >= 0, P(m) < n_t} F(S^(P(m)+r) x)` for polynomials.
pub fn oscillation_witness(
    sk: &ToeplitzSkeleton,
    kind: &IndexSet,
    f: &ObservableSpec,
    stages: &[usize],
    r: i64,
    table: Option<&PrimeTable>,
) -> Result<Vec<WitnessPoint>> {
    let codes = f.codes(sk)?;
    let len = codes.len() as u64;
    let mut out: Vec<WitnessPoint> = Vec::with_capacity(stages.len());
    for &t in stages {
        let scale = sk.stage(t)?.period;
        let (value, normalization) = match kind {
            IndexSet::Primes | IndexSet::Semiprimes => {
                let table =
                    table.ok_or_else(|| Error::Precondition("prime table required".into()))?;
                if scale < 2 {
                    return Err(Error::Precondition(format!(
                        "stage {t} has scale {scale} < 2"
                    )));
                }
                let h = if *kind == IndexSet::Primes {
                    prime_histogram(table, scale - 1, len)?
                } else {
                    semiprime_histogram(table, scale - 1, len)?
                };
                let rep = h.average_codes(&codes, f, r)?;
                (rep.value, rep.normalization as f64)
            }
            IndexSet::Polynomial(p) => {
                let mut terms = Vec::new();
                for m in 0u64.. {
                    match p.eval(m) {
                        Some(v) if v < scale => {
                            let pos = (v % len + r.rem_euclid(len as i64) as u64) % len;
                            terms.push(f.table()[codes[pos as usize] as usize]);
                        }
                        _ => break,
                    }
                }
                let norm = real_inverse(p, scale);
                (compensated_sum(terms) / norm, norm)
            }
        };
        let gap = out.last().map(|prev| (value - prev.value).abs());
        out.push(WitnessPoint {
            stage: t,
            scale,
            normalization,
            value,
            gap,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        build_squares_counterexample, build_theorem_a, square_scale_value, BuildConfig,
    };
    use crate::toeplitz::parse_word;

    #[test]
    fn periodic_scales_hand_count() {
        let sk = ToeplitzSkeleton::new(
            "01",
            vec![
                parse_word("01", "010101").unwrap(),
                parse_word("01", &"01".repeat(15)).unwrap(),
            ],
        )
        .unwrap();
        let t = PrimeTable::new(100).unwrap();
        let f = ObservableSpec::parity(2);
        let w = oscillation_witness(&sk, &IndexSet::Primes, &f, &[0, 1], 0, Some(&t)).unwrap();
        // primes below 6: 2, 3, 5; below 30: ten primes, one even
        assert!((w[0].value + 1.0 / 3.0).abs() < 1e-15);
        assert!((w[1].value + 0.8).abs() < 1e-15);
        assert!(w[0].gap.is_none());
        assert!((real_inverse(&PolynomialSpec::square(), 50) - 50f64.sqrt()).abs() < 1e-12);
        let one = ToeplitzSkeleton::new("01", vec![parse_word("01", "0").unwrap()]).unwrap();
        assert!(oscillation_witness(&one, &IndexSet::Primes, &f, &[0], 0, Some(&t)).is_err());
    }

    #[test]
    fn theorem_a_gaps() {
        let cfg = BuildConfig {
            modulus_budget: 1_000_000,
            ..Default::default()
        };
        let b = build_theorem_a(&cfg).unwrap();
        let t = PrimeTable::new(1_000_000).unwrap();
        let w = oscillation_witness(
            &b.skeleton,
            &IndexSet::Primes,
            &ObservableSpec::parity(2),
            &[1, 2],
            0,
            Some(&t),
        )
        .unwrap();
        assert!(w[0].value > 0.5 && w[1].value < -0.5, "{w:?}");
        assert!(w[1].gap.unwrap() >= cfg.oscillation_target);
    }

    #[test]
    fn squares_witness_matches_builder_values() {
        let b = build_squares_counterexample(&BuildConfig::default()).unwrap();
        let sk = &b.skeleton;
        let w = oscillation_witness(
            sk,
            &IndexSet::Polynomial(PolynomialSpec::square()),
            &ObservableSpec::parity(2),
            &[1, 2],
            0,
            None,
        )
        .unwrap();
        for p in &w {
            let direct = square_scale_value(sk.resolved(), p.scale).unwrap();
            assert!((p.value - direct).abs() < 1e-12);
        }
        assert!(w[1].gap.unwrap() >= 1.0 / 60.0);
    }
}
