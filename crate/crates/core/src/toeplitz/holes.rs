use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::skeleton::{ToeplitzSkeleton, HOLE};
use crate::arith::euler_phi;
use crate::error::Result;
use crate::polyres::{residue_profile, PolynomialSpec};

/// Hole statistics of one stage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageHoles {
    pub t: usize,
    pub period: u64,
    pub holes: u64,
    pub phi: u64,
    /// rho^P(n_t), when a polynomial was supplied.
    pub rho: Option<u64>,
    pub density: f64,
    pub per_phi: f64,
    pub per_rho: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HoleReport {
    pub stages: Vec<StageHoles>,
    pub completion: String,
    pub threshold: f64,
    /// Holes per period non-increasing in density and the last density below
    /// the threshold (finite-prefix reading of `?_t = o(n_t)`).
    pub regular: bool,
    /// Same for `?_t / phi(n_t)`.
    pub phi_small: bool,
    /// Same for `?_t rho^P(n_t) / n_t`.
    pub rho_small: Option<bool>,
}

fn trend(values: &[f64], threshold: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + 1e-12)
        && values.last().is_some_and(|&v| v <= threshold)
}

/// Exact per-stage hole counts and their ratios to `n_t`, `phi(n_t)` and
/// `n_t / rho^P(n_t)`.
pub fn hole_report(
    sk: &ToeplitzSkeleton,
    poly: Option<&PolynomialSpec>,
    threshold: f64,
) -> HoleReport {
    let stages: Vec<StageHoles> = sk
        .stages()
        .iter()
        .enumerate()
        .map(|(t, s)| {
            let holes = s.hole_count();
            let phi = euler_phi(s.period);
            let rho = poly.map(|p| residue_profile(p, s.period).rho_max());
            StageHoles {
                t,
                period: s.period,
                holes,
                phi,
                rho,
                density: holes as f64 / s.period as f64,
                per_phi: holes as f64 / phi as f64,
                per_rho: rho.map(|r| holes as f64 * r as f64 / s.period as f64),
            }
        })
        .collect();
    let density: Vec<f64> = stages.iter().map(|s| s.density).collect();
    let per_phi: Vec<f64> = stages.iter().map(|s| s.per_phi).collect();
    let per_rho: Option<Vec<f64>> = stages.iter().map(|s| s.per_rho).collect();
    HoleReport {
        regular: trend(&density, threshold),
        phi_small: trend(&per_phi, threshold),
        rho_small: per_rho.map(|v| trend(&v, threshold)),
        stages,
        completion: sk.completion().name().to_string(),
        threshold,
    }
}

/// Non-negative dyadic rational `numerator / 2^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    numerator: BigUint,
    exponent: u64,
}

impl Dyadic {
    pub fn new(mut numerator: BigUint, mut exponent: u64) -> Self {
        if numerator.is_zero() {
            return Dyadic {
                numerator,
                exponent: 0,
            };
        }
        let tz = numerator.trailing_zeros().unwrap_or(0).min(exponent);
        numerator >>= tz;
        exponent -= tz;
        Dyadic {
            numerator,
            exponent,
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Compares with the integer `k`.
    pub fn cmp_integer(&self, k: u64) -> Ordering {
        self.numerator.cmp(&(BigUint::from(k) << self.exponent))
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.numerator.bits();
        // keep 64 significant bits before dividing
        let shift = bits.saturating_sub(64);
        let top = (&self.numerator >> shift).to_f64().unwrap_or(f64::INFINITY);
        top * 2f64.powi(shift as i32 - self.exponent as i32)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/2^{}", self.numerator, self.exponent)
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Cyclic distance from each position to the nearest hole of the stage, or
/// `None` when the stage has no holes.
fn hole_distances(word: &[u32]) -> Option<Vec<u64>> {
    let n = word.len();
    let first = word.iter().position(|&c| c == HOLE)?;
    let mut dist = vec![u64::MAX; n];
    // forward pass from the first hole, wrapping once
    let mut last = first;
    for step in 0..n {
        let j = (first + step) % n;
        if word[j] == HOLE {
            last = j;
        }
        dist[j] = ((j + n - last) % n) as u64;
    }
    let last_hole = word.iter().rposition(|&c| c == HOLE).unwrap();
    let mut next = last_hole;
    for step in 0..n {
        let j = (last_hole + n - step) % n;
        if word[j] == HOLE {
            next = j;
        }
        dist[j] = dist[j].min(((next + n - j) % n) as u64);
    }
    Some(dist)
}

/// delta(E^t) = sum over one period of 2^-d(j), `d(j)` the distance from `j`
/// to the nearest position holed at stage `t` in the periodic extension.
pub fn tower_diameter(sk: &ToeplitzSkeleton, t: usize) -> Result<Dyadic> {
    let stage = sk.stage(t)?;
    let Some(dist) = hole_distances(&stage.word) else {
        return Ok(Dyadic::new(BigUint::zero(), 0));
    };
    let max = *dist.iter().max().unwrap() as usize;
    let mut counts = vec![0u64; max + 1];
    for d in dist {
        counts[d as usize] += 1;
    }
    // sum counts[d] 2^(max-d), Horner from d = 0
    let mut acc = BigUint::zero();
    for &c in &counts {
        acc <<= 1u32;
        acc += c;
    }
    Ok(Dyadic::new(acc, max as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::{parse_word, random_skeleton, RandomSkeletonConfig};
    use num_rational::BigRational;
    use num_traits::One;

    fn sk(words: &[&str]) -> ToeplitzSkeleton {
        ToeplitzSkeleton::new(
            "ab",
            words.iter().map(|w| parse_word("ab", w).unwrap()).collect(),
        )
        .unwrap()
    }

    // sum of 2^-d over j with d by direct minimum over hole copies
    fn diameter_oracle(word: &[u32]) -> BigRational {
        let n = word.len() as i64;
        let holes: Vec<i64> = (0..n).filter(|&j| word[j as usize] == HOLE).collect();
        let mut total = BigRational::zero();
        if holes.is_empty() {
            return total;
        }
        for j in 0..n {
            let d = holes
                .iter()
                .flat_map(|&h| [h - n, h, h + n])
                .map(|h| (j - h).abs())
                .min()
                .unwrap();
            total += BigRational::one()
                / BigRational::from_integer(num_bigint::BigInt::from(2).pow(d as u32));
        }
        total
    }

    fn to_rational(d: &Dyadic) -> BigRational {
        BigRational::new(
            d.numerator().clone().into(),
            num_bigint::BigInt::from(2).pow(d.exponent() as u32),
        )
    }

    #[test]
    fn report_counts() {
        let r = hole_report(&sk(&["ab?"]), None, 0.5);
        assert_eq!(r.stages[0].holes, 1);
        assert!((r.stages[0].density - 1.0 / 3.0).abs() < 1e-15);
        let r = hole_report(&sk(&["ab", "abab"]), Some(&PolynomialSpec::square()), 0.5);
        assert!(r.stages.iter().all(|s| s.holes == 0));
        assert!(r.regular && r.phi_small && r.rho_small == Some(true));
        let r = hole_report(&sk(&["??", "a??b"]), None, 0.1);
        assert!(!r.regular);
    }

    #[test]
    fn diameter_examples() {
        let d = tower_diameter(&sk(&["?aaa"]), 0).unwrap();
        assert_eq!(d.to_string(), "9/2^2");
        assert_eq!(d.to_f64(), 2.25);
        assert_eq!(tower_diameter(&sk(&["abab"]), 0).unwrap().to_string(), "0");
        assert_eq!(tower_diameter(&sk(&["?"]), 0).unwrap().to_string(), "1");
        assert!(tower_diameter(&sk(&["ab"]), 3).is_err());
    }

    #[test]
    fn diameter_matches_oracle_and_sandwich() {
        for seed in 0..100 {
            let s = random_skeleton(seed, &RandomSkeletonConfig::default());
            for (t, stage) in s.stages().iter().enumerate() {
                let d = tower_diameter(&s, t).unwrap();
                assert_eq!(
                    to_rational(&d),
                    diameter_oracle(&stage.word),
                    "seed {seed} t {t}"
                );
                let h = stage.hole_count();
                assert!(d.cmp_integer(h) != Ordering::Less);
                assert!(d.cmp_integer(3 * h) != Ordering::Greater);
            }
        }
    }

    #[test]
    fn density_non_increasing_on_random_skeletons() {
        for seed in 0..100 {
            let s = random_skeleton(seed, &RandomSkeletonConfig::default());
            let r = hole_report(&s, None, 1.0);
            for w in r.stages.windows(2) {
                assert!(w[1].holes * w[0].period <= w[0].holes * w[1].period);
            }
        }
    }
}
