use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::poly::PolynomialSpec;
use crate::arith::{factorize, gcd, mod_inverse};
use crate::error::{Error, Result};

/// Hit counts of `P(m) mod n` for `m` in `[1, n]`.
///
/// `counts[a]` is rho(n, a); the attainable set R_n is the support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueProfile {
    modulus: u64,
    counts: Vec<u64>,
}

impl ResidueProfile {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// rho(n, a), with `a` reduced mod n first.
    pub fn rho(&self, a: i64) -> u64 {
        self.counts[a.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn contains(&self, a: i64) -> bool {
        self.rho(a) > 0
    }

    /// R_n in increasing order.
    pub fn attainable(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(a, _)| a as u64)
    }

    /// psi(n) = #R_n.
    pub fn psi(&self) -> u64 {
        self.counts.iter().filter(|&&c| c > 0).count() as u64
    }

    /// rho(n) = max_a rho(n, a).
    pub fn rho_max(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }
}

/// Profile by direct enumeration of `P(m) mod n`, `1 <= m <= n`.
pub fn residue_profile_brute(p: &PolynomialSpec, n: u64) -> ResidueProfile {
    assert!(n >= 1, "modulus must be >= 1");
    let mut counts = vec![0u64; n as usize];
    for m in 1..=n {
        counts[p.eval_mod(m, n) as usize] += 1;
    }
    ResidueProfile { modulus: n, counts }
}

/// Profile via brute force on each prime-power component of `n`, combined
/// by CRT.
pub fn residue_profile(p: &PolynomialSpec, n: u64) -> ResidueProfile {
    assert!(n >= 1, "modulus must be >= 1");
    let parts: Vec<ResidueProfile> = factorize(n)
        .components()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&q| residue_profile_brute(p, q))
        .collect();
    crt_compose(&parts).expect("prime-power components are coprime")
}

/// Combines profiles over pairwise coprime moduli into the profile over their
/// product: counts multiply along the CRT bijection.
pub fn crt_compose(profiles: &[ResidueProfile]) -> Result<ResidueProfile> {
    for (i, a) in profiles.iter().enumerate() {
        for b in &profiles[i + 1..] {
            if gcd(a.modulus, b.modulus) != 1 {
                return Err(Error::Contract(format!(
                    "crt_compose needs pairwise coprime moduli, got {} and {}",
                    a.modulus, b.modulus
                )));
            }
        }
    }
    let mut acc = ResidueProfile {
        modulus: 1,
        counts: vec![1],
    };
    for p in profiles {
        acc = compose_pair(&acc, p)?;
    }
    Ok(acc)
}

fn compose_pair(a: &ResidueProfile, b: &ResidueProfile) -> Result<ResidueProfile> {
    let (n1, n2) = (a.modulus, b.modulus);
    let n = n1
        .checked_mul(n2)
        .ok_or(Error::Overflow("crt_compose modulus"))?;
    if n > usize::MAX as u64 / 8 {
        return Err(Error::Overflow("crt_compose modulus"));
    }
    // e1 = 1 mod n1, 0 mod n2; e2 = 0 mod n1, 1 mod n2
    let e1 = n2 as u128 * mod_inverse(n2 % n1, n1).unwrap_or(0) as u128 % n as u128;
    let e2 = n1 as u128 * mod_inverse(n1 % n2, n2).unwrap_or(0) as u128 % n as u128;
    let mut counts = vec![0u64; n as usize];
    let rb: Vec<(u64, u64)> = b.attainable().map(|r| (r, b.counts[r as usize])).collect();
    for ra in a.attainable() {
        let ca = a.counts[ra as usize];
        let base = ra as u128 * e1 % n as u128;
        for &(r, cb) in &rb {
            let x = (base + r as u128 * e2) % n as u128;
            counts[x as usize] = ca * cb;
        }
    }
    Ok(ResidueProfile { modulus: n, counts })
}

/// rho(N; n, a) = #{1 <= m <= N : P(m) = a mod n}, by walking one period of
/// residues `r` and counting the `m = r + j n <= N`.
pub fn rho_count(p: &PolynomialSpec, big_n: u64, n: u64, a: i64) -> u64 {
    assert!(n >= 1, "modulus must be >= 1");
    let target = a.rem_euclid(n as i64) as u64;
    (1..=n.min(big_n))
        .filter(|&r| p.eval_mod(r, n) == target)
        .map(|r| (big_n - r) / n + 1)
        .sum()
}

/// rho(n) for every `0 <= n <= limit` (index 0 and 1 hold 1), from the
/// prime-power maxima by multiplicativity.
pub fn rho_max_table(p: &PolynomialSpec, limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    // smallest prime factor sieve
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let prime_powers: Vec<usize> = (2..=limit)
        .filter(|&q| {
            let s = spf[q] as usize;
            let mut r = q;
            while r % s == 0 {
                r /= s;
            }
            r == 1
        })
        .collect();
    let maxima: Vec<(usize, u64)> = prime_powers
        .par_iter()
        .map(|&q| (q, residue_profile_brute(p, q as u64).rho_max()))
        .collect();
    let mut table = vec![0u64; limit + 1];
    table[0] = 1;
    if limit >= 1 {
        table[1] = 1;
    }
    for (q, m) in maxima {
        table[q] = m;
    }
    for n in 2..=limit {
        if table[n] != 0 {
            continue;
        }
        let s = spf[n] as usize;
        let mut q = 1;
        let mut r = n;
        while r % s == 0 {
            r /= s;
            q *= s;
        }
        table[n] = table[q] * table[r];
    }
    table
}

/// rho^P(n) <= d^omega(n) * n / rad(n).
pub fn albis_bound_check(p: &PolynomialSpec, n: u64) -> bool {
    let f = factorize(n);
    let rho = residue_profile(p, n).rho_max() as u128;
    let d_omega = (p.degree() as u128).pow(f.omega());
    rho * f.radical() as u128 <= d_omega * n as u128
}

/// Interval sandwich for the number of polynomial values `<= N` in a residue
/// class: `rho(n,a)(M/n - 1) <= count <= rho(n,a)(M/n + 1)` with `M = P^-1(N)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalBounds {
    pub rho: u64,
    pub inverse: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub lower: Ratio<i128>,
    #[serde(serialize_with = "ser_ratio")]
    pub upper: Ratio<i128>,
    pub actual: u64,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<i128>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

impl IntervalBounds {
    pub fn holds(&self) -> bool {
        let actual = Ratio::from_integer(self.actual as i128);
        self.lower <= actual && actual <= self.upper
    }
}

pub fn interval_count_bounds(
    p: &PolynomialSpec,
    n: u64,
    a: i64,
    big_n: u64,
) -> Result<IntervalBounds> {
    if n == 0 {
        return Err(Error::Precondition("modulus must be >= 1".into()));
    }
    let p_n = p.eval(n).ok_or(Error::Overflow("P(n)"))?;
    if big_n < p_n {
        return Err(Error::Precondition(format!("N = {big_n} < P(n) = {p_n}")));
    }
    let rho = residue_profile(p, n).rho(a);
    if rho == 0 {
        return Err(Error::Contract(format!(
            "{a} is not attained by {p} mod {n}"
        )));
    }
    let inverse = p.inverse_floor(big_n)?;
    let frac = Ratio::new(inverse as i128, n as i128);
    let r = Ratio::from_integer(rho as i128);
    Ok(IntervalBounds {
        rho,
        inverse,
        lower: r * (frac - 1),
        upper: r * (frac + 1),
        actual: rho_count(p, inverse, n, a),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn family() -> Vec<PolynomialSpec> {
        vec![
            PolynomialSpec::square(),
            "m^2+m".parse().unwrap(),
            "m^3+2m+1".parse().unwrap(),
        ]
    }

    // direct count over m = 1..=N
    fn rho_count_brute(p: &PolynomialSpec, big_n: u64, n: u64, a: u64) -> u64 {
        (1..=big_n).filter(|&m| p.eval_mod(m, n) == a % n).count() as u64
    }

    #[test]
    fn profile_examples() {
        let sq = PolynomialSpec::square();
        let p5 = residue_profile(&sq, 5);
        assert_eq!(p5.attainable().collect::<Vec<_>>(), vec![0, 1, 4]);
        assert_eq!(p5.psi(), 3);
        let p1 = residue_profile(&sq, 1);
        assert_eq!(p1.attainable().collect::<Vec<_>>(), vec![0]);
        assert_eq!(p1.psi(), 1);
        let p4 = residue_profile(&sq, 4);
        assert!(p4.attainable().all(|a| p4.rho(a as i64) == 2));
        assert_eq!(p4.rho(-3), 2);
        assert!(!p4.contains(2));
    }

    #[test]
    fn profile_invariants() {
        for p in family() {
            for n in 1..300 {
                let prof = residue_profile(&p, n);
                assert_eq!(prof.counts().iter().sum::<u64>(), n);
                assert_eq!(prof.psi(), prof.attainable().count() as u64);
                assert_eq!(
                    prof.rho_max(),
                    prof.attainable().map(|a| prof.rho(a as i64)).max().unwrap()
                );
            }
        }
    }

    #[test]
    fn crt_matches_brute_force() {
        for p in family() {
            for n in 1..=2000 {
                assert_eq!(
                    residue_profile(&p, n),
                    residue_profile_brute(&p, n),
                    "P={p}, n={n}"
                );
            }
        }
    }

    #[test]
    fn crt_compose_examples() {
        let sq = PolynomialSpec::square();
        let c =
            crt_compose(&[residue_profile_brute(&sq, 4), residue_profile_brute(&sq, 9)]).unwrap();
        assert_eq!(c.psi(), 8);
        assert_eq!(c, residue_profile_brute(&sq, 36));
        let single = residue_profile_brute(&sq, 10);
        assert_eq!(crt_compose(std::slice::from_ref(&single)).unwrap(), single);
        let cubic: PolynomialSpec = "m^3+2m+1".parse().unwrap();
        let c = crt_compose(&[
            residue_profile_brute(&cubic, 5),
            residue_profile_brute(&cubic, 7),
        ])
        .unwrap();
        assert_eq!(c, residue_profile_brute(&cubic, 35));
        let err = crt_compose(&[residue_profile_brute(&sq, 4), residue_profile_brute(&sq, 6)]);
        assert!(matches!(err, Err(Error::Contract(_))));
    }

    #[test]
    fn rho_count_examples() {
        let sq = PolynomialSpec::square();
        assert_eq!(rho_count(&sq, 9, 9, 0), 3);
        assert_eq!(rho_count(&sq, 9, 9, 1), 2);
        assert_eq!(rho_count(&sq, 9, 9, 2), 0);
        for p in family() {
            for n in 1..25 {
                for big_n in [1, 7, 24, 100, 333] {
                    for a in 0..n {
                        assert_eq!(
                            rho_count(&p, big_n, n, a as i64),
                            rho_count_brute(&p, big_n, n, a)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn rho_max_table_matches_profiles() {
        for p in family() {
            let t = rho_max_table(&p, 3000);
            for n in 1..=3000u64 {
                assert_eq!(
                    t[n as usize],
                    residue_profile_brute(&p, n).rho_max(),
                    "P={p} n={n}"
                );
            }
        }
    }

    #[test]
    fn albis_examples() {
        let sq = PolynomialSpec::square();
        assert_eq!(residue_profile(&sq, 9).rho_max(), 3);
        assert!(albis_bound_check(&sq, 9));
        assert!(albis_bound_check(&sq, 2));
        let cubic: PolynomialSpec = "m^3+2m+1".parse().unwrap();
        assert!((2..2000).all(|n| albis_bound_check(&cubic, n)));
    }

    #[test]
    fn interval_examples() {
        let sq = PolynomialSpec::square();
        let b = interval_count_bounds(&sq, 5, 1, 100).unwrap();
        assert_eq!(
            (b.lower, b.upper, b.actual),
            (Ratio::from_integer(2), Ratio::from_integer(6), 4)
        );
        let b = interval_count_bounds(&sq, 5, 0, 25).unwrap();
        assert_eq!(b.inverse, 5);
        assert_eq!(
            (b.lower, b.upper, b.actual),
            (Ratio::from_integer(0), Ratio::from_integer(2), 1)
        );
        assert!(matches!(
            interval_count_bounds(&sq, 5, 2, 100),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            interval_count_bounds(&sq, 5, 1, 24),
            Err(Error::Precondition(_))
        ));
    }

    proptest! {
        #[test]
        fn interval_sandwich(which in 0usize..3, n in 1u64..200, seed in any::<u64>(), extra in 0u64..100_000) {
            let p = &family()[which];
            let prof = residue_profile(p, n);
            let attained: Vec<u64> = prof.attainable().collect();
            let a = attained[(seed % attained.len() as u64) as usize];
            let big_n = p.eval(n).unwrap() + extra;
            let b = interval_count_bounds(p, n, a as i64, big_n).unwrap();
            prop_assert!(b.holds());
            let m = b.inverse;
            prop_assert_eq!(b.actual, (1..=m).filter(|&k| p.eval(k).unwrap() % n == a).count() as u64);
        }

        #[test]
        fn rho_count_near_linear(which in 0usize..3, n in 1u64..300, big_n in 1u64..5000, seed in any::<u64>()) {
            let p = &family()[which];
            let prof = residue_profile(p, n);
            let attained: Vec<u64> = prof.attainable().collect();
            let a = attained[(seed % attained.len() as u64) as usize];
            let rho = prof.rho(a as i64) as i128;
            let c = rho_count(p, big_n, n, a as i64) as i128;
            // |c - rho N / n| <= rho, scaled by n
            prop_assert!((c * n as i128 - rho * big_n as i128).abs() <= rho * n as i128);
        }

        #[test]
        fn psi_multiplicative(which in 0usize..3, a in 1u64..1000, b in 1u64..1000) {
            prop_assume!(gcd(a, b) == 1);
            let p = &family()[which];
            prop_assert_eq!(
                residue_profile(p, a * b).psi(),
                residue_profile(p, a).psi() * residue_profile(p, b).psi()
            );
        }
    }
}
