//! Semiprime counts over a prime table.
//!
//! Two normalizations are exposed. [`SemiprimeMode::SmallFactorPairs`] counts ordered
//! pairs `(p1, p2)` with `p1 <= sqrt(N)` and `p2 <= N / p1`, i.e.
//! `pi_2(N) = sum_{p1 <= sqrt N} pi(N / p1)`; products whose two factors are
//! both below `sqrt(N)` are seen twice. [`SemiprimeMode::Distinct`] counts each
//! value `p1 * p2 <= N` once (`p1 <= p2`).

use serde::{Deserialize, Serialize};

use super::factor::factorize;
use super::sieve::{isqrt, PrimeTable};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SemiprimeMode {
    #[default]
    SmallFactorPairs,
    Distinct,
}

impl PrimeTable {
    /// Visits every semiprime pair `(p1, p2)` with `p1 * p2 <= n` under `mode`,
    /// in increasing `p1` then increasing `p2`.
    pub fn for_each_semiprime_pair<F: FnMut(u64, u64)>(
        &self,
        n: u64,
        mode: SemiprimeMode,
        mut f: F,
    ) -> Result<()> {
        self.check("N", n)?;
        let root = isqrt(n);
        for p1 in self.primes_up_to(root) {
            let lo = match mode {
                SemiprimeMode::SmallFactorPairs => 2,
                SemiprimeMode::Distinct => p1,
            };
            for p2 in self.primes_in(lo, n / p1) {
                f(p1, p2);
            }
        }
        Ok(())
    }

    /// pi_2(N) under `mode`.
    pub fn semiprime_pi(&self, n: u64, mode: SemiprimeMode) -> Result<u64> {
        self.check("N", n)?;
        let mut total = 0u64;
        for p1 in self.primes_up_to(isqrt(n)) {
            let c = self.pi_unchecked(n / p1);
            total += match mode {
                SemiprimeMode::SmallFactorPairs => c,
                SemiprimeMode::Distinct => c - self.pi_unchecked(p1) + 1,
            };
        }
        Ok(total)
    }

    /// Semiprime pairs with `p1 * p2 = a mod m`, normalized as `mode`.
    pub fn semiprime_pi_ap(&self, n: u64, m: u64, a: i64, mode: SemiprimeMode) -> Result<u64> {
        if m == 0 {
            return Err(Error::Precondition("modulus must be >= 1".into()));
        }
        let target = a.rem_euclid(m as i64) as u64;
        let mut count = 0u64;
        self.for_each_semiprime_pair(n, mode, |p1, p2| {
            if (p1 % m) * (p2 % m) % m == target {
                count += 1;
            }
        })?;
        Ok(count)
    }

    /// Semiprimes `<= N` sharing a prime factor with `modulus`.
    ///
    /// Uses `pi` lookups: a pair shares a factor iff `p1 | modulus` or
    /// `p2 | modulus`, so only the prime divisors of `modulus` need scanning.
    pub fn semiprime_noncoprime_count(
        &self,
        n: u64,
        modulus: u64,
        mode: SemiprimeMode,
    ) -> Result<u64> {
        self.check("N", n)?;
        if modulus == 0 {
            return Err(Error::Precondition("modulus must be >= 1".into()));
        }
        let divisors: Vec<u64> = factorize(modulus).primes().collect();
        let mut total = 0u64;
        for p1 in self.primes_up_to(isqrt(n)) {
            let hi = n / p1;
            let lo = match mode {
                SemiprimeMode::SmallFactorPairs => 2,
                SemiprimeMode::Distinct => p1,
            };
            if modulus % p1 == 0 {
                total += self.pi_unchecked(hi) - self.pi_unchecked(lo - 1);
            } else {
                total += divisors.iter().filter(|&&q| q >= lo && q <= hi).count() as u64;
            }
        }
        Ok(total)
    }

    /// Distinct semiprimes `<= n` in each residue class mod `modulus`.
    pub fn semiprime_residue_histogram(&self, n: u64, modulus: u64) -> Result<Vec<u64>> {
        let mut hist = vec![0u64; modulus as usize];
        self.for_each_semiprime_pair(n, SemiprimeMode::Distinct, |p1, p2| {
            hist[((p1 % modulus) * (p2 % modulus) % modulus) as usize] += 1;
        })?;
        Ok(hist)
    }
}
