use serde::{Deserialize, Serialize};

/// Canonical factorization: `(prime, exponent)` pairs with strictly
/// increasing primes and exponents at least one. The empty list is `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    pub prime_powers: Vec<(u64, u32)>,
}

impl Factorization {
    /// omega(n): number of distinct prime divisors.
    pub fn omega(&self) -> u32 {
        self.prime_powers.len() as u32
    }

    /// Product of the distinct prime divisors (the radical).
    pub fn radical(&self) -> u64 {
        self.prime_powers.iter().map(|&(p, _)| p).product()
    }

    pub fn value(&self) -> u64 {
        self.prime_powers.iter().map(|&(p, e)| p.pow(e)).product()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.prime_powers.iter().map(|&(p, _)| p)
    }

    /// Prime-power components `p^e`.
    pub fn components(&self) -> impl Iterator<Item = u64> + '_ {
        self.prime_powers.iter().map(|&(p, e)| p.pow(e))
    }

    pub fn is_square_free(&self) -> bool {
        self.prime_powers.iter().all(|&(_, e)| e == 1)
    }

    pub fn phi(&self) -> u64 {
        self.prime_powers
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }
}

/// Trial-division factorization.
pub fn factorize(mut n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        push(d, &mut n);
        d += 2;
    }
    if n > 1 {
        out.push((n, 1));
    }
    Factorization { prime_powers: out }
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n).phi()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Inverse of `a` modulo `m` (`m >= 1`), if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Combines `x = a1 mod m1`, `x = a2 mod m2` for coprime moduli into the
/// unique residue mod `m1 * m2`.
pub fn crt_pair(a1: u64, m1: u64, a2: u64, m2: u64) -> u64 {
    let inv = mod_inverse(m1 % m2, m2).expect("crt_pair: moduli must be coprime");
    let m = m1 as u128 * m2 as u128;
    // x = a1 + m1 * ((a2 - a1) * inv mod m2)
    let diff = (a2 as i128 - a1 as i128).rem_euclid(m2 as i128) as u128;
    let k = diff * inv as u128 % m2 as u128;
    ((a1 as u128 + m1 as u128 * k) % m) as u64
}

/// Whether `n` is a perfect square.
pub fn is_square(n: u64) -> bool {
    let r = super::isqrt(n);
    r * r == n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi_brute(n: u64) -> u64 {
        (0..n).filter(|&a| gcd(a, n) == 1).count() as u64
    }

    #[test]
    fn factorize_examples() {
        let f = factorize(1);
        assert!(f.prime_powers.is_empty());
        assert_eq!((f.omega(), f.radical()), (0, 1));
        let f = factorize(360);
        assert_eq!(f.prime_powers, vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!((f.omega(), f.radical()), (3, 30));
        assert_eq!(factorize(97).prime_powers, vec![(97, 1)]);
    }

    #[test]
    fn factorization_reconstructs() {
        for n in 1..5000u64 {
            let f = factorize(n);
            assert_eq!(f.value(), n);
            assert!(f.prime_powers.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.prime_powers.iter().all(|&(_, e)| e >= 1));
        }
    }

    #[test]
    fn phi_examples_and_brute() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(30), 8);
        for n in 1..600 {
            assert_eq!(euler_phi(n), phi_brute(n), "n={n}");
        }
    }

    #[test]
    fn crt_and_inverse() {
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
        for m1 in 1..20u64 {
            for m2 in 1..20u64 {
                if gcd(m1, m2) != 1 {
                    continue;
                }
                for a1 in 0..m1 {
                    for a2 in 0..m2 {
                        let x = crt_pair(a1, m1, a2, m2);
                        assert!(x < m1 * m2);
                        assert_eq!((x % m1, x % m2), (a1, a2));
                    }
                }
            }
        }
    }
}
