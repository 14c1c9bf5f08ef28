//! Closed forms for `P(m) = m^2` modulo prime powers, and the refined residue
//! sets R~_n whose hit counts stay within a factor two of `2^omega(n)`.

use serde::Serialize;

use super::poly::PolynomialSpec;
use super::profile::{residue_profile, residue_profile_brute, ResidueProfile};
use crate::arith::{factorize, mod_inverse};
use crate::error::{Error, Result};

fn check_prime(p: u64) -> Result<()> {
    let f = factorize(p.max(1));
    if p < 2 || f.prime_powers != [(p, 1)] {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    Ok(())
}

fn prime_power(p: u64, e: u32) -> Result<u64> {
    if e == 0 {
        return Err(Error::Precondition("exponent must be >= 1".into()));
    }
    p.checked_pow(e).ok_or(Error::Overflow("p^e"))
}

/// Nonzero squares mod an odd prime, by Euler's criterion.
fn is_nonzero_qr(a: u64, p: u64) -> bool {
    let a = a % p;
    a != 0 && pow_mod(a, (p - 1) / 2, p) == 1
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let (mut r, mut b) = (1 % m, b as u128 % m);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r as u64
}

/// rho(p^e, a) for squares, by case analysis on `a = p^(2r) a'`.
pub fn square_rho_closed(p: u64, e: u32, a: u64) -> Result<u64> {
    check_prime(p)?;
    let q = prime_power(p, e)?;
    let a = a % q;
    let half = e / 2;
    let unattained = || Err(Error::Contract(format!("{a} is not a square mod {p}^{e}")));
    if a == 0 {
        return Ok(p.pow(half));
    }
    let mut v = 0u32;
    let mut unit = a;
    while unit % p == 0 {
        unit /= p;
        v += 1;
    }
    if v % 2 == 1 {
        return unattained();
    }
    let r = v / 2;
    if p > 2 {
        return if is_nonzero_qr(unit, p) {
            Ok(2 * p.pow(r))
        } else {
            unattained()
        };
    }
    match e {
        1 => Ok(1),
        2 => {
            if a == 1 {
                Ok(2)
            } else {
                unattained()
            }
        }
        _ => {
            let two_r = 2 * r;
            if two_r + 3 <= e {
                if unit % 8 == 1 {
                    Ok(4 << r)
                } else {
                    unattained()
                }
            } else if two_r + 2 == e {
                if unit % 4 == 1 {
                    Ok(2 << r)
                } else {
                    unattained()
                }
            } else {
                // 2r = e - 1, unit odd
                Ok(1 << r)
            }
        }
    }
}

/// psi(p^e) = #{m^2 mod p^e}.
pub fn square_psi_closed(p: u64, e: u32) -> Result<u64> {
    check_prime(p)?;
    prime_power(p, e)?;
    let p128 = p as u128;
    let pw = |k: u32| -> Result<u128> {
        p128.checked_pow(k)
            .ok_or(Error::Overflow("psi closed form"))
    };
    let (num, den) = if p > 2 {
        let n = e / 2;
        if e % 2 == 1 {
            (pw(2 * n + 2)? + 2 * p128 + 1, 2 * (p128 + 1))
        } else {
            (pw(2 * n + 1)? + p128 + 2, 2 * (p128 + 1))
        }
    } else if e % 2 == 0 {
        (pw(e - 1)? + 4, 3)
    } else {
        (pw(e - 1)? + 5, 3)
    };
    if num % den != 0 {
        return Err(Error::Invariant(format!(
            "psi({p}^{e}) closed form is not integral"
        )));
    }
    u64::try_from(num / den).map_err(|_| Error::Overflow("psi closed form"))
}

/// The refined set R~_n with psi~(n) = #R~_n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TildeResidues {
    pub modulus: u64,
    pub residues: Vec<u64>,
    pub psi_tilde: u64,
}

fn tilde_prime_power(p: u64, e: u32) -> Vec<u64> {
    let q = p.pow(e);
    if p > 2 {
        (0..q).filter(|&a| is_nonzero_qr(a, p)).collect()
    } else if e <= 2 {
        // R_2 = R_4 = {0, 1}
        vec![0, 1]
    } else {
        (0..q).filter(|&a| a % 8 == 1).collect()
    }
}

/// R~_n for squares: CRT preimage of the prime-power sets.
pub fn tilde_residues(n: u64) -> TildeResidues {
    assert!(n >= 1, "modulus must be >= 1");
    let mut modulus = 1u64;
    let mut residues = vec![0u64];
    for &(p, e) in &factorize(n).prime_powers {
        let q = p.pow(e);
        let part = tilde_prime_power(p, e);
        let m = modulus * q;
        let e1 = q as u128 * mod_inverse(q % modulus, modulus).unwrap_or(0) as u128;
        let e2 = modulus as u128 * mod_inverse(modulus % q, q).unwrap() as u128;
        let mut next = Vec::with_capacity(residues.len() * part.len());
        for &x in &residues {
            for &y in &part {
                next.push(((x as u128 * e1 + y as u128 * e2) % m as u128) as u64);
            }
        }
        modulus = m;
        residues = next;
    }
    residues.sort_unstable();
    TildeResidues {
        modulus,
        psi_tilde: residues.len() as u64,
        residues,
    }
}

/// psi~(n) from the prime-power formula.
pub fn psi_tilde_closed(n: u64) -> u64 {
    factorize(n)
        .prime_powers
        .iter()
        .map(|&(p, e)| match (p, e) {
            (2, 1) | (2, 2) => 2,
            (2, e) => 1 << (e - 3),
            (p, e) => p.pow(e - 1) * (p - 1) / 2,
        })
        .product()
}

/// Checks `2^w / 2 <= rho(n, a) <= 2 * 2^w` on R~_n and
/// `(1/2) prod(1 - 1/p) <= 2^w psi~(n) / n <= 4 prod(1 - 1/p)`, `w = omega(n)`.
pub fn tilde_bounds_check(n: u64) -> bool {
    let profile = residue_profile(&PolynomialSpec::square(), n);
    tilde_bounds_check_with(n, &profile)
}

pub(crate) fn tilde_bounds_check_with(n: u64, profile: &ResidueProfile) -> bool {
    let f = factorize(n);
    let two_w = 1u128 << f.omega();
    let tilde = tilde_residues(n);
    let rho_ok = tilde.residues.iter().all(|&a| {
        let rho = profile.counts()[a as usize] as u128;
        two_w <= 2 * rho && rho <= 2 * two_w
    });
    // prod(1 - 1/p) = phi(rad) / rad
    let rad = f.radical() as u128;
    let phi_rad: u128 = f.primes().map(|p| p as u128 - 1).product();
    let lhs = two_w * tilde.psi_tilde as u128 * rad;
    let n = n as u128;
    rho_ok && phi_rad * n <= 2 * lhs && lhs <= 4 * phi_rad * n
}

/// Brute-force rho(p^e, a) table, for cross-checks.
pub fn square_profile_prime_power(p: u64, e: u32) -> ResidueProfile {
    residue_profile_brute(&PolynomialSpec::square(), p.pow(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_closed_examples() {
        assert_eq!(square_rho_closed(3, 2, 0).unwrap(), 3);
        assert_eq!(square_rho_closed(2, 1, 1).unwrap(), 1);
        assert_eq!(square_rho_closed(3, 4, 9).unwrap(), 6);
        assert!(matches!(
            square_rho_closed(3, 2, 2),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            square_rho_closed(4, 2, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn psi_closed_examples() {
        assert_eq!(square_psi_closed(3, 2).unwrap(), 4);
        assert_eq!(square_psi_closed(2, 3).unwrap(), 3);
        assert_eq!(square_psi_closed(2, 2).unwrap(), 2);
        assert_eq!(square_psi_closed(2, 1).unwrap(), 2);
    }

    #[test]
    fn closed_forms_match_enumeration() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let mut e = 1;
            while p.pow(e) <= 50_000 {
                let prof = square_profile_prime_power(p, e);
                assert_eq!(square_psi_closed(p, e).unwrap(), prof.psi(), "p={p} e={e}");
                for (a, &c) in prof.counts().iter().enumerate() {
                    let closed = square_rho_closed(p, e, a as u64);
                    if c == 0 {
                        assert!(closed.is_err(), "p={p} e={e} a={a}");
                    } else {
                        assert_eq!(closed.unwrap(), c, "p={p} e={e} a={a}");
                    }
                }
                e += 1;
            }
        }
    }

    #[test]
    fn tilde_examples() {
        let t3 = tilde_residues(3);
        assert_eq!((t3.residues.clone(), t3.psi_tilde), (vec![1], 1));
        assert_eq!(tilde_residues(2).psi_tilde, 2);
        assert_eq!(tilde_residues(12).psi_tilde, 2);
        assert_eq!(tilde_residues(1).residues, vec![0]);
    }

    #[test]
    fn tilde_is_subset_with_closed_count() {
        let sq = PolynomialSpec::square();
        for n in 1..=3000 {
            let t = tilde_residues(n);
            assert_eq!(t.psi_tilde, psi_tilde_closed(n), "n={n}");
            let prof = residue_profile(&sq, n);
            assert!(t.residues.iter().all(|&a| prof.contains(a as i64)));
            assert!(t.residues.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn tilde_bounds_examples() {
        let sq = PolynomialSpec::square();
        assert_eq!(residue_profile(&sq, 9).rho(1), 2);
        assert!(tilde_bounds_check(9));
        assert!(tilde_bounds_check(2));
        assert!((2..=2000).all(tilde_bounds_check));
    }
}
