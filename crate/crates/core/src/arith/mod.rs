//! Primes, semiprimes and elementary arithmetic functions.

mod factor;
mod semiprime;
mod sieve;

pub use factor::{crt_pair, euler_phi, factorize, gcd, is_square, mod_inverse, Factorization};
pub use semiprime::SemiprimeMode;
pub use sieve::{
    isqrt, small_primes, PrimeTable, Primes, SieveConfig, DEFAULT_MEMORY_BUDGET,
    DEFAULT_SEGMENT_SIZE, MEMORY_BUDGET_ENV,
};

/// Sieves `0..=limit` with the default (environment-aware) configuration.
pub fn sieve(limit: u64) -> crate::Result<PrimeTable> {
    PrimeTable::new(limit)
}
