//! Segmented sieve of Eratosthenes with bit-packed storage.
//!
//! The table keeps one bit per integer in `[0, limit]` plus a running
//! popcount per 64-bit word, so `pi(N)` is a lookup and a single popcount.
//! Segments are sieved independently (in parallel) and concatenated in
//! ascending order, which keeps the result independent of thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 20;
pub const DEFAULT_MEMORY_BUDGET: u64 = 512 << 20;
/// Environment variable overriding the memory budget, in bytes.
pub const MEMORY_BUDGET_ENV: &str = "TPNT_MEMORY_BUDGET";

// Bits at odd positions set: the initial state of a segment before odd primes
// are struck out. Segments start at multiples of 64, so parity lines up.
const ODD_MASK: u64 = 0xAAAA_AAAA_AAAA_AAAA;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveConfig {
    /// Values per segment; rounded up to a multiple of 64.
    pub segment_size: u64,
    /// Upper bound on resident table bytes.
    pub memory_budget: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            segment_size: DEFAULT_SEGMENT_SIZE,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

impl SieveConfig {
    /// Default configuration with the memory budget taken from
    /// `TPNT_MEMORY_BUDGET` when it is set and parses.
    pub fn from_env() -> Self {
        let mut cfg = SieveConfig::default();
        if let Some(b) = std::env::var(MEMORY_BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
        {
            cfg.memory_budget = b;
        }
        cfg
    }

    /// Bytes a table up to `limit` occupies (bits plus per-word prefix counts).
    pub fn table_bytes(limit: u64) -> u64 {
        let words = limit / 64 + 1;
        words * 8 + words * 4
    }
}

/// Immutable primality table for `0..=limit`.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    limit: u64,
    segment_size: u64,
    bits: Vec<u64>,
    // prefix[w] = number of primes among indices < 64 * w
    prefix: Vec<u32>,
}

impl PrimeTable {
    /// Sieve `0..=limit` with the environment-derived configuration.
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_config(limit, &SieveConfig::from_env())
    }

    pub fn with_config(limit: u64, cfg: &SieveConfig) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Precondition(format!(
                "sieve limit must be at least 2, got {limit}"
            )));
        }
        let needed = SieveConfig::table_bytes(limit);
        if needed > cfg.memory_budget {
            return Err(Error::Resource {
                what: format!("prime table up to {limit}"),
                needed,
                budget: cfg.memory_budget,
            });
        }
        if limit / 64 >= u32::MAX as u64 {
            return Err(Error::Overflow("prime table prefix counts"));
        }
        let seg = cfg.segment_size.max(64).div_ceil(64) * 64;
        let base = small_primes(isqrt(limit));
        let nseg = (limit + 1).div_ceil(seg);
        let words_total = (limit / 64 + 1) as usize;

        let segments: Vec<Vec<u64>> = (0..nseg)
            .into_par_iter()
            .map(|s| sieve_segment(s * seg, ((s + 1) * seg).min(limit + 1), &base))
            .collect();

        let mut bits = Vec::with_capacity(words_total);
        for s in segments {
            bits.extend(s);
        }
        bits.truncate(words_total);
        // clear bits past `limit` in the last word
        let tail = (limit % 64) + 1;
        if tail < 64 {
            let last = bits.len() - 1;
            bits[last] &= (1u64 << tail) - 1;
        }

        let mut prefix = Vec::with_capacity(words_total + 1);
        let mut acc = 0u32;
        prefix.push(0);
        for w in &bits {
            acc += w.count_ones();
            prefix.push(acc);
        }

        Ok(PrimeTable {
            limit,
            segment_size: seg,
            bits,
            prefix,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn segment_size(&self) -> u64 {
        self.segment_size
    }

    /// Primality of `n`; `n` must not exceed the limit.
    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(
            n <= self.limit,
            "is_prime({n}) beyond sieve limit {}",
            self.limit
        );
        (self.bits[(n >> 6) as usize] >> (n & 63)) & 1 == 1
    }

    /// Number of set bits in the whole table, i.e. pi(limit).
    pub fn count(&self) -> u64 {
        *self.prefix.last().unwrap() as u64
    }

    pub(crate) fn check(&self, what: &'static str, n: u64) -> Result<()> {
        if n > self.limit {
            Err(Error::OutOfRange {
                what,
                value: n,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    #[inline]
    pub(crate) fn pi_unchecked(&self, n: u64) -> u64 {
        let w = (n >> 6) as usize;
        let b = n & 63;
        let mask = if b == 63 {
            u64::MAX
        } else {
            (1u64 << (b + 1)) - 1
        };
        self.prefix[w] as u64 + (self.bits[w] & mask).count_ones() as u64
    }

    /// `#{p <= n : p prime}`.
    pub fn prime_pi(&self, n: u64) -> Result<u64> {
        self.check("N", n)?;
        Ok(self.pi_unchecked(n))
    }

    /// `#{p <= n : p = a mod modulus}`; `a` is reduced modulo `modulus`.
    pub fn prime_pi_ap(&self, n: u64, modulus: u64, a: i64) -> Result<u64> {
        self.check("N", n)?;
        if modulus == 0 {
            return Err(Error::Precondition("modulus must be >= 1".into()));
        }
        let target = a.rem_euclid(modulus as i64) as u64;
        Ok(self
            .primes_up_to(n)
            .filter(|p| p % modulus == target)
            .count() as u64)
    }

    /// Counts of primes `<= n` in every residue class mod `modulus`.
    pub fn residue_histogram(&self, n: u64, modulus: u64) -> Result<Vec<u64>> {
        self.check("N", n)?;
        if modulus == 0 {
            return Err(Error::Precondition("modulus must be >= 1".into()));
        }
        let mut hist = vec![0u64; modulus as usize];
        for p in self.primes_up_to(n) {
            hist[(p % modulus) as usize] += 1;
        }
        Ok(hist)
    }

    /// Primes `<= n` in increasing order (`n` is clamped to the limit).
    pub fn primes_up_to(&self, n: u64) -> Primes<'_> {
        let end = n.min(self.limit);
        Primes {
            bits: &self.bits,
            word: 0,
            cur: self.bits[0],
            end,
        }
    }

    /// All primes in the table.
    pub fn primes(&self) -> Primes<'_> {
        self.primes_up_to(self.limit)
    }

    /// Primes in `[lo, hi]`, both clamped to the table.
    pub fn primes_in(&self, lo: u64, hi: u64) -> Primes<'_> {
        let end = hi.min(self.limit);
        let w = (lo >> 6) as usize;
        let cur = if w < self.bits.len() {
            self.bits[w] & (u64::MAX << (lo & 63))
        } else {
            0
        };
        Primes {
            bits: &self.bits,
            word: w,
            cur,
            end: if lo > end { 0 } else { end },
        }
        .skip_if_empty(lo > end)
    }
}

/// Iterator over set bits of a prime table.
pub struct Primes<'a> {
    bits: &'a [u64],
    word: usize,
    cur: u64,
    end: u64,
}

impl Primes<'_> {
    fn skip_if_empty(mut self, empty: bool) -> Self {
        if empty {
            self.word = self.bits.len();
            self.cur = 0;
        }
        self
    }
}

impl Iterator for Primes<'_> {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        loop {
            if self.cur != 0 {
                let b = self.cur.trailing_zeros() as u64;
                let v = ((self.word as u64) << 6) | b;
                if v > self.end {
                    self.cur = 0;
                    self.word = self.bits.len();
                    return None;
                }
                self.cur &= self.cur - 1;
                return Some(v);
            }
            self.word += 1;
            if self.word >= self.bits.len() || ((self.word as u64) << 6) > self.end {
                self.word = self.bits.len();
                return None;
            }
            self.cur = self.bits[self.word];
        }
    }
}

fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    let len = hi - lo;
    let nwords = len.div_ceil(64) as usize;
    let mut words = vec![ODD_MASK; nwords];
    if lo == 0 {
        // 1 is not prime, 2 is
        words[0] &= !0b10;
        words[0] |= 0b100;
    }
    for &p in base.iter().skip(1) {
        let pp = p * p;
        if pp >= hi {
            break;
        }
        let mut start = if pp >= lo { pp } else { lo.div_ceil(p) * p };
        if start % 2 == 0 {
            start += p;
        }
        let step = 2 * p;
        let mut m = start;
        while m < hi {
            let off = m - lo;
            words[(off >> 6) as usize] &= !(1u64 << (off & 63));
            m += step;
        }
    }
    words
}

/// Primes `<= n` by a plain sieve; used for the base primes of a segmented run.
pub fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Integer square root: the largest `r` with `r*r <= n`.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}
