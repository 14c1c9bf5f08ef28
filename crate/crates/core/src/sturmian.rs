//! Sturmian codings of a circle rotation along primes.
//!
//! Points of the circle are `u128` fractions of `2^128`, so rotation is
//! wrapping addition and `k alpha mod 1` is a wrapping multiply; the only
//! error is the rounding of `alpha` itself (below `2^-128` per step).

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::PrimeTable;
use crate::averaging::{AverageReport, ObservableSpec};
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

pub const FRACTION_BITS: u32 = 128;
/// Largest `|k|` accepted by [`code`]: accumulated rounding stays below
/// `2^-64`.
pub const MAX_TIME: u64 = 1 << 62;

const CHUNK: u64 = 1 << 20;

/// `floor(num * 2^128 / den)` for `0 <= num < den`.
pub fn fixed_from_ratio(num: u128, den: u128) -> Result<u128> {
    if den == 0 || num >= den {
        return Err(Error::Precondition(format!("{num}/{den} is not in [0, 1)")));
    }
    ((BigUint::from(num) << FRACTION_BITS) / BigUint::from(den))
        .to_u128()
        .ok_or(Error::Overflow("fixed-point fraction"))
}

/// Nearest fixed-point value of `x` in `[0, 1)` (53 significant bits).
pub fn fixed_from_f64(x: f64) -> Result<u128> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Precondition(format!("{x} is not in [0, 1)")));
    }
    Ok((x * 2f64.powi(64)) as u128 * (1u128 << 64))
}

pub fn fixed_to_f64(x: u128) -> f64 {
    (x >> 64) as f64 / 2f64.powi(64) + (x as u64) as f64 / 2f64.powi(128)
}

/// A convergent `p/q` of a continued fraction with its fixed-point value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    pub p: u128,
    pub q: u128,
    pub fixed: u128,
}

/// First convergent `F_(j-1)/F_j` of `(sqrt 5 - 1)/2` with `q > 2^min_bits`.
pub fn golden_convergent(min_bits: u32) -> Result<Convergent> {
    if min_bits >= 126 {
        return Err(Error::Overflow("golden convergent denominator"));
    }
    let (mut p, mut q) = (1u128, 1u128);
    while q >> min_bits == 0 {
        (p, q) = (q, p + q);
    }
    Ok(Convergent {
        p,
        q,
        fixed: fixed_from_ratio(p, q)?,
    })
}

/// Rotation by `alpha` on the circle coded by `A_0 = [0, beta)`,
/// `A_1 = [beta, 1)` from the start point `x0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationSpec {
    pub alpha: u128,
    pub beta: u128,
    pub x0: u128,
    /// The rational `alpha` stands for, when it is a convergent.
    pub convergent: Option<Convergent>,
}

impl RotationSpec {
    pub fn new(alpha: u128, beta: u128, x0: u128) -> Result<Self> {
        if beta == 0 {
            return Err(Error::Config("beta must lie in (0, 1)".into()));
        }
        Ok(RotationSpec {
            alpha,
            beta,
            x0,
            convergent: None,
        })
    }

    /// Golden-ratio convergent with denominator above `2^80`, `beta = alpha`,
    /// `x0 = 0`.
    pub fn golden() -> Self {
        let c = golden_convergent(80).expect("fits in u128");
        RotationSpec {
            alpha: c.fixed,
            beta: c.fixed,
            x0: 0,
            convergent: Some(c),
        }
    }

    /// Phase `x0 + k alpha mod 1`.
    #[inline]
    pub fn phase(&self, k: i64) -> u128 {
        self.x0
            .wrapping_add(self.alpha.wrapping_mul(k as i128 as u128))
    }

    /// Bound on `N |alpha_true - alpha|` for times up to `N`: the convergent
    /// error `1/q^2` plus the fixed-point rounding.
    pub fn surrogate_gap(&self, n: u64) -> f64 {
        let rounding = n as f64 * 2f64.powi(-(FRACTION_BITS as i32));
        match self.convergent {
            Some(c) => n as f64 / (c.q as f64 * c.q as f64) + rounding,
            None => rounding,
        }
    }
}

/// x(k) = 0 iff `T^k x0` lies in `A_0`.
pub fn code(spec: &RotationSpec, k: i64) -> Result<u32> {
    if k.unsigned_abs() > MAX_TIME {
        return Err(Error::Precondition(format!(
            "|k| = {} exceeds {MAX_TIME}",
            k.unsigned_abs()
        )));
    }
    Ok(bit(spec, spec.phase(k)))
}

#[inline]
fn bit(spec: &RotationSpec, phase: u128) -> u32 {
    (phase >= spec.beta) as u32
}

/// Window code of `x(k-m) .. x(k+m)`, `x(k-m)` most significant.
#[inline]
fn window_at(spec: &RotationSpec, k: u64, m: u32) -> u32 {
    let mut phase = spec
        .phase(k as i64)
        .wrapping_sub(spec.alpha.wrapping_mul(m as u128));
    let mut code = 0u32;
    for _ in 0..=2 * m {
        code = code << 1 | bit(spec, phase);
        phase = phase.wrapping_add(spec.alpha);
    }
    code
}

/// One atom of the partition by `x(-m) .. x(m)`: the interval starting at
/// `start` of the given length (fractions of `2^128`) and its window code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Atom {
    pub start: u128,
    pub length: u128,
    pub code: u32,
}

/// Atoms of `T^-m P v .. v T^m P`, `P = {A_0, A_1}`, as intervals of the
/// starting point.
pub fn atoms(spec: &RotationSpec, m: u32) -> Vec<Atom> {
    let mut cuts = Vec::with_capacity(2 * (2 * m as usize + 1));
    for i in -(m as i64)..=m as i64 {
        let shift = spec.alpha.wrapping_mul(i as i128 as u128);
        cuts.push(0u128.wrapping_sub(shift));
        cuts.push(spec.beta.wrapping_sub(shift));
    }
    cuts.sort_unstable();
    cuts.dedup();
    let probe = RotationSpec {
        x0: 0,
        ..spec.clone()
    };
    (0..cuts.len())
        .map(|i| {
            let start = cuts[i];
            let end = cuts[(i + 1) % cuts.len()];
            let window = RotationSpec {
                x0: start,
                ..probe.clone()
            };
            Atom {
                start,
                length: end.wrapping_sub(start),
                code: window_at(&window, 0, m),
            }
        })
        .collect()
}

/// `int F = sum of atom lengths times F` over the atoms of radius `F.radius`.
pub fn lebesgue_prediction(spec: &RotationSpec, f: &ObservableSpec) -> Result<f64> {
    check_binary(f)?;
    Ok(compensated_sum(atoms(spec, f.radius()).iter().map(|a| {
        fixed_to_f64(a.length) * f.table()[a.code as usize]
    })))
}

fn check_binary(f: &ObservableSpec) -> Result<()> {
    if f.alphabet_size() != 2 {
        return Err(Error::Config("rotation codes are binary".into()));
    }
    Ok(())
}

fn prime_chunks(table: &PrimeTable, n: u64) -> Result<Vec<(u64, u64)>> {
    if n < 2 {
        return Err(Error::Precondition("N must be >= 2".into()));
    }
    table.prime_pi(n)?;
    Ok((0..=n / CHUNK)
        .map(|c| (c * CHUNK, (c * CHUNK + CHUNK - 1).min(n)))
        .collect())
}

/// `(1/pi(N)) sum_{p <= N} F(S^p x)` with the Lebesgue integral of `F` as
/// prediction.
pub fn prime_orbit_average(
    spec: &RotationSpec,
    f: &ObservableSpec,
    n: u64,
    table: &PrimeTable,
) -> Result<AverageReport> {
    check_binary(f)?;
    if n > MAX_TIME {
        return Err(Error::Precondition(format!("N = {n} exceeds {MAX_TIME}")));
    }
    let m = f.radius();
    let size = f.table().len();
    let counts = prime_chunks(table, n)?
        .into_par_iter()
        .fold(
            || vec![0u64; size],
            |mut h, (lo, hi)| {
                for p in table.primes_in(lo, hi) {
                    h[window_at(spec, p, m) as usize] += 1;
                }
                h
            },
        )
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let total: u64 = counts.iter().sum();
    let sum = compensated_sum(counts.iter().zip(f.table()).map(|(&c, &v)| c as f64 * v));
    Ok(AverageReport {
        kind: "sturmian-primes".into(),
        n,
        r: 0,
        value: sum / total as f64,
        normalization: total,
        predicted: Some(lebesgue_prediction(spec, f)?),
        error_bound: None,
    })
}

/// `|(1/pi(N)) sum_{p <= N} e^(2 pi i alpha p)|`.
pub fn vinogradov_sum(alpha: u128, n: u64, table: &PrimeTable) -> Result<f64> {
    let chunks = prime_chunks(table, n)?;
    // per-chunk sums, combined in chunk order
    let parts: Vec<(f64, f64, u64)> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let (mut re, mut im, mut count) = (Vec::new(), Vec::new(), 0u64);
            for p in table.primes_in(lo, hi) {
                let angle = std::f64::consts::TAU * fixed_to_f64(alpha.wrapping_mul(p as u128));
                re.push(angle.cos());
                im.push(angle.sin());
                count += 1;
            }
            (compensated_sum(re), compensated_sum(im), count)
        })
        .collect();
    let re = compensated_sum(parts.iter().map(|p| p.0));
    let im = compensated_sum(parts.iter().map(|p| p.1));
    let total: u64 = parts.iter().map(|p| p.2).sum();
    Ok(re.hypot(im) / total as f64)
}

/// Prime averages of `1_{A_0}` and of continuous functions below and above
/// it whose integrals differ by `eps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezeReport {
    pub n: u64,
    pub eps: f64,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub integral_lower: f64,
    pub integral_upper: f64,
    /// `lower <= value <= upper` and both approximant averages within `eps`
    /// of their integrals.
    pub holds: bool,
}

/// Squeezes the prime average of `1_{A_0}` between the tent approximants
/// `f_-(y) = min(1, d(y, A_0^c)/d)` and `f_+(y) = max(0, 1 - d(y, A_0)/d)`
/// with `d = eps/2`.
pub fn squeeze_check(
    spec: &RotationSpec,
    n: u64,
    eps: f64,
    table: &PrimeTable,
) -> Result<SqueezeReport> {
    let beta = fixed_to_f64(spec.beta);
    let d = eps / 2.0;
    if !(eps > 0.0 && d < beta / 2.0 && d < (1.0 - beta) / 2.0) {
        return Err(Error::Config(format!(
            "eps = {eps} too large for beta = {beta}"
        )));
    }
    let inner = |y: f64| (y.min(beta - y) / d).clamp(0.0, 1.0) * (y < beta) as u8 as f64;
    let outer = |y: f64| {
        let dist = if y < beta {
            0.0
        } else {
            (y - beta).min(1.0 - y)
        };
        (1.0 - dist / d).max(0.0)
    };
    let chunks = prime_chunks(table, n)?;
    let parts: Vec<(f64, f64, u64, u64)> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let (mut lo_v, mut hi_v, mut hits, mut count) = (Vec::new(), Vec::new(), 0u64, 0u64);
            for p in table.primes_in(lo, hi) {
                let phase = spec.phase(p as i64);
                let y = fixed_to_f64(phase);
                lo_v.push(inner(y));
                hi_v.push(outer(y));
                hits += (bit(spec, phase) == 0) as u64;
                count += 1;
            }
            (compensated_sum(lo_v), compensated_sum(hi_v), hits, count)
        })
        .collect();
    let total = parts.iter().map(|p| p.3).sum::<u64>() as f64;
    let lower = compensated_sum(parts.iter().map(|p| p.0)) / total;
    let upper = compensated_sum(parts.iter().map(|p| p.1)) / total;
    let value = parts.iter().map(|p| p.2).sum::<u64>() as f64 / total;
    let (integral_lower, integral_upper) = (beta - d, beta + d);
    Ok(SqueezeReport {
        n,
        eps,
        lower,
        value,
        upper,
        integral_lower,
        integral_upper,
        holds: lower <= value
            && value <= upper
            && (lower - integral_lower).abs() <= eps
            && (upper - integral_upper).abs() <= eps,
    })
}
