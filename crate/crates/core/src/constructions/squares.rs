//! Averages along squares that oscillate at the scales `sqrt(n_t)`.

use super::build::{join, next_stage, Build, Filler, Search};
use super::config::{BuildConfig, Theorem};
use super::validate::{square_residue_mask, validate_stage_with};
use crate::arith::{is_square, PrimeTable};
use crate::error::{Error, Result};
use crate::polyres::psi_tilde_closed;
use crate::toeplitz::{parse_word, Stage, ToeplitzSkeleton, HOLE};

/// `(1/sqrt(n)) sum_{0 <= m, m^2 < n} (-1)^x(m^2)` over a word defining
/// every `m^2 < n`; `None` if some square is still a hole.
pub fn square_scale_value(word: &[u32], n: u64) -> Option<f64> {
    let mut sum = 0i64;
    let mut m = 0u64;
    while m * m < n {
        match word[(m * m) as usize] {
            HOLE => return None,
            0 => sum += 1,
            _ => sum -= 1,
        }
        m += 1;
    }
    Some(sum as f64 / (n as f64).sqrt())
}

/// Symbol for the holed squares below `n` whose scale value lies farther
/// from `previous` (0 when there is no previous scale or on a tie).
fn destroy_symbol(stage: &Stage, n: u64, previous: Option<f64>) -> u32 {
    let Some(prev) = previous else { return 0 };
    let with = |s: u32| {
        let word: Vec<u32> = stage.word[..n as usize]
            .iter()
            .map(|&c| if c == HOLE { s } else { c })
            .collect();
        square_scale_value(&word, n).unwrap()
    };
    if (with(1) - prev).abs() > (with(0) - prev).abs() {
        1
    } else {
        0
    }
}

/// Products of powers of `primes` in `[1, limit]`, ascending.
fn smooth_numbers(primes: &[u64], limit: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for &p in primes {
        let mut next = Vec::new();
        for &v in &out {
            let mut x = v;
            while let Some(y) = x.checked_mul(p).filter(|&y| y <= limit) {
                next.push(y);
                x = y;
            }
        }
        out.extend(next);
    }
    out.sort_unstable();
    out
}

pub fn build_squares_counterexample(cfg: &BuildConfig) -> Result<Build> {
    cfg.validate()?;
    let beta = cfg.beta()?;
    let theorem = Theorem::Squares {
        support: cfg.support.clone(),
    };
    let no_primes = PrimeTable::new(2)?;
    let mut sk = ToeplitzSkeleton::new("01", vec![parse_word("01", "?")?])?;
    let mut certificates = Vec::new();
    let mut multipliers = Vec::new();
    let mut previous: Option<f64> = None;

    while sk.stage_count() < cfg.stage_budget {
        let t = sk.stage_count() - 1;
        let prev = sk.stages()[t].clone();
        let n = prev.period;
        if t > 0 {
            previous = square_scale_value(&prev.word, sk.period(t - 1));
        }
        let symbol = destroy_symbol(&prev, n, previous);
        let free: Vec<u64> = cfg
            .support
            .iter()
            .copied()
            .filter(|&p| n % p != 0)
            .collect();
        let mut search = Search::new();
        let mut accepted = None;
        if free.is_empty() {
            search.fail(0, "support");
        }
        for k in smooth_numbers(&free, cfg.modulus_budget / n)
            .into_iter()
            .skip(1)
        {
            if (k as u128) < 16 * n as u128 {
                search.fail(1, "perstrsq_growth");
                continue;
            }
            // 1/psi~(k_{t+1}) <= 2^-(t+2) keeps gamma <= 1/2 for every prefix
            if (psi_tilde_closed(k) as u128) < 1u128 << (t + 2).min(127) {
                search.fail(2, "gamma");
                continue;
            }
            let big = n * k;
            let mask = square_residue_mask(big);
            let mut filler = Filler::new(cfg, t + 1);
            let stage = next_stage(
                &prev,
                k,
                symbol,
                is_square,
                |i| mask[i as usize],
                &mut filler,
            );
            let mut candidate = sk.clone();
            candidate.push_stage(stage)?;
            let cert = validate_stage_with(&candidate, t + 1, &theorem, &no_primes)?;
            if let Some(bad) = cert.failures().next() {
                search.fail(3, &bad.condition);
                continue;
            }
            accepted = Some((k, candidate, cert));
            break;
        }
        let Some((k, candidate, cert)) = accepted else {
            return Err(search.exhausted(t + 1, cfg.modulus_budget));
        };
        log::info!(
            "stage {} accepted: k = {k}, n = {}",
            t + 1,
            candidate.last_period()
        );
        sk = candidate;
        multipliers.push(k);
        certificates.push(cert);
    }

    let closing_stage = if cfg.stage_budget > 1 {
        let t = sk.stage_count() - 1;
        let last = sk.stages()[t].clone();
        let previous = square_scale_value(&last.word, sk.period(t - 1));
        let symbol = destroy_symbol(&last, last.period, previous);
        let mut filler = Filler::new(cfg, t + 1);
        sk.push_stage(next_stage(
            &last,
            1,
            symbol,
            is_square,
            |_| false,
            &mut filler,
        ))?;
        sk.set_meta("closing_stage", t + 1);
        Some(t + 1)
    } else {
        None
    };

    for c in &certificates {
        if validate_stage_with(&sk, c.stage, &theorem, &no_primes)? != *c {
            return Err(Error::Invariant(format!(
                "stage {} certificate changed after build",
                c.stage
            )));
        }
    }

    sk.set_meta("theorem", theorem.name());
    sk.set_meta("support", join(&cfg.support));
    sk.set_meta("beta", beta);
    sk.set_meta("fill_policy", cfg.fill_policy.name());
    sk.set_meta("seed", cfg.seed);
    sk.set_meta("modulus_budget", cfg.modulus_budget);
    sk.set_meta("multipliers", join(&multipliers));
    Ok(Build {
        skeleton: sk,
        certificates,
        multipliers,
        closing_stage,
        beta: Some(beta),
    })
}
