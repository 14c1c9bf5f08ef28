//! Counterexamples along primes and along semiprimes.

use super::build::{alternating_target, join, next_stage, Build, Filler, Search};
use super::config::{BuildConfig, Theorem};
use super::validate::{max_coprime, semiprime_histogram, validate_stage_with};
use crate::arith::{euler_phi, gcd, is_square, PrimeTable, SemiprimeMode};
use crate::error::{Error, Result};
use crate::toeplitz::{parse_word, ToeplitzSkeleton};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Index {
    Primes,
    Semiprimes,
}

/// Prime averages that oscillate between stage scales `n_t`.
pub fn build_theorem_a(cfg: &BuildConfig) -> Result<Build> {
    build(cfg, Index::Primes)
}

/// Semiprime averages that oscillate between stage scales `n_t`.
pub fn build_spnt_counterexample(cfg: &BuildConfig) -> Result<Build> {
    build(cfg, Index::Semiprimes)
}

/// `mask[j]` iff `j < n` is in the index set.
fn index_mask(table: &PrimeTable, index: Index, n: u64) -> Result<Vec<bool>> {
    let mut mask = vec![false; n as usize];
    let top = n.saturating_sub(1);
    match index {
        Index::Primes => {
            for p in table.primes_up_to(top) {
                mask[p as usize] = true;
            }
        }
        Index::Semiprimes => {
            table.for_each_semiprime_pair(top, SemiprimeMode::Distinct, |p1, p2| {
                mask[(p1 * p2) as usize] = true;
            })?
        }
    }
    Ok(mask)
}

/// Conditions depending only on `(n, k)`, cheapest first. Returns the
/// failing condition and its level.
fn arithmetic_checks(
    cfg: &BuildConfig,
    table: &PrimeTable,
    index: Index,
    n: u64,
    k: u64,
    growth_bound: Option<u64>,
) -> Result<Option<(usize, &'static str)>> {
    if gcd(k, n) != 1 {
        return Ok(Some((0, "t1")));
    }
    if index == Index::Semiprimes && !is_square(k) {
        return Ok(Some((1, "square")));
    }
    let phi = euler_phi(k);
    if 2 * phi > k {
        return Ok(Some((2, "t6")));
    }
    if growth_bound.map_or(true, |c| phi < c) {
        return Ok(Some((3, "t6half")));
    }
    let big = n * k;
    match index {
        Index::Primes => {
            let pi = table.prime_pi(big)?;
            if 8.0 * (big as f64).ln() > pi as f64 {
                return Ok(Some((4, "t6pp_log")));
            }
            if 8 * table.prime_pi(n)? > pi {
                return Ok(Some((4, "t6pp_growth")));
            }
            let hist = table.residue_histogram(big, n)?;
            if max_coprime(&hist, n) as u128 * euler_phi(n) as u128 > 2 * pi as u128 {
                return Ok(Some((5, "t7")));
            }
        }
        Index::Semiprimes => {
            let m = big - 1;
            let pi2 = table.semiprime_pi(m, SemiprimeMode::SmallFactorPairs)?;
            let nc = table.semiprime_noncoprime_count(m, n, SemiprimeMode::SmallFactorPairs)?;
            if nc as u128 * cfg.spread as u128 > pi2 as u128 {
                return Ok(Some((4, "noncoprime")));
            }
            let hist = semiprime_histogram(table, m, n)?;
            if max_coprime(&hist, n) as u128 * euler_phi(n) as u128 > 2 * pi2 as u128 {
                return Ok(Some((5, "t7a")));
            }
        }
    }
    Ok(None)
}

fn build(cfg: &BuildConfig, index: Index) -> Result<Build> {
    cfg.validate()?;
    let theorem = match index {
        Index::Primes => Theorem::A { growth: cfg.growth },
        Index::Semiprimes => Theorem::Spnt {
            growth: cfg.growth,
            spread: cfg.spread,
        },
    };
    let table = PrimeTable::new(cfg.modulus_budget)?;
    let mut sk = ToeplitzSkeleton::new("01", vec![parse_word("01", "?")?])?;
    let mut certificates = Vec::new();
    let mut multipliers = Vec::new();

    while sk.stage_count() < cfg.stage_budget {
        let t = sk.stage_count() - 1;
        let prev = sk.stages()[t].clone();
        let n = prev.period;
        let mask = index_mask(&table, index, n)?;
        let growth_bound = cfg.growth.checked_pow(t as u32 + 1);
        let mut search = Search::new();
        let mut accepted = None;
        for k in 2..=cfg.modulus_budget / n {
            if let Some((level, cond)) = arithmetic_checks(cfg, &table, index, n, k, growth_bound)?
            {
                search.fail(level, cond);
                continue;
            }
            let big = n * k;
            let mut filler = Filler::new(cfg, t + 1);
            let stage = next_stage(
                &prev,
                k,
                alternating_target(t),
                |j| mask[j as usize],
                |i| gcd(i, big) == 1,
                &mut filler,
            );
            let mut candidate = sk.clone();
            candidate.push_stage(stage)?;
            let cert = validate_stage_with(&candidate, t + 1, &theorem, &table)?;
            if let Some(bad) = cert.failures().next() {
                search.fail(6, &bad.condition);
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
        let mask = index_mask(&table, index, last.period)?;
        let mut filler = Filler::new(cfg, t + 1);
        let closing = next_stage(
            &last,
            1,
            alternating_target(t),
            |j| mask[j as usize],
            |_| false,
            &mut filler,
        );
        sk.push_stage(closing)?;
        sk.set_meta("closing_stage", t + 1);
        Some(t + 1)
    } else {
        None
    };

    // independent re-check of what was accepted
    for c in &certificates {
        let again = validate_stage_with(&sk, c.stage, &theorem, &table)?;
        if again != *c {
            return Err(Error::Invariant(format!(
                "stage {} certificate changed after build",
                c.stage
            )));
        }
    }

    sk.set_meta("theorem", theorem.name());
    sk.set_meta("growth", cfg.growth);
    if index == Index::Semiprimes {
        sk.set_meta("spread", cfg.spread);
    }
    sk.set_meta("fill_policy", cfg.fill_policy.name());
    sk.set_meta("seed", cfg.seed);
    sk.set_meta("modulus_budget", cfg.modulus_budget);
    sk.set_meta("multipliers", join(&multipliers));
    Ok(Build {
        skeleton: sk,
        certificates,
        multipliers,
        closing_stage,
        beta: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gcd;
    use crate::constructions::validate::validate_all;
    use crate::toeplitz::HOLE;

    fn cfg(growth: u64, stages: usize) -> BuildConfig {
        BuildConfig {
            growth,
            stage_budget: stages,
            modulus_budget: 10_000_000,
            ..Default::default()
        }
    }

    #[test]
    fn single_stage_budget_is_base_only() {
        let b = build_theorem_a(&cfg(2, 1)).unwrap();
        assert_eq!(b.skeleton.stage_count(), 1);
        assert!(b.certificates.is_empty() && b.closing_stage.is_none());
    }

    #[test]
    fn theorem_a_three_stages() {
        let b = build_theorem_a(&cfg(2, 3)).unwrap();
        assert_eq!(b.periods(), vec![1, 182, 30030]);
        assert_eq!(b.multipliers, vec![182, 165]);
        assert!(b.all_passed());
        assert_eq!(b.closing_stage, Some(3));
        // independent revalidation agrees, from the text form alone
        let back = ToeplitzSkeleton::from_text(&b.skeleton.to_text().unwrap()).unwrap();
        let th = Theorem::from_metadata(back.metadata()).unwrap();
        let certs = validate_all(&back, &th).unwrap();
        assert_eq!(certs.len(), 3);
        assert!(certs.iter().all(|c| c.passed()));
        assert_eq!(certs[1..], b.certificates[..]);
        // closing stage leaves no holes
        assert_eq!(b.skeleton.stages()[3].hole_count(), 0);
    }

    #[test]
    fn residue_maps_on_built_stages() {
        let b = build_theorem_a(&cfg(2, 3)).unwrap();
        let p = b.periods();
        for t in 0..p.len() - 1 {
            let (n, big) = (p[t], p[t + 1]);
            let k = big / n;
            let phi_k = euler_phi(k);
            // a -> {a + j n} meets the units mod n_{t+1} in exactly phi(k) points
            let coprime: Vec<u64> = (0..n).filter(|&a| gcd(a, n) == 1).collect();
            let step = (coprime.len() / 20).max(1);
            for &a in coprime.iter().step_by(step).take(20) {
                let hits = (0..k).filter(|j| gcd(a + j * n, big) == 1).count() as u64;
                assert_eq!(hits, phi_k, "t={t} a={a}");
            }
            // units mod n_{t+1} reduce to units mod n_t
            for i in 0..big {
                if gcd(i, big) == 1 {
                    assert_eq!(gcd(i % n, n), 1);
                }
            }
        }
    }

    #[test]
    fn regularity_halves_density() {
        let b = build_theorem_a(&cfg(2, 3)).unwrap();
        for (t, n) in b.periods().into_iter().enumerate() {
            assert!(euler_phi(n) << t <= n);
        }
    }

    #[test]
    fn deterministic_text() {
        for policy in [
            super::super::FillPolicy::AlternatingTarget,
            super::super::FillPolicy::SeededRandom,
        ] {
            let c = BuildConfig {
                fill_policy: policy,
                seed: 7,
                ..cfg(2, 3)
            };
            let a = build_theorem_a(&c).unwrap().skeleton.to_text().unwrap();
            let b = build_theorem_a(&c).unwrap().skeleton.to_text().unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn destroyable_holes_get_target() {
        let b = build_theorem_a(&cfg(2, 3)).unwrap();
        let s1 = &b.skeleton.stages()[1];
        let s2 = &b.skeleton.stages()[2];
        let table = PrimeTable::new(200).unwrap();
        for p in table.primes_up_to(181) {
            if s1.word[p as usize] == HOLE {
                assert_eq!(s2.word[p as usize], alternating_target(1));
            }
        }
    }

    #[test]
    fn growth_100_refuses_third_stage() {
        let c = BuildConfig {
            growth: 100,
            stage_budget: 4,
            modulus_budget: 100_000_000,
            ..Default::default()
        };
        match build_theorem_a(&c) {
            Err(Error::BudgetExhausted {
                stage, condition, ..
            }) => {
                assert_eq!(stage, 3);
                assert_eq!(condition, "t6");
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
        let two = build_theorem_a(&BuildConfig {
            stage_budget: 3,
            ..c
        })
        .unwrap();
        assert_eq!(two.periods(), vec![1, 202, 4087470]);
        assert!(two.all_passed());
    }

    #[test]
    fn spnt_exhausts_on_noncoprime_mass() {
        let c = BuildConfig {
            stage_budget: 3,
            modulus_budget: 1_000_000,
            ..Default::default()
        };
        match build_spnt_counterexample(&c) {
            Err(Error::BudgetExhausted {
                stage, condition, ..
            }) => {
                assert_eq!(stage, 2);
                assert_eq!(condition, "noncoprime");
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
        let one = build_spnt_counterexample(&BuildConfig {
            stage_budget: 2,
            ..c
        })
        .unwrap();
        assert_eq!(one.periods(), vec![1, 4]);
        assert!(one.all_passed());
        assert!(one.periods().iter().all(|&n| is_square(n)));
        let nc = one.certificates[0].record("noncoprime").unwrap();
        assert!(nc.pass);
    }
}
