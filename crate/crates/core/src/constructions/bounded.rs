//! Regular skeletons with a bounded number of holes per stage.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::toeplitz::{Stage, ToeplitzSkeleton, HOLE};

const GLYPHS: &str = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// [`build_bounded_holes_seeded`] with seed 0.
pub fn build_bounded_holes(
    alphabet_size: u32,
    periods: &[u64],
    holes_per_stage: u64,
) -> Result<ToeplitzSkeleton> {
    build_bounded_holes_seeded(alphabet_size, periods, holes_per_stage, 0)
}

/// Each stage keeps at most `holes_per_stage` of the holes it inherits,
/// preferring positions coprime to its period, and fills the others with
/// seeded random symbols. Stage 0 places its holes at random coprime
/// positions.
pub fn build_bounded_holes_seeded(
    alphabet_size: u32,
    periods: &[u64],
    holes_per_stage: u64,
    seed: u64,
) -> Result<ToeplitzSkeleton> {
    if periods.is_empty() {
        return Err(Error::Config("periods must be non-empty".into()));
    }
    if holes_per_stage == 0 {
        return Err(Error::Config("holes_per_stage must be >= 1".into()));
    }
    if alphabet_size < 2 {
        return Err(Error::Config("alphabet needs at least two symbols".into()));
    }
    if periods[0] == 0 || periods.windows(2).any(|w| w[1] % w[0] != 0) {
        return Err(Error::Config(format!("periods {periods:?} are not nested")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stages: Vec<Stage> = Vec::with_capacity(periods.len());
    let mut fallbacks = Vec::new();
    for (t, &n) in periods.iter().enumerate() {
        let (mut word, candidates): (Vec<u32>, Vec<u64>) = match stages.last() {
            None => (vec![HOLE; n as usize], (0..n).collect()),
            Some(prev) => {
                let lifted = prev.lift(n / prev.period);
                let holes = lifted.hole_positions().collect();
                (lifted.word, holes)
            }
        };
        let (coprime, other): (Vec<u64>, Vec<u64>) =
            candidates.into_iter().partition(|&j| gcd(j, n) == 1);
        let mut keep = pick(&mut rng, &coprime, holes_per_stage);
        if (keep.len() as u64) < holes_per_stage && t > 0 && !other.is_empty() {
            let extra = pick(&mut rng, &other, holes_per_stage - keep.len() as u64);
            if !extra.is_empty() {
                fallbacks.push(t);
            }
            keep.extend(extra);
        }
        keep.sort_unstable();
        let mut kept = keep.into_iter().peekable();
        for (j, s) in word.iter_mut().enumerate() {
            if *s != HOLE {
                continue;
            }
            if kept.peek() == Some(&(j as u64)) {
                kept.next();
            } else {
                *s = rng.gen_range(0..alphabet_size);
            }
        }
        stages.push(Stage::new(word));
    }
    let mut sk = if alphabet_size as usize <= GLYPHS.len() {
        ToeplitzSkeleton::new(&GLYPHS[..alphabet_size as usize], stages)?
    } else {
        ToeplitzSkeleton::with_alphabet_size(alphabet_size, stages)?
    };
    sk.set_meta("family", "bounded-holes");
    sk.set_meta("holes_per_stage", holes_per_stage);
    sk.set_meta("seed", seed);
    if !fallbacks.is_empty() {
        sk.set_meta(
            "noncoprime_hole_stages",
            fallbacks
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
    }
    Ok(sk)
}

/// Up to `count` entries of `from`, uniformly without replacement.
fn pick(rng: &mut ChaCha8Rng, from: &[u64], count: u64) -> Vec<u64> {
    let amount = (count as usize).min(from.len());
    sample(rng, from.len(), amount)
        .into_iter()
        .map(|i| from[i])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::euler_phi;
    use crate::toeplitz::{hole_report, tower_diameter};
    use std::cmp::Ordering;

    #[test]
    fn dyadic_periods_one_hole() {
        let periods: Vec<u64> = (1..=10).map(|e| 1 << e).collect();
        let sk = build_bounded_holes(2, &periods, 1).unwrap();
        for (t, s) in sk.stages().iter().enumerate() {
            assert_eq!(s.hole_count(), 1, "stage {t}");
            assert!(tower_diameter(&sk, t).unwrap().cmp_integer(3) != Ordering::Greater);
        }
        let r = hole_report(&sk, None, 0.01);
        for w in r.stages.windows(2) {
            assert!(w[1].per_phi < w[0].per_phi);
        }
        assert!(sk.metadata().get("noncoprime_hole_stages").is_none());
    }

    #[test]
    fn holes_are_coprime_and_bounded() {
        let periods = [6, 30, 210, 2310];
        for h in 1..=4 {
            let sk = build_bounded_holes_seeded(3, &periods, h, 11).unwrap();
            for s in sk.stages() {
                assert!(s.hole_count() <= h);
                assert!(s.hole_positions().all(|j| gcd(j, s.period) == 1));
                assert!(s.hole_count() as f64 / euler_phi(s.period) as f64 <= h as f64 / 2.0);
            }
        }
    }

    #[test]
    fn seeded_output_is_stable() {
        let a = build_bounded_holes_seeded(2, &[4, 12, 60], 2, 5).unwrap();
        let b = build_bounded_holes_seeded(2, &[4, 12, 60], 2, 5).unwrap();
        assert_eq!(a.to_text().unwrap(), b.to_text().unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_bounded_holes(2, &[4, 6], 1).is_err());
        assert!(build_bounded_holes(2, &[4], 0).is_err());
        assert!(build_bounded_holes(2, &[], 1).is_err());
    }
}
