use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::skeleton::{Stage, ToeplitzSkeleton, HOLE};

/// Parameters for [`random_skeleton`].
#[derive(Clone, Debug)]
pub struct RandomSkeletonConfig {
    pub alphabet_size: u32,
    pub max_stages: usize,
    pub max_period: u64,
    /// Probability that a position is a hole at stage 0.
    pub hole_rate: f64,
    /// Probability that an inherited hole is filled at a later stage.
    pub fill_rate: f64,
}

impl Default for RandomSkeletonConfig {
    fn default() -> Self {
        RandomSkeletonConfig {
            alphabet_size: 2,
            max_stages: 5,
            max_period: 2000,
            hole_rate: 0.5,
            fill_rate: 0.5,
        }
    }
}

/// A consistent skeleton drawn from ChaCha8 seeded with `seed`.
pub fn random_skeleton(seed: u64, cfg: &RandomSkeletonConfig) -> ToeplitzSkeleton {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut period = rng.gen_range(1..=6u64).min(cfg.max_period);
    let first: Vec<u32> = (0..period)
        .map(|_| {
            if rng.gen_bool(cfg.hole_rate) {
                HOLE
            } else {
                rng.gen_range(0..cfg.alphabet_size)
            }
        })
        .collect();
    let mut stages = vec![Stage::new(first)];
    let count = rng.gen_range(1..=cfg.max_stages);
    while stages.len() < count {
        let k = rng.gen_range(1..=5u64);
        if period * k > cfg.max_period {
            break;
        }
        period *= k;
        let mut next = stages.last().unwrap().lift(k);
        for s in next.word.iter_mut() {
            if *s == HOLE && rng.gen_bool(cfg.fill_rate) {
                *s = rng.gen_range(0..cfg.alphabet_size);
            }
        }
        stages.push(next);
    }
    ToeplitzSkeleton::with_alphabet_size(cfg.alphabet_size, stages)
        .expect("lifted stages are consistent")
}
