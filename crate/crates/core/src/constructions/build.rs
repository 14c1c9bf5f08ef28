//! Shared builder plumbing: fill rules, the search bookkeeping and the result.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::certificate::StageCertificate;
use super::config::{BuildConfig, FillPolicy};
use crate::error::Error;
use crate::toeplitz::{Stage, ToeplitzSkeleton, HOLE};

/// A built prefix of a counterexample.
#[derive(Clone, Debug)]
pub struct Build {
    pub skeleton: ToeplitzSkeleton,
    /// Certificates for the constructive stages `1..T`.
    pub certificates: Vec<StageCertificate>,
    /// `k_t = n_t / n_{t-1}` for `t = 1..T`.
    pub multipliers: Vec<u64>,
    /// Index of the terminal fill-only stage, if one was appended.
    pub closing_stage: Option<usize>,
    /// beta of the squares construction.
    pub beta: Option<Ratio<u128>>,
}

impl Build {
    pub fn all_passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed())
    }

    /// Periods `n_0, .., n_T` of the constructive stages.
    pub fn periods(&self) -> Vec<u64> {
        let count = self.closing_stage.unwrap_or(self.skeleton.stage_count());
        (0..count).map(|t| self.skeleton.period(t)).collect()
    }
}

/// Symbol pushing `F(y) = (-1)^y(0)` towards +1 on odd `t`, -1 on even `t`.
pub(crate) fn alternating_target(t: usize) -> u32 {
    if t % 2 == 1 {
        0
    } else {
        1
    }
}

/// Draws for the places a construction may fill arbitrarily; one ChaCha8
/// stream per stage so a rejected candidate never shifts later draws.
pub(crate) struct Filler {
    policy: FillPolicy,
    rng: ChaCha8Rng,
}

impl Filler {
    pub(crate) fn new(cfg: &BuildConfig, stage: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stage as u64);
        Filler {
            policy: cfg.fill_policy,
            rng,
        }
    }

    pub(crate) fn symbol(&mut self, target: u32) -> u32 {
        match self.policy {
            FillPolicy::AlternatingTarget => target,
            FillPolicy::SeededRandom => self.rng.gen_range(0..2),
        }
    }
}

/// Lifts `prev` by `k`, fills every hole of the first block (destroyable
/// positions get `target`, the rest the filler), and keeps a lifted hole at
/// `i >= n` only where `keep(i)` holds.
pub(crate) fn next_stage(
    prev: &Stage,
    k: u64,
    target: u32,
    destroyable: impl Fn(u64) -> bool,
    keep: impl Fn(u64) -> bool,
    filler: &mut Filler,
) -> Stage {
    let n = prev.period as usize;
    let mut next = prev.lift(k);
    for (i, s) in next.word.iter_mut().enumerate() {
        if *s != HOLE {
            continue;
        }
        if i < n {
            *s = if destroyable(i as u64) {
                target
            } else {
                filler.symbol(target)
            };
        } else if !keep(i as u64) {
            *s = filler.symbol(target);
        }
    }
    next
}

/// Deepest failure seen while searching for `k`, by condition order.
pub(crate) struct Search {
    level: usize,
    condition: String,
}

impl Search {
    pub(crate) fn new() -> Self {
        Search {
            level: 0,
            condition: "modulus_budget".into(),
        }
    }

    pub(crate) fn fail(&mut self, level: usize, condition: &str) {
        if level + 1 > self.level {
            self.level = level + 1;
            self.condition = condition.into();
        }
    }

    pub(crate) fn exhausted(self, stage: usize, budget: u64) -> Error {
        Error::BudgetExhausted {
            stage,
            budget,
            condition: self.condition,
        }
    }
}

pub(crate) fn join(values: &[u64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
