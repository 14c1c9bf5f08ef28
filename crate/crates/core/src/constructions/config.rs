use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::factorize;
use crate::error::{Error, Result};

/// How positions the construction leaves free ("fill in an arbitrary way")
/// are filled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FillPolicy {
    /// The symbol the current stage pushes its average towards.
    #[default]
    AlternatingTarget,
    /// ChaCha8 draws seeded by `BuildConfig::seed`.
    SeededRandom,
}

impl FillPolicy {
    pub fn name(self) -> &'static str {
        match self {
            FillPolicy::AlternatingTarget => "alternating-target",
            FillPolicy::SeededRandom => "seeded-random",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildConfig {
    /// Constant `c` in `1 - sum c^-l` and `phi(k) >= c^t`.
    pub growth: u64,
    /// Stored stages including the trivial base `n_0 = 1`.
    pub stage_budget: usize,
    /// Largest admissible period.
    pub modulus_budget: u64,
    pub fill_policy: FillPolicy,
    /// Gap the oscillation witness is expected to reach.
    pub oscillation_target: f64,
    pub seed: u64,
    /// Constant bounding the non-coprime semiprime mass by `pi_2 / spread`.
    pub spread: u64,
    /// Prime support of the periods in the squares construction.
    pub support: Vec<u64>,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            growth: 2,
            stage_budget: 3,
            modulus_budget: 100_000_000,
            fill_policy: FillPolicy::AlternatingTarget,
            oscillation_target: 0.5,
            seed: 0,
            spread: 8,
            support: vec![2, 3, 5],
        }
    }
}

impl BuildConfig {
    pub fn validate(&self) -> Result<()> {
        if self.growth < 2 {
            return Err(Error::Config(format!(
                "growth constant must be >= 2, got {}",
                self.growth
            )));
        }
        if self.stage_budget < 1 {
            return Err(Error::Config("stage_budget must be >= 1".into()));
        }
        if self.modulus_budget < 2 {
            return Err(Error::Config("modulus_budget must be >= 2".into()));
        }
        if !(self.oscillation_target > 0.0 && self.oscillation_target <= 1.0) {
            return Err(Error::Config(format!(
                "oscillation_target must lie in (0, 1], got {}",
                self.oscillation_target
            )));
        }
        if self.spread == 0 {
            return Err(Error::Config("spread must be positive".into()));
        }
        Ok(())
    }

    /// `beta = (1/16) prod_{p in support} (p-1)/p`.
    pub fn beta(&self) -> Result<Ratio<u128>> {
        beta_for_support(&self.support)
    }
}

/// `(1/16) prod (p-1)/p` over a finite prime support.
pub fn beta_for_support(support: &[u64]) -> Result<Ratio<u128>> {
    if support.is_empty() {
        return Err(Error::Config(
            "support must contain at least one prime".into(),
        ));
    }
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != support.len() {
        return Err(Error::Config("support primes must be distinct".into()));
    }
    let mut beta = Ratio::new(1u128, 16);
    for &p in support {
        if p < 2 || factorize(p).prime_powers != [(p, 1)] {
            return Err(Error::Config(format!("support entry {p} is not prime")));
        }
        beta *= Ratio::new(p as u128 - 1, p as u128);
    }
    if beta < Ratio::new(1, 1u128 << 40) {
        return Err(Error::Config(format!(
            "beta = {beta} is below resolution 2^-40"
        )));
    }
    Ok(beta)
}

/// Which family of stage conditions to check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "kebab-case")]
pub enum Theorem {
    /// Prime averages (no PNT).
    A { growth: u64 },
    /// Semiprime averages (no SPNT).
    Spnt { growth: u64, spread: u64 },
    /// Averages along squares.
    Squares { support: Vec<u64> },
}

impl Theorem {
    pub fn name(&self) -> &'static str {
        match self {
            Theorem::A { .. } => "A",
            Theorem::Spnt { .. } => "spnt",
            Theorem::Squares { .. } => "squares",
        }
    }

    /// Parameters recorded in skeleton metadata as `theorem`, `growth`, ...
    pub fn from_metadata(meta: &std::collections::BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| {
            meta.get(k)
                .ok_or_else(|| Error::Config(format!("skeleton metadata lacks `{k}`")))
        };
        let num = |k: &str| -> Result<u64> {
            get(k)?
                .parse()
                .map_err(|_| Error::Config(format!("metadata `{k}` is not an integer")))
        };
        match get("theorem")?.as_str() {
            "A" => Ok(Theorem::A {
                growth: num("growth")?,
            }),
            "spnt" => Ok(Theorem::Spnt {
                growth: num("growth")?,
                spread: num("spread")?,
            }),
            "squares" => Ok(Theorem::Squares {
                support: parse_list(get("support")?)?,
            }),
            other => Err(Error::Config(format!("unknown theorem `{other}`"))),
        }
    }
}

/// Parses `2,3,5`.
pub fn parse_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("bad integer list {s:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_for_2_3_5() {
        assert_eq!(beta_for_support(&[2, 3, 5]).unwrap(), Ratio::new(1, 60));
        assert!(beta_for_support(&[]).is_err());
        assert!(beta_for_support(&[4]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(BuildConfig::default().validate().is_ok());
        let bad = BuildConfig {
            growth: 1,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = BuildConfig {
            oscillation_target: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let cfg: BuildConfig =
            serde_json::from_str(r#"{"growth": 3, "fill_policy": "seeded-random"}"#).unwrap();
        assert_eq!((cfg.growth, cfg.fill_policy), (3, FillPolicy::SeededRandom));
        assert!(serde_json::from_str::<BuildConfig>(r#"{"grwth": 3}"#).is_err());
    }
}
