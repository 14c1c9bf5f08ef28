//! The acceptance suite: one function per criterion, each returning the
//! individual checks it made.

use std::fmt;
use std::time::{Duration, Instant};

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, factorize, gcd, PrimeTable, SemiprimeMode};
use crate::averaging::{
    oscillation_witness, poly_average, predicted_poly_limit, predicted_prime_limit, prime_average,
    prime_histogram, semiprime_histogram, write_reports_csv, AverageReport, IndexSet,
    ObservableSpec,
};
use crate::constructions::{
    beta_for_support, build_bounded_holes_seeded, build_squares_counterexample, build_theorem_a,
    certificates_to_json_lines, constructive_stage_count, validate_all, Build, BuildConfig,
    Theorem,
};
use crate::error::Result;
use crate::polyres::{
    crt_compose, interval_count_bounds, residue_profile, residue_profile_brute, rho_count,
    rho_max_table, square_psi_closed, square_rho_closed, PolynomialSpec,
};
use crate::sturmian::{
    fixed_to_f64, prime_orbit_average, squeeze_check, vinogradov_sum, RotationSpec,
};
use crate::toeplitz::{
    parse_word, random_skeleton, tower_diameter, RandomSkeletonConfig, ToeplitzSkeleton,
};

pub const CRITERIA: std::ops::RangeInclusive<u8> = 1..=12;

/// Largest `N` used by the suite.
pub const PRIME_LIMIT: u64 = 10_000_000;

/// Periods of the bounded-holes skeleton used for the empirical averages.
pub const BOUNDED_PERIODS: [u64; 6] = [2, 6, 30, 210, 2310, 30030];
/// Stage of that skeleton whose prediction is compared (`n_k = 210`).
pub const PREDICTION_STAGE: usize = 3;
const SHIFTS: [i64; 3] = [0, 1, 17];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcceptanceConfig {
    pub seed: u64,
    /// Criteria to run; empty runs all.
    pub criteria: Vec<u8>,
}

/// One comparison `lhs relation rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
    pub pass: bool,
    /// Wall-clock checks; left out of written result files.
    #[serde(skip)]
    pub timing: bool,
}

impl Check {
    fn le(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Check::new(
            label,
            format!("{lhs:.6}"),
            "<=",
            format!("{rhs}"),
            lhs <= rhs,
        )
    }

    fn ge(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Check::new(
            label,
            format!("{lhs:.6}"),
            ">=",
            format!("{rhs:.6}"),
            lhs >= rhs,
        )
    }

    fn count(label: impl Into<String>, failures: u64, checked: u64) -> Self {
        Check::new(
            label,
            format!("{failures} failures"),
            "in",
            format!("{checked} cases"),
            failures == 0,
        )
    }

    fn within(label: impl Into<String>, elapsed: Duration, limit_secs: u64) -> Self {
        let secs = elapsed.as_secs_f64();
        Check {
            timing: true,
            ..Check::new(
                label,
                format!("{secs:.1}s"),
                "<=",
                format!("{limit_secs}s"),
                secs <= limit_secs as f64,
            )
        }
    }

    fn new(label: impl Into<String>, lhs: String, relation: &str, rhs: String, pass: bool) -> Self {
        Check {
            label: label.into(),
            lhs,
            relation: relation.into(),
            rhs,
            pass,
            timing: false,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {} {}",
            self.label, self.lhs, self.relation, self.rhs
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    /// Thresholds chosen empirically rather than implied by a proof.
    pub soft: bool,
    pub checks: Vec<Check>,
    /// Reported values that are not asserted.
    pub notes: Vec<String>,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// One line: status, id, title and the first failing (or first) check.
    pub fn summary(&self) -> String {
        let shown = self.checks.iter().find(|c| !c.pass).or(self.checks.first());
        let passed = self.checks.iter().filter(|c| c.pass).count();
        format!(
            "criterion {:>2} {} {}{} [{passed}/{} checks] {}",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            if self.soft { " (soft)" } else { "" },
            self.checks.len(),
            shown.map(|c| c.to_string()).unwrap_or_default()
        )
    }
}

/// A named output file of the suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// Shared state: the configuration and a lazily built prime table.
pub struct Suite {
    cfg: AcceptanceConfig,
    table: std::sync::OnceLock<PrimeTable>,
}

impl Suite {
    pub fn new(cfg: AcceptanceConfig) -> Self {
        Suite {
            cfg,
            table: std::sync::OnceLock::new(),
        }
    }

    pub fn config(&self) -> &AcceptanceConfig {
        &self.cfg
    }

    pub fn table(&self) -> Result<&PrimeTable> {
        if let Some(t) = self.table.get() {
            return Ok(t);
        }
        let t = PrimeTable::new(PRIME_LIMIT)?;
        Ok(self.table.get_or_init(|| t))
    }

    fn rng(&self, id: u8) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(id as u64);
        rng
    }

    pub fn selected(&self) -> Vec<u8> {
        if self.cfg.criteria.is_empty() {
            CRITERIA.collect()
        } else {
            self.cfg.criteria.clone()
        }
    }

    pub fn run(&self, id: u8) -> Result<CriterionResult> {
        match id {
            1 => self.square_closed_forms(),
            2 => self.multiplicativity(),
            3 => self.residue_bounds(),
            4 => self.sandwich_lemmas(),
            5 => self.theorem_a(),
            6 => self.bounded_prime_averages(),
            7 => self.semiprime_coincidence(),
            8 => self.dirichlet(),
            9 => self.polynomial_averages(),
            10 => self.squares(),
            11 => self.sturmian(),
            12 => self.reproducibility(),
            _ => Err(crate::Error::Config(format!(
                "no acceptance criterion {id}"
            ))),
        }
    }

    /// The bounded-holes skeleton of criteria 6, 7 and 9.
    pub fn bounded_skeleton(&self) -> Result<ToeplitzSkeleton> {
        build_bounded_holes_seeded(2, &BOUNDED_PERIODS, 1, self.cfg.seed)
    }

    fn result(
        id: u8,
        title: &str,
        soft: bool,
        checks: Vec<Check>,
        notes: Vec<String>,
    ) -> Result<CriterionResult> {
        Ok(CriterionResult {
            id,
            title: title.into(),
            soft,
            checks,
            notes,
        })
    }

    fn square_closed_forms(&self) -> Result<CriterionResult> {
        let start = Instant::now();
        let sq = PolynomialSpec::square();
        let mut cases = Vec::new();
        for p in [2u64, 3, 5, 7, 11, 13] {
            let mut e = 1u32;
            while p.pow(e) <= 1_000_000 {
                cases.push((p, e));
                e += 1;
            }
        }
        let (failures, checked) = cases
            .par_iter()
            .map(|&(p, e)| {
                let brute = residue_profile_brute(&sq, p.pow(e));
                let mut bad = (square_psi_closed(p, e).ok() != Some(brute.psi())) as u64;
                for (a, &c) in brute.counts().iter().enumerate() {
                    let closed = square_rho_closed(p, e, a as u64).unwrap_or(0);
                    bad += (closed != c) as u64;
                }
                (bad, brute.counts().len() as u64 + 1)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        Self::result(
            1,
            "square residue closed forms match enumeration",
            false,
            vec![
                Check::count("rho and psi at prime powers <= 10^6", failures, checked),
                Check::within("runtime", start.elapsed(), 30),
            ],
            vec![format!("{} prime powers", cases.len())],
        )
    }

    fn multiplicativity(&self) -> Result<CriterionResult> {
        let mut rng = self.rng(2);
        let mut pairs = Vec::with_capacity(200);
        while pairs.len() < 200 {
            let a = rng.gen_range(2..=1000u64);
            let b = rng.gen_range(2..=1_000_000 / a);
            if a.gcd(&b) == 1 {
                pairs.push((a, b));
            }
        }
        let polys: Vec<PolynomialSpec> = ["m^2", "m^2+m", "m^3+2m+1"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let (failures, checked) = pairs
            .par_iter()
            .flat_map(|&(a, b)| polys.par_iter().map(move |p| (a, b, p)))
            .map(|(a, b, p)| {
                let pa = residue_profile_brute(p, a);
                let pb = residue_profile_brute(p, b);
                let brute = residue_profile_brute(p, a * b);
                let composed = crt_compose(&[pa.clone(), pb.clone()]).ok();
                let ok = composed.as_ref() == Some(&brute)
                    && residue_profile(p, a * b) == brute
                    && pa.psi() * pb.psi() == brute.psi();
                ((!ok) as u64, 1u64)
            })
            .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
        Self::result(
            2,
            "residue profiles are multiplicative",
            false,
            vec![Check::count(
                "CRT profile vs enumeration, 200 pairs x 3 polynomials",
                failures,
                checked,
            )],
            vec![],
        )
    }

    fn residue_bounds(&self) -> Result<CriterionResult> {
        let start = Instant::now();
        let sq = PolynomialSpec::square();
        let table = rho_max_table(&sq, 100_000);
        let mut sqrt_bad = 0;
        let mut free_bad = 0;
        let mut free_checked = 0;
        for n in 2..=100_000u64 {
            let rho = table[n as usize];
            sqrt_bad += (rho * rho > 16 * n) as u64;
            let f = factorize(n);
            if f.is_square_free() {
                free_checked += 1;
                free_bad += (rho > 1 << f.omega()) as u64;
            }
        }
        let table_bad = (2..=2000u64)
            .filter(|&n| residue_profile_brute(&sq, n).rho_max() != table[n as usize])
            .count() as u64;
        let cubics: Vec<PolynomialSpec> = ["m^3+2m+1", "m^3"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let cubic_bad = cubics
            .iter()
            .map(|p| {
                (2..=10_000u64)
                    .into_par_iter()
                    .filter(|&n| !crate::polyres::albis_bound_check(p, n))
                    .count() as u64
            })
            .sum();
        Self::result(
            3,
            "residue hit-count bounds",
            false,
            vec![
                Check::count("rho(n)^2 <= 16n, 2 <= n <= 10^5", sqrt_bad, 99_999),
                Check::count(
                    "rho(n) <= 2^omega(n), square-free n <= 10^5",
                    free_bad,
                    free_checked,
                ),
                Check::count("rho_max table vs enumeration, n <= 2000", table_bad, 1999),
                Check::count(
                    "rho(n) rad(n) <= 3^omega(n) n for two cubics, n <= 10^4",
                    cubic_bad,
                    2 * 9999,
                ),
                Check::within("runtime", start.elapsed(), 60),
            ],
            vec![],
        )
    }

    fn sandwich_lemmas(&self) -> Result<CriterionResult> {
        let mut rng = self.rng(4);
        let polys: Vec<PolynomialSpec> = ["m^2", "m^2+m", "m^3+2m+1"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let mut interval_bad = 0;
        for _ in 0..1000 {
            let p = &polys[rng.gen_range(0..polys.len())];
            let n = rng.gen_range(1..=300u64);
            let attained: Vec<u64> = residue_profile(p, n).attainable().collect();
            let a = attained[rng.gen_range(0..attained.len())];
            let lo = p.eval(n).expect("small");
            let big_n = rng.gen_range(lo..=lo + 1_000_000);
            interval_bad += (!interval_count_bounds(p, n, a as i64, big_n)?.holds()) as u64;
        }
        let mut tower_bad = 0;
        let mut stages = 0;
        let rcfg = RandomSkeletonConfig::default();
        for i in 0..100u64 {
            let sk = random_skeleton(self.cfg.seed.wrapping_mul(1000).wrapping_add(i), &rcfg);
            for t in 0..sk.stage_count() {
                let holes = sk.stage(t)?.hole_count();
                let d = tower_diameter(&sk, t)?;
                stages += 1;
                tower_bad +=
                    (d.cmp_integer(holes).is_lt() || d.cmp_integer(3 * holes).is_gt()) as u64;
            }
        }
        Self::result(
            4,
            "sandwich bounds",
            false,
            vec![
                Check::count(
                    "residue-class counts of P(m) <= N within rho(M/n -+ 1)",
                    interval_bad,
                    1000,
                ),
                Check::count(
                    "holes <= tower diameter <= 3 holes on 100 skeletons",
                    tower_bad,
                    stages,
                ),
            ],
            vec![],
        )
    }

    fn theorem_a_build(&self) -> Result<(BuildConfig, Build)> {
        let cfg = BuildConfig {
            growth: 2,
            stage_budget: 3,
            modulus_budget: 100_000_000,
            seed: self.cfg.seed,
            ..Default::default()
        };
        let b = build_theorem_a(&cfg)?;
        Ok((cfg, b))
    }

    fn theorem_a(&self) -> Result<CriterionResult> {
        let (cfg, b) = self.theorem_a_build()?;
        let sk = &b.skeleton;
        let certs = validate_all(sk, &Theorem::A { growth: cfg.growth })?;
        let failed: u64 = certs.iter().map(|c| c.failures().count() as u64).sum();
        let records: u64 = certs.iter().map(|c| c.records.len() as u64).sum();
        let stages: Vec<usize> = (1..constructive_stage_count(sk)).collect();
        let w = oscillation_witness(
            sk,
            &IndexSet::Primes,
            &ObservableSpec::parity(2),
            &stages,
            0,
            Some(self.table()?),
        )?;
        let mut checks = vec![
            Check::count("stage conditions recomputed", failed, records),
            Check::new(
                "last constructive period",
                b.periods().last().copied().unwrap_or(0).to_string(),
                "<=",
                "100000000".into(),
                b.periods().last().is_some_and(|&n| n <= 100_000_000),
            ),
        ];
        let gaps: Vec<f64> = w.iter().filter_map(|p| p.gap).collect();
        checks.push(Check::new(
            "witness gaps",
            gaps.len().to_string(),
            ">=",
            "1".into(),
            !gaps.is_empty(),
        ));
        for p in w.iter().filter(|p| p.gap.is_some()) {
            checks.push(Check::ge(
                format!("prime-average gap at n_{}={}", p.stage, p.scale),
                p.gap.unwrap(),
                cfg.oscillation_target,
            ));
        }
        let notes = w
            .iter()
            .map(|p| format!("stage {} scale {} average {:.6}", p.stage, p.scale, p.value))
            .collect();
        Self::result(
            5,
            "theorem A construction destroys the PNT",
            false,
            checks,
            notes,
        )
    }

    fn bounded_prime_averages(&self) -> Result<CriterionResult> {
        let sk = self.bounded_skeleton()?;
        let table = self.table()?;
        let f = ObservableSpec::parity(2);
        let mut checks = Vec::new();
        let mut notes = Vec::new();
        for r in SHIFTS {
            let pred = predicted_prime_limit(&sk, PREDICTION_STAGE, &f, r)?;
            let big = prime_average(&sk, &f, PRIME_LIMIT, r, table)?;
            let small = prime_average(&sk, &f, PRIME_LIMIT / 10, r, table)?;
            checks.push(Check::le(
                format!("|avg(1e7) - predicted(n_k={})| r={r}", pred.period),
                (big.value - pred.value).abs(),
                0.02,
            ));
            checks.push(Check::le(
                format!("|avg(1e7) - avg(1e6)| r={r}"),
                (big.value - small.value).abs(),
                0.02,
            ));
            notes.push(format!(
                "r={r} avg(1e7)={:.6} predicted={:.6} guaranteed radius={:.4}",
                big.value,
                pred.value,
                pred.prime_error_bound(big.normalization)
            ));
        }
        Self::result(
            6,
            "prime averages converge on a bounded-holes skeleton",
            true,
            checks,
            notes,
        )
    }

    fn semiprime_coincidence(&self) -> Result<CriterionResult> {
        let sk = self.bounded_skeleton()?;
        let table = self.table()?;
        let f = ObservableSpec::parity(2);
        let len = sk.resolved().len() as u64;
        let primes = prime_histogram(table, PRIME_LIMIT, len)?;
        let semis = semiprime_histogram(table, PRIME_LIMIT, len)?;
        let mut checks = Vec::new();
        let mut notes = Vec::new();
        for r in SHIFTS {
            let a = primes.average(&sk, &f, r)?;
            let s = semis.average(&sk, &f, r)?;
            checks.push(Check::le(
                format!("|semiprime avg - prime avg| at 1e7 r={r}"),
                (s.value - a.value).abs(),
                0.05,
            ));
            notes.push(format!(
                "r={r} prime={:.6} semiprime={:.6}",
                a.value, s.value
            ));
        }
        let shared =
            table.semiprime_noncoprime_count(PRIME_LIMIT, len, SemiprimeMode::SmallFactorPairs)?;
        notes.push(format!(
            "semiprimes sharing a factor with {len}: {:.4} of {}",
            shared as f64 / semis.total as f64,
            semis.total
        ));
        Self::result(
            7,
            "semiprime and prime averages coincide",
            true,
            checks,
            notes,
        )
    }

    fn dirichlet(&self) -> Result<CriterionResult> {
        let table = self.table()?;
        let mut checks = Vec::new();
        for n in [3u64, 4, 5, 8, 12, 30] {
            let h = table.residue_histogram(PRIME_LIMIT, n)?;
            let total: u64 = h.iter().sum();
            let expected = total as f64 / euler_phi(n) as f64;
            let worst = (0..n)
                .filter(|&a| gcd(a, n) == 1)
                .map(|a| (h[a as usize] as f64 / expected - 1.0).abs())
                .fold(0.0, f64::max);
            checks.push(Check::le(
                format!("max relative deviation mod {n}"),
                worst,
                0.05,
            ));
        }
        Self::result(
            8,
            "primes equidistribute in coprime classes",
            true,
            checks,
            vec![],
        )
    }

    fn polynomial_averages(&self) -> Result<CriterionResult> {
        let sk = self.bounded_skeleton()?;
        let f = ObservableSpec::parity(2);
        let sq = PolynomialSpec::square();
        let mut checks = Vec::new();
        let mut notes = Vec::new();
        for r in SHIFTS {
            let pred = predicted_poly_limit(&sk, &sq, PREDICTION_STAGE, &f, r)?;
            let avg = poly_average(&sk, &sq, &f, 1_000_000, r)?;
            checks.push(Check::le(
                format!("|square avg(1e6) - predicted(n_k={})| r={r}", pred.period),
                (avg.value - pred.value).abs(),
                0.02,
            ));
            notes.push(format!(
                "r={r} avg={:.6} predicted={:.6}",
                avg.value, pred.value
            ));
        }
        let mut mismatches = 0;
        let mut cases = 0;
        for word in [
            "01",
            "0110",
            "011010",
            "0100110101",
            "011011001010110010110010100101",
        ] {
            let per = ToeplitzSkeleton::new("01", vec![parse_word("01", word)?])?;
            let len = word.len() as u64;
            for p in ["m^2", "m^2+m", "m^3+2m+1"] {
                let p: PolynomialSpec = p.parse()?;
                for n in [1u64, 7, 100, 12345, 1_000_000] {
                    for r in SHIFTS {
                        let direct = crate::numeric::compensated_sum((0..len).map(|a| {
                            rho_count(&p, n, len, a as i64) as f64
                                * f.table()[per.eval(a as i64 + r) as usize]
                        })) / n as f64;
                        let got = poly_average(&per, &p, &f, n, r)?.value;
                        cases += 1;
                        mismatches += (got != direct) as u64;
                    }
                }
            }
        }
        checks.push(Check::count(
            "periodic averages equal residue decomposition exactly",
            mismatches,
            cases,
        ));
        Self::result(9, "polynomial averages converge", true, checks, notes)
    }

    fn squares(&self) -> Result<CriterionResult> {
        let cfg = BuildConfig {
            seed: self.cfg.seed,
            ..Default::default()
        };
        let b = build_squares_counterexample(&cfg)?;
        let sk = &b.skeleton;
        let beta = beta_for_support(&cfg.support)?;
        let certs = validate_all(
            sk,
            &Theorem::Squares {
                support: cfg.support.clone(),
            },
        )?;
        let mut checks = Vec::new();
        let constructive = constructive_stage_count(sk) - 1;
        checks.push(Check::new(
            "constructive stages",
            constructive.to_string(),
            "in",
            "2..=3".into(),
            (2..=3).contains(&constructive),
        ));
        let (mut sq_bad, mut sq_total) = (0, 0);
        for c in &certs {
            for name in ["sq3", "sq4", "sq5"] {
                if let Some(rec) = c.record(name) {
                    sq_total += 1;
                    sq_bad += (!rec.pass) as u64;
                }
            }
        }
        checks.push(Check::count("(sq3)-(sq5) records", sq_bad, sq_total));
        checks.push(Check::new(
            "(sq3)-(sq5) records present",
            sq_total.to_string(),
            ">=",
            "3".into(),
            sq_total >= 3,
        ));
        let stages: Vec<usize> = (1..constructive_stage_count(sk)).collect();
        let w = oscillation_witness(
            sk,
            &IndexSet::Polynomial(PolynomialSpec::square()),
            &ObservableSpec::parity(2),
            &stages,
            0,
            None,
        )?;
        let beta_f = *beta.numer() as f64 / *beta.denom() as f64;
        for p in w.iter().filter(|p| p.gap.is_some()) {
            checks.push(Check::ge(
                format!("square-average gap at n_{}={}", p.stage, p.scale),
                p.gap.unwrap(),
                beta_f,
            ));
        }
        Self::result(
            10,
            "squares construction destroys the polynomial average",
            false,
            checks,
            vec![format!("beta = {beta}")],
        )
    }

    fn sturmian(&self) -> Result<CriterionResult> {
        let table = self.table()?;
        let spec = RotationSpec::golden();
        let beta = fixed_to_f64(spec.beta);
        let ind = ObservableSpec::cylinder(2, &[0])?;
        let avg = prime_orbit_average(&spec, &ind, PRIME_LIMIT, table)?;
        let v = vinogradov_sum(spec.alpha, PRIME_LIMIT, table)?;
        let squeeze = squeeze_check(&spec, PRIME_LIMIT, 0.01, table)?;
        let cyl = ObservableSpec::cylinder(2, &[1, 0, 1])?;
        let three = prime_orbit_average(&spec, &cyl, PRIME_LIMIT, table)?;
        let mut notes = Vec::new();
        for n in [100_000u64, 1_000_000] {
            notes.push(format!(
                "exponential sum at N={n}: {:.6}",
                vinogradov_sum(spec.alpha, n, table)?
            ));
        }
        notes.push(format!(
            "rotation surrogate gap N|alpha - p/q| <= {:.3e}",
            spec.surrogate_gap(PRIME_LIMIT)
        ));
        let checks = vec![
            Check::le(
                "|prime-orbit average of [y(0)=0] - beta|",
                (avg.value - beta).abs(),
                0.01,
            ),
            Check::le("exponential sum over primes", v, 0.05),
            Check::le(
                "|prime-orbit average of [101] - atom length|",
                (three.value - three.predicted.unwrap_or(f64::NAN)).abs(),
                0.01,
            ),
            Check::new(
                "continuous approximants squeeze the indicator",
                format!(
                    "{:.6} <= {:.6} <= {:.6}",
                    squeeze.lower, squeeze.value, squeeze.upper
                ),
                "within",
                format!("eps={}", squeeze.eps),
                squeeze.holds,
            ),
        ];
        Self::result(11, "Sturmian prime-orbit averages", true, checks, notes)
    }

    /// Skeletons, certificates and average tables written by a run.
    pub fn artifacts(&self) -> Result<Vec<Artifact>> {
        let mut out = Vec::new();
        let (cfg, a) = self.theorem_a_build()?;
        out.push(Artifact {
            name: "theorem-a.skeleton".into(),
            bytes: a.skeleton.to_text()?.into_bytes(),
        });
        let certs = validate_all(&a.skeleton, &Theorem::A { growth: cfg.growth })?;
        out.push(Artifact {
            name: "theorem-a.certificates.jsonl".into(),
            bytes: certificates_to_json_lines(&certs)?.into_bytes(),
        });
        let sq = build_squares_counterexample(&BuildConfig {
            seed: self.cfg.seed,
            ..Default::default()
        })?;
        out.push(Artifact {
            name: "squares.skeleton".into(),
            bytes: sq.skeleton.to_text()?.into_bytes(),
        });
        out.push(Artifact {
            name: "squares.certificates.jsonl".into(),
            bytes: certificates_to_json_lines(&sq.certificates)?.into_bytes(),
        });
        let sk = self.bounded_skeleton()?;
        out.push(Artifact {
            name: "bounded-holes.skeleton".into(),
            bytes: sk.to_text()?.into_bytes(),
        });
        let table = self.table()?;
        let f = ObservableSpec::parity(2);
        let mut reports: Vec<AverageReport> = Vec::new();
        for r in SHIFTS {
            for n in [PRIME_LIMIT / 10, PRIME_LIMIT] {
                let mut rep = prime_average(&sk, &f, n, r, table)?;
                rep.predicted = Some(predicted_prime_limit(&sk, PREDICTION_STAGE, &f, r)?.value);
                reports.push(rep);
            }
            reports.push(crate::averaging::semiprime_average(
                &sk,
                &f,
                PRIME_LIMIT,
                r,
                table,
            )?);
            let mut rep = poly_average(&sk, &PolynomialSpec::square(), &f, 1_000_000, r)?;
            rep.predicted = Some(
                predicted_poly_limit(&sk, &PolynomialSpec::square(), PREDICTION_STAGE, &f, r)?
                    .value,
            );
            reports.push(rep);
        }
        reports.push(prime_orbit_average(
            &RotationSpec::golden(),
            &ObservableSpec::cylinder(2, &[0])?,
            PRIME_LIMIT,
            table,
        )?);
        let mut csv = Vec::new();
        let meta = vec![
            ("seed".to_string(), self.cfg.seed.to_string()),
            (
                "skeleton_periods".to_string(),
                format!("{BOUNDED_PERIODS:?}"),
            ),
            ("prediction_stage".to_string(), PREDICTION_STAGE.to_string()),
        ];
        write_reports_csv(&mut csv, &reports, &meta)?;
        out.push(Artifact {
            name: "averages.csv".into(),
            bytes: csv,
        });
        Ok(out)
    }

    fn reproducibility(&self) -> Result<CriterionResult> {
        let first = self.artifacts()?;
        let second = self.artifacts()?;
        let mut checks = vec![Check::new(
            "artifact count",
            first.len().to_string(),
            "==",
            second.len().to_string(),
            first.len() == second.len(),
        )];
        for (a, b) in first.iter().zip(&second) {
            checks.push(Check::new(
                format!("{} identical across runs", a.name),
                format!("{} bytes", a.bytes.len()),
                "==",
                format!("{} bytes", b.bytes.len()),
                a == b,
            ));
        }
        Self::result(
            12,
            "repeated runs give byte-identical artifacts",
            false,
            checks,
            vec![],
        )
    }
}

/// Runs the selected criteria in order.
pub fn run_suite(suite: &Suite) -> Result<Vec<CriterionResult>> {
    suite
        .selected()
        .into_iter()
        .map(|id| suite.run(id))
        .collect()
}
