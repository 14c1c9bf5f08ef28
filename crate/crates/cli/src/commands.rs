use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use log::info;
use serde::{Deserialize, Serialize};
use serde_json::json;

use toeplitz_pnt::acceptance::{run_suite, AcceptanceConfig, Suite};
use toeplitz_pnt::arith::{factorize, PrimeTable};
use toeplitz_pnt::averaging::{
    oscillation_witness, poly_histogram, predicted_poly_limit, predicted_prime_limit,
    prime_histogram, semiprime_histogram, write_reports_csv, AverageReport, IndexSet,
    ObservableSpec,
};
use toeplitz_pnt::constructions::{
    build_bounded_holes_seeded, build_spnt_counterexample, build_squares_counterexample,
    build_theorem_a, certificates_to_json_lines, constructive_stage_count, validate_all,
    BuildConfig, FillPolicy, StageCertificate, Theorem,
};
use toeplitz_pnt::polyres::{albis_bound_check, residue_profile, PolynomialSpec};
use toeplitz_pnt::sturmian::{
    fixed_from_f64, prime_orbit_average, squeeze_check, vinogradov_sum, RotationSpec,
};
use toeplitz_pnt::{Error, ToeplitzSkeleton};

use crate::config::metadata;

/// Outcome of a command that ran to completion.
pub enum Status {
    Pass,
    /// Checks ran and at least one failed; the record goes to stderr.
    Fail(serde_json::Value),
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        _ => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn write_meta(out: &mut dyn Write, meta: &[(String, String)]) -> Result<()> {
    for (k, v) in meta {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

fn read_skeleton(path: &Path) -> Result<ToeplitzSkeleton> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading skeleton {}", path.display()))?;
    Ok(ToeplitzSkeleton::from_text(&text)?)
}

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    Error::Config(msg.into()).into()
}

fn index_set(kind: &str, poly: Option<&str>) -> Result<IndexSet> {
    Ok(match kind {
        "primes" => IndexSet::Primes,
        "semiprimes" => IndexSet::Semiprimes,
        "poly" => IndexSet::Polynomial(poly.unwrap_or("m^2").parse()?),
        other => {
            return Err(config_error(format!(
                "unknown index kind `{other}` (primes, semiprimes, poly)"
            )))
        }
    })
}

fn certificate_failures(certs: &[StageCertificate]) -> Status {
    let failed: Vec<_> = certs
        .iter()
        .flat_map(|c| c.failures())
        .map(|r| json!({ "stage": r.stage, "condition": r.condition, "lhs": r.lhs, "relation": r.relation, "rhs": r.rhs }))
        .collect();
    if failed.is_empty() {
        Status::Pass
    } else {
        Status::Fail(json!({ "kind": "certificate", "failed": failed }))
    }
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConstructArgs {
    /// A, spnt, squares or bounded.
    #[arg(long)]
    pub theorem: Option<String>,
    /// Growth constant c.
    #[arg(long)]
    pub c: Option<u64>,
    /// Stored stages including the base stage.
    #[arg(long)]
    pub stages: Option<usize>,
    /// Largest admissible period.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// alternating-target or seeded-random.
    #[arg(long)]
    pub fill: Option<String>,
    #[arg(long)]
    pub spread: Option<u64>,
    /// Prime support for squares, e.g. 2,3,5.
    #[arg(long, value_delimiter = ',')]
    pub support: Option<Vec<u64>>,
    /// Oscillation target of the witness.
    #[arg(long)]
    pub target: Option<f64>,
    /// Nested periods for bounded, e.g. 2,6,30.
    #[arg(long, value_delimiter = ',')]
    pub periods: Option<Vec<u64>>,
    /// Holes kept per stage for bounded.
    #[arg(long)]
    pub holes: Option<u64>,
    #[arg(long)]
    pub alphabet: Option<u32>,
    /// Skeleton output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Certificate output (default: <out>.certificates.jsonl).
    #[arg(long)]
    pub certificates: Option<PathBuf>,
}

impl ConstructArgs {
    fn build_config(&self) -> Result<BuildConfig> {
        let d = BuildConfig::default();
        let fill = match &self.fill {
            Some(f) => serde_json::from_value::<FillPolicy>(json!(f))
                .map_err(|_| config_error(format!("unknown fill policy `{f}`")))?,
            None => d.fill_policy,
        };
        let cfg = BuildConfig {
            growth: self.c.unwrap_or(d.growth),
            stage_budget: self.stages.unwrap_or(d.stage_budget),
            modulus_budget: self.budget.unwrap_or(d.modulus_budget),
            fill_policy: fill,
            oscillation_target: self.target.unwrap_or(d.oscillation_target),
            seed: self.seed.unwrap_or(d.seed),
            spread: self.spread.unwrap_or(d.spread),
            support: self.support.clone().unwrap_or(d.support),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn construct(a: &ConstructArgs) -> Result<Status> {
    let out = a
        .out
        .as_deref()
        .ok_or_else(|| config_error("construct needs --out"))?;
    let theorem = a
        .theorem
        .as_deref()
        .ok_or_else(|| config_error("construct needs --theorem"))?;
    let cfg = a.build_config()?;
    let build = match theorem {
        "A" | "a" => build_theorem_a(&cfg)?,
        "spnt" => build_spnt_counterexample(&cfg)?,
        "squares" => build_squares_counterexample(&cfg)?,
        "bounded" => {
            let periods = a
                .periods
                .as_deref()
                .ok_or_else(|| config_error("bounded needs --periods"))?;
            let sk = build_bounded_holes_seeded(
                a.alphabet.unwrap_or(2),
                periods,
                a.holes.unwrap_or(1),
                cfg.seed,
            )?;
            fs::write(out, sk.to_text()?).with_context(|| format!("writing {}", out.display()))?;
            info!("bounded-holes skeleton with periods {periods:?}");
            return Ok(Status::Pass);
        }
        other => {
            return Err(config_error(format!(
                "unknown theorem `{other}` (A, spnt, squares, bounded)"
            )))
        }
    };
    fs::write(out, build.skeleton.to_text()?)
        .with_context(|| format!("writing {}", out.display()))?;
    let cert_path = a
        .certificates
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.certificates.jsonl", out.display())));
    fs::write(&cert_path, certificates_to_json_lines(&build.certificates)?)
        .with_context(|| format!("writing {}", cert_path.display()))?;
    info!(
        "periods {:?}, multipliers {:?}",
        build.periods(),
        build.multipliers
    );
    Ok(certificate_failures(&build.certificates))
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ValidateArgs {
    #[arg(long)]
    pub skeleton: Option<PathBuf>,
    /// A, spnt or squares (default: the skeleton's metadata).
    #[arg(long)]
    pub theorem: Option<String>,
    #[arg(long)]
    pub c: Option<u64>,
    #[arg(long)]
    pub spread: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub support: Option<Vec<u64>>,
    /// Certificate output (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn validate(a: &ValidateArgs) -> Result<Status> {
    let path = a
        .skeleton
        .as_deref()
        .ok_or_else(|| config_error("validate needs --skeleton"))?;
    let sk = read_skeleton(path)?;
    let meta = sk.metadata();
    let num = |key: &str, flag: Option<u64>, default: u64| -> u64 {
        flag.or_else(|| meta.get(key).and_then(|v| v.parse().ok()))
            .unwrap_or(default)
    };
    let d = BuildConfig::default();
    let theorem = match a.theorem.as_deref() {
        None => Theorem::from_metadata(meta)?,
        Some("A" | "a") => Theorem::A {
            growth: num("growth", a.c, d.growth),
        },
        Some("spnt") => Theorem::Spnt {
            growth: num("growth", a.c, d.growth),
            spread: num("spread", a.spread, d.spread),
        },
        Some("squares") => Theorem::Squares {
            support: match &a.support {
                Some(s) => s.clone(),
                None => meta
                    .get("support")
                    .map(|s| toeplitz_pnt::constructions::parse_list(s))
                    .transpose()?
                    .unwrap_or(d.support),
            },
        },
        Some(other) => {
            return Err(config_error(format!(
                "unknown theorem `{other}` (A, spnt, squares)"
            )))
        }
    };
    let certs = validate_all(&sk, &theorem)?;
    let mut out = open_out(a.out.as_deref())?;
    out.write_all(certificates_to_json_lines(&certs)?.as_bytes())?;
    out.flush()?;
    Ok(certificate_failures(&certs))
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct AverageArgs {
    #[arg(long)]
    pub skeleton: Option<PathBuf>,
    /// primes, semiprimes or poly.
    #[arg(long)]
    pub kind: Option<String>,
    /// Polynomial for --kind poly, e.g. m^2+m.
    #[arg(long)]
    pub poly: Option<String>,
    /// Comma-separated N values.
    #[arg(long = "N", value_delimiter = ',')]
    #[serde(rename = "N")]
    pub n: Option<Vec<u64>>,
    /// Comma-separated shifts r.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub r: Option<Vec<i64>>,
    /// parity, constant:<c> or cylinder:<s,s,s>.
    #[arg(long)]
    pub observable: Option<String>,
    /// Stage whose predicted limit is reported.
    #[arg(long)]
    pub predict_stage: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn average(a: &AverageArgs) -> Result<Status> {
    let ns = a.n.clone().unwrap_or_default();
    if ns.is_empty() || ns.contains(&0) {
        return Err(config_error(format!(
            "N must be a non-empty list of positive integers, got {ns:?}"
        )));
    }
    let kind = index_set(
        a.kind
            .as_deref()
            .ok_or_else(|| config_error("average needs --kind"))?,
        a.poly.as_deref(),
    )?;
    let sk = read_skeleton(
        a.skeleton
            .as_deref()
            .ok_or_else(|| config_error("average needs --skeleton"))?,
    )?;
    let f = ObservableSpec::parse(
        a.observable.as_deref().unwrap_or("parity"),
        sk.alphabet_size(),
    )?;
    let rs = a.r.clone().unwrap_or_else(|| vec![0]);
    let len = sk.resolved().len() as u64;
    let max_n = *ns.iter().max().unwrap();
    let table = match kind {
        IndexSet::Polynomial(_) => None,
        _ => Some(PrimeTable::new(max_n.max(2))?),
    };
    let mut reports: Vec<AverageReport> = Vec::new();
    for &n in &ns {
        info!("{} up to N = {n}", kind.name());
        let h = match &kind {
            IndexSet::Primes => prime_histogram(table.as_ref().unwrap(), n, len)?,
            IndexSet::Semiprimes => semiprime_histogram(table.as_ref().unwrap(), n, len)?,
            IndexSet::Polynomial(p) => poly_histogram(p, n, len)?,
        };
        for &r in &rs {
            let mut rep = h.average(&sk, &f, r)?;
            if let Some(k) = a.predict_stage {
                match &kind {
                    IndexSet::Primes | IndexSet::Semiprimes => {
                        let p = predicted_prime_limit(&sk, k, &f, r)?;
                        rep.predicted = Some(p.value);
                        if kind == IndexSet::Primes {
                            rep.error_bound = Some(p.prime_error_bound(rep.normalization));
                        }
                    }
                    IndexSet::Polynomial(poly) => {
                        let p = predicted_poly_limit(&sk, poly, k, &f, r)?;
                        rep.predicted = Some(p.value);
                        rep.error_bound = Some(p.poly_error_bound(n));
                    }
                }
            }
            reports.push(rep);
        }
    }
    let mut out = open_out(a.out.as_deref())?;
    write_reports_csv(&mut out, &reports, &metadata("average", a)?)?;
    Ok(Status::Pass)
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct OscillateArgs {
    #[arg(long)]
    pub skeleton: Option<PathBuf>,
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub poly: Option<String>,
    /// Stages whose scales are used (default: every constructive stage after the base).
    #[arg(long, value_delimiter = ',')]
    pub stages: Option<Vec<usize>>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<i64>,
    #[arg(long)]
    pub observable: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn oscillate(a: &OscillateArgs) -> Result<Status> {
    let kind = index_set(a.kind.as_deref().unwrap_or("primes"), a.poly.as_deref())?;
    let sk = read_skeleton(
        a.skeleton
            .as_deref()
            .ok_or_else(|| config_error("oscillate needs --skeleton"))?,
    )?;
    let f = ObservableSpec::parse(
        a.observable.as_deref().unwrap_or("parity"),
        sk.alphabet_size(),
    )?;
    let stages = a
        .stages
        .clone()
        .unwrap_or_else(|| (1..constructive_stage_count(&sk).max(1)).collect());
    if stages.is_empty() {
        return Err(config_error("no stages to evaluate"));
    }
    let mut max_scale = 2;
    for &t in &stages {
        max_scale = max_scale.max(sk.stage(t)?.period);
    }
    let table = match kind {
        IndexSet::Polynomial(_) => None,
        _ => Some(PrimeTable::new(max_scale)?),
    };
    let points = oscillation_witness(&sk, &kind, &f, &stages, a.r.unwrap_or(0), table.as_ref())?;
    let mut out = open_out(a.out.as_deref())?;
    writeln!(out, "kind,stage,scale,normalization,value,gap")?;
    for p in &points {
        let gap = p.gap.map(|g| g.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{gap}",
            kind.name(),
            p.stage,
            p.scale,
            p.normalization,
            p.value
        )?;
    }
    write_meta(&mut out, &metadata("oscillate", a)?)?;
    out.flush()?;
    Ok(Status::Pass)
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ResiduesArgs {
    /// Polynomial, e.g. m^2 or m^3+2m+1.
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(long)]
    pub from: Option<u64>,
    #[arg(long)]
    pub to: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn residues(a: &ResiduesArgs) -> Result<Status> {
    let p: PolynomialSpec = a.poly.as_deref().unwrap_or("m^2").parse()?;
    let from = a.from.unwrap_or(1).max(1);
    let to = a.to.ok_or_else(|| config_error("residues needs --to"))?;
    if to < from {
        return Err(config_error(format!("empty range {from}..={to}")));
    }
    let mut out = open_out(a.out.as_deref())?;
    writeln!(out, "n,psi,rho_max,omega,radical,rho_bound_holds")?;
    let mut all_hold = true;
    for n in from..=to {
        let prof = residue_profile(&p, n);
        let fac = factorize(n);
        let holds = albis_bound_check(&p, n);
        all_hold &= holds;
        writeln!(
            out,
            "{n},{},{},{},{},{holds}",
            prof.psi(),
            prof.rho_max(),
            fac.omega(),
            fac.radical()
        )?;
    }
    write_meta(&mut out, &metadata("residues", a)?)?;
    out.flush()?;
    Ok(if all_hold {
        Status::Pass
    } else {
        Status::Fail(json!({ "kind": "residue_bound", "polynomial": p.to_string() }))
    })
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SturmianArgs {
    /// Comma-separated N values.
    #[arg(long = "N", value_delimiter = ',')]
    #[serde(rename = "N")]
    pub n: Option<Vec<u64>>,
    /// Width of the continuous approximants.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Cut point in (0, 1) (default: alpha).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Centred cylinder word, e.g. 1,0,1.
    #[arg(long, value_delimiter = ',')]
    pub cylinder: Option<Vec<u32>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn sturmian(a: &SturmianArgs) -> Result<Status> {
    let ns =
        a.n.clone()
            .unwrap_or_else(|| vec![100_000, 1_000_000, 10_000_000]);
    if ns.is_empty() || ns.iter().any(|&n| n < 2) {
        return Err(config_error(format!(
            "N must be a non-empty list of integers >= 2, got {ns:?}"
        )));
    }
    let mut spec = RotationSpec::golden();
    if let Some(b) = a.beta {
        if !(b > 0.0 && b < 1.0) {
            return Err(config_error(format!("beta must lie in (0, 1), got {b}")));
        }
        spec.beta = fixed_from_f64(b)?;
    }
    let word = a.cylinder.clone().unwrap_or_else(|| vec![0]);
    let f = ObservableSpec::cylinder(2, &word)?;
    let eps = a.eps.unwrap_or(0.01);
    let table = PrimeTable::new(*ns.iter().max().unwrap())?;
    let label: Vec<String> = word.iter().map(|s| s.to_string()).collect();
    let mut reports = Vec::new();
    let mut squeezed = true;
    for &n in &ns {
        info!("rotation orbit up to N = {n}");
        let mut rep = prime_orbit_average(&spec, &f, n, &table)?;
        rep.kind = format!("sturmian:cylinder:{}", label.join(" "));
        let pi = rep.normalization;
        reports.push(rep);
        reports.push(AverageReport {
            kind: "exp-sum".into(),
            n,
            r: 0,
            value: vinogradov_sum(spec.alpha, n, &table)?,
            normalization: pi,
            predicted: Some(0.0),
            error_bound: None,
        });
        let sq = squeeze_check(&spec, n, eps, &table)?;
        squeezed &= sq.holds;
        for (kind, value, integral) in [
            ("squeeze-lower", sq.lower, sq.integral_lower),
            ("squeeze-upper", sq.upper, sq.integral_upper),
        ] {
            reports.push(AverageReport {
                kind: kind.into(),
                n,
                r: 0,
                value,
                normalization: pi,
                predicted: Some(integral),
                error_bound: Some(eps),
            });
        }
    }
    let mut meta = metadata("sturmian", a)?;
    if let Some(c) = spec.convergent {
        meta.push(("alpha".into(), format!("{}/{}", c.p, c.q)));
    }
    meta.push((
        "surrogate_gap".into(),
        format!("{:e}", spec.surrogate_gap(*ns.iter().max().unwrap())),
    ));
    let mut out = open_out(a.out.as_deref())?;
    write_reports_csv(&mut out, &reports, &meta)?;
    Ok(if squeezed {
        Status::Pass
    } else {
        Status::Fail(json!({ "kind": "squeeze", "eps": eps }))
    })
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct AcceptanceArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Criteria to run, e.g. 1,2,5 (default all).
    #[arg(long, value_delimiter = ',')]
    pub criteria: Option<Vec<u8>>,
    /// Directory for artifacts and results.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

pub fn acceptance(a: &AcceptanceArgs) -> Result<Status> {
    let cfg = AcceptanceConfig {
        seed: a.seed.unwrap_or(0),
        criteria: a.criteria.clone().unwrap_or_default(),
    };
    let suite = Suite::new(cfg);
    let results = run_suite(&suite)?;
    let mut stdout = io::stdout().lock();
    for r in &results {
        writeln!(stdout, "{}", r.summary())?;
    }
    stdout.flush()?;
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for art in suite.artifacts()? {
            fs::write(dir.join(&art.name), &art.bytes)?;
        }
        let mut lines = String::new();
        for r in &results {
            let mut r = r.clone();
            r.checks.retain(|c| !c.timing);
            lines.push_str(&serde_json::to_string(&r)?);
            lines.push('\n');
        }
        fs::write(dir.join("acceptance.jsonl"), lines)?;
    }
    let failed: Vec<u8> = results
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.id)
        .collect();
    Ok(if failed.is_empty() {
        Status::Pass
    } else {
        Status::Fail(json!({ "kind": "acceptance", "failed_criteria": failed }))
    })
}
