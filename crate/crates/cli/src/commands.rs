use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dehnlab::dehn::{classify_points, dehn_function_with, family_dehn_function_with, GrowthClass, GrowthError};
use dehnlab::families::{FamilyError, FamilySpec, Validation};
use dehnlab::mean::{census_with, family_mean_with, presentation_mean, MeanError, MeanReport};
use dehnlab::presentation::PresentationError;
use dehnlab::realization::RealizationError;
use dehnlab::words::WordParseError;
use dehnlab::{
    coset_enumerate, cyclic_family_closed_forms, parse_presentation, verify_certificate, AreaError, AreaSolver,
    DehnError, DehnTable, FiniteRealization, Presentation, SearchConfig,
};
use log::{info, warn};
use thiserror::Error;

use crate::pool::Pool;
use crate::{Cli, Command, Common, Format, Target};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Presentation { path: PathBuf, source: PresentationError },
    #[error("cannot parse word: {0}")]
    Word(#[from] WordParseError),
    #[error(transparent)]
    Realization(#[from] RealizationError),
    #[error(transparent)]
    Area(#[from] AreaError),
    #[error(transparent)]
    Dehn(#[from] DehnError),
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error("word is not null-homotopic: it evaluates to the group element {element}")]
    NotNullHomotopic { element: String },
    #[error("certificate does not reproduce the word")]
    BadCertificate,
    #[error("closed-form mismatch at n = {n}: computed {computed}, closed form {expected}")]
    OracleMismatch { n: usize, computed: String, expected: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{0}")]
    Usage(String),
    #[error("table {path}: {message}")]
    Table { path: PathBuf, message: String },
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

pub enum Outcome {
    Done,
    /// Some reported value is only an upper bound.
    Inexact,
}

impl Outcome {
    fn from_exact(exact: bool) -> Self {
        if exact {
            Outcome::Done
        } else {
            Outcome::Inexact
        }
    }
}

struct Env<'a> {
    common: &'a Common,
    cfg: SearchConfig,
    pool: Pool,
}

impl Env<'_> {
    fn coset_budget(&self) -> usize {
        self.common.coset_budget as usize
    }

    fn emit(&self, body: &str) -> Result<(), CliError> {
        match &self.common.out {
            Some(path) => fs::write(path, body).map_err(|source| CliError::Write { path: path.clone(), source }),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(body.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Write { path: "<stdout>".into(), source })
            }
        }
    }

    fn emit_json(&self, value: &serde_json::Value) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
        s.push('\n');
        self.emit(&s)
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let c = &cli.common;
    let jobs =
        c.jobs.map(|j| j as usize).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let env = Env {
        common: c,
        cfg: SearchConfig {
            max_intermediate_length: c.caps_length as usize,
            max_area: c.caps_area as usize,
            state_budget: c.caps_states as usize,
        },
        pool: Pool::new(jobs)?,
    };
    info!("{jobs} worker threads, caps {:?}", env.cfg);
    match &cli.command {
        Command::Area { presentation, word, certificate } => cmd_area(&env, presentation, word, certificate.as_deref()),
        Command::Dehn { target, nmax } => cmd_dehn(&env, target, *nmax),
        Command::Mean { target, nmax, oracle } => cmd_mean(&env, target, *nmax, *oracle, false),
        Command::Smean { target, nmax, oracle } => cmd_mean(&env, target, *nmax, *oracle, true),
        Command::Census { presentation, nmax } => cmd_census(&env, presentation, *nmax),
        Command::Validate { family, params, nmax } => cmd_validate(&env, family, params, *nmax),
        Command::Growth { target, nmax, table } => cmd_growth(&env, target, *nmax, table.as_deref()),
    }
}

fn load_presentation(path: &Path) -> Result<Presentation, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    let parsed = parse_presentation(&text).map_err(|source| CliError::Presentation { path: path.into(), source })?;
    for w in &parsed.warnings {
        warn!("{}: {w}", path.display());
    }
    Ok(parsed.presentation)
}

fn realize(env: &Env, p: &Presentation) -> Result<FiniteRealization, CliError> {
    Ok(coset_enumerate(p, env.coset_budget())?)
}

fn cmd_area(env: &Env, path: &Path, word: &str, cert_path: Option<&Path>) -> Result<Outcome, CliError> {
    let p = load_presentation(path)?;
    let w = p.parse_word(word)?;
    let realization = match coset_enumerate(&p, env.coset_budget()) {
        Ok(r) => {
            let e = r.evaluate(&w)?;
            if e != FiniteRealization::IDENTITY {
                let rep = r.representative(e);
                return Err(CliError::NotNullHomotopic { element: format!("#{e} = {}", p.show(&rep)) });
            }
            Some(r)
        }
        Err(e) => {
            warn!("{e}; searching without a realization");
            None
        }
    };
    let solver = AreaSolver::with_realization(&p, realization);
    let res = solver.search(&w, &env.cfg)?;
    if !verify_certificate(&res.certificate, &w, &p) {
        return Err(CliError::BadCertificate);
    }
    let cert = res.certificate.to_json(&w, &p, res.exact);
    if let Some(cp) = cert_path {
        let mut s = serde_json::to_string_pretty(&cert).expect("json value serializes");
        s.push('\n');
        fs::write(cp, s).map_err(|source| CliError::Write { path: cp.into(), source })?;
    }
    let shown = cert_path.map(|c| c.display().to_string());
    match env.common.format {
        Format::Text => {
            let mut s = format!("area={} exact={}\n", res.area, res.exact);
            if let Some(c) = &shown {
                s.push_str(&format!("certificate={c}\n"));
            }
            env.emit(&s)?;
        }
        Format::Csv => env.emit(&format!("word,area,exact\n{},{},{}\n", p.show(&w), res.area, res.exact))?,
        Format::Json => env.emit_json(&serde_json::json!({
            "word": p.show(&w),
            "area": res.area,
            "exact": res.exact,
            "certificate_path": shown,
            "certificate": cert,
        }))?,
    }
    Ok(Outcome::from_exact(res.exact))
}

enum Subject {
    Single(Presentation),
    Family(FamilySpec),
}

fn subject(target: &Target) -> Result<Subject, CliError> {
    match (&target.presentation, &target.family) {
        (Some(path), None) => {
            if !target.params.is_empty() {
                return Err(CliError::Usage("--param only applies to --family".into()));
            }
            Ok(Subject::Single(load_presentation(path)?))
        }
        (None, Some(name)) => Ok(Subject::Family(FamilySpec::parse(name, &target.params)?)),
        _ => Err(CliError::Usage("give a presentation file or --family NAME".into())),
    }
}

fn compute_table(env: &Env, target: &Target, nmax: usize) -> Result<DehnTable, CliError> {
    Ok(match subject(target)? {
        Subject::Single(p) => {
            let r = realize(env, &p)?;
            dehn_function_with(&p, &r, nmax, &env.cfg, &env.pool)?
        }
        Subject::Family(f) => {
            if !f.relevance_justified() {
                warn!(
                    "family {} is truncated at member parameter <= {}; the supremum is not proven exhaustive",
                    f.name(),
                    f.cutoff.unwrap_or(nmax as u64)
                );
            }
            family_dehn_function_with(&f, nmax, &env.cfg, env.coset_budget(), &env.pool)?
        }
    })
}

fn growth_line(g: &Result<GrowthClass, GrowthError>) -> String {
    match g {
        Ok(g) => {
            let errs: Vec<String> = g.fit_errors.iter().map(|(l, e)| format!("{l}={e:.4}")).collect();
            format!("growth: {} (residuals {}; {})", g.label, errs.join(" "), g.disclaimer)
        }
        Err(e) => format!("growth: not classified ({e})"),
    }
}

fn growth_json(g: &Result<GrowthClass, GrowthError>) -> serde_json::Value {
    match g {
        Ok(g) => serde_json::to_value(g).expect("growth serializes"),
        Err(e) => serde_json::json!({ "label": null, "error": e.to_string() }),
    }
}

fn table_points(t: &DehnTable) -> Vec<(f64, f64)> {
    t.entries.iter().filter(|e| e.exact).map(|e| (e.n as f64, e.delta as f64)).collect()
}

fn cmd_dehn(env: &Env, target: &Target, nmax: usize) -> Result<Outcome, CliError> {
    let t = compute_table(env, target, nmax)?;
    let g = classify_points(&table_points(&t));
    match env.common.format {
        Format::Csv => {
            env.emit(&t.to_csv())?;
            eprintln!("{}", growth_line(&g));
        }
        Format::Json => {
            let mut v = t.to_json();
            v["growth"] = growth_json(&g);
            env.emit_json(&v)?;
        }
        Format::Text => env.emit(&format!("{}{}\n", t.to_text(), growth_line(&g)))?,
    }
    Ok(Outcome::from_exact(t.is_exact()))
}

fn cmd_growth(env: &Env, target: &Target, nmax: Option<usize>, table: Option<&Path>) -> Result<Outcome, CliError> {
    let (points, exact) = match table {
        Some(path) => (read_table(path)?, true),
        None => {
            let nmax = nmax.ok_or_else(|| CliError::Usage("--nmax is required without --table".into()))?;
            let t = compute_table(env, target, nmax)?;
            (table_points(&t), t.is_exact())
        }
    };
    let g = classify_points(&points)?;
    match env.common.format {
        Format::Json => env.emit_json(&growth_json(&Ok(g)))?,
        Format::Csv => {
            let mut s = String::from("model,residual\n");
            for (l, e) in &g.fit_errors {
                s.push_str(&format!("{l},{e}\n"));
            }
            s.push_str(&format!("label,{}\n", g.label));
            env.emit(&s)?;
        }
        Format::Text => env.emit(&format!("{}\n", growth_line(&Ok(g))))?,
    }
    Ok(Outcome::from_exact(exact))
}

/// Exact `(n, delta)` rows of a CSV table.
fn read_table(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let bad = |message: String| CliError::Table { path: path.into(), message };
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col =
        |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| bad(format!("missing column `{name}`")));
    let (cn, cd, ce) = (col("n")?, col("delta")?, col("exact")?);
    let mut pts = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let n: f64 = field(cn).parse().map_err(|_| bad(format!("bad n `{}`", field(cn))))?;
        let d: f64 = field(cd).parse().map_err(|_| bad(format!("bad delta `{}`", field(cd))))?;
        if field(ce) == "true" {
            pts.push((n, d));
        }
    }
    Ok(pts)
}

fn cmd_mean(env: &Env, target: &Target, n: usize, oracle: bool, spherical: bool) -> Result<Outcome, CliError> {
    let subj = subject(target)?;
    let is_g1 = matches!(&subj, Subject::Family(f) if f.name() == "G1" && f.fixed.is_empty());
    if oracle && !is_g1 {
        return Err(CliError::Usage("--oracle compares with closed forms for the whole G1 family only".into()));
    }
    let report: MeanReport = match subj {
        Subject::Single(p) => {
            let r = realize(env, &p)?;
            presentation_mean(&p, &r, n, &env.cfg, &env.pool)?
        }
        Subject::Family(f) => family_mean_with(&f, n, &env.cfg, env.coset_budget(), &env.pool)?,
    };
    if !spherical && report.mean.is_none() {
        return Err(MeanError::EmptyBall { n }.into());
    }
    let mut oracle_line = None;
    if oracle {
        if n < 2 {
            return Err(CliError::Usage("closed forms need n >= 2".into()));
        }
        let (mean, smean) = cyclic_family_closed_forms(n as u64);
        let (computed, expected) = if spherical { (Some(report.smean), smean) } else { (report.mean, mean) };
        if computed != Some(expected) {
            return Err(CliError::OracleMismatch {
                n,
                computed: computed.map_or("undefined".into(), |c| c.to_string()),
                expected: expected.to_string(),
            });
        }
        oracle_line = Some(format!("oracle: match ({} = {expected})", if spherical { "smean" } else { "mean" }));
    }
    match env.common.format {
        Format::Text => {
            let mut s = report.to_text();
            if let Some(o) = &oracle_line {
                s.push_str(o);
                s.push('\n');
            }
            env.emit(&s)?;
        }
        Format::Csv => {
            env.emit(&report.to_csv())?;
            if let Some(o) = &oracle_line {
                eprintln!("{o}");
            }
        }
        Format::Json => {
            let mut v = report.to_json();
            v["quantity"] = serde_json::json!(if spherical { "smean" } else { "mean" });
            if oracle {
                v["oracle"] = serde_json::json!("match");
            }
            env.emit_json(&v)?;
        }
    }
    Ok(Outcome::Done)
}

fn cmd_census(env: &Env, path: &Path, n: usize) -> Result<Outcome, CliError> {
    let p = load_presentation(path)?;
    let r = realize(env, &p)?;
    let c = census_with(&p, &r, n, &env.cfg, &env.pool)?;
    match env.common.format {
        Format::Csv => env.emit(&c.to_csv(&p))?,
        Format::Json => {
            let ball: Vec<serde_json::Value> = c
                .ball
                .iter()
                .map(|(w, a)| serde_json::json!({ "word": p.show(w), "length": w.len(), "area": a }))
                .collect();
            env.emit_json(&serde_json::json!({ "n": n, "ball": ball, "sphere_size": c.sphere().count() }))?;
        }
        Format::Text => {
            let mut s = format!(
                "{} null-homotopic words of length <= {n} ({} of length {n})\n",
                c.ball.len(),
                c.sphere().count()
            );
            for (w, a) in &c.ball {
                s.push_str(&format!("{:>4}  {}\n", a, p.show(w)));
            }
            env.emit(&s)?;
        }
    }
    Ok(Outcome::Done)
}

const MEMBER_KEYS: [&str; 4] = ["p", "q", "k", "n"];

/// `2,3,5` or `2..8` (inclusive).
fn expand_values(key: &str, v: &str) -> Result<Vec<String>, CliError> {
    if let Some((a, b)) = v.split_once("..") {
        let parse =
            |s: &str| s.trim().parse::<u64>().map_err(|_| CliError::Usage(format!("bad range `{v}` for `{key}`")));
        let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
        return Ok((a..=b).map(|x| x.to_string()).collect());
    }
    Ok(v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
}

fn cmd_validate(env: &Env, family: &str, params: &[(String, String)], nmax: usize) -> Result<Outcome, CliError> {
    let mut fixed: Vec<(String, Vec<String>)> = Vec::new();
    let mut rest: Vec<(String, String)> = Vec::new();
    for (k, v) in params {
        if MEMBER_KEYS.contains(&k.as_str()) {
            fixed.push((k.clone(), expand_values(k, v)?));
        } else {
            rest.push((k.clone(), v.clone()));
        }
    }
    // Cartesian product of the member parameter lists.
    let mut combos: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (k, vs) in &fixed {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                vs.iter().map(move |v| {
                    let mut c = c.clone();
                    c.push((k.clone(), v.clone()));
                    c
                })
            })
            .collect();
    }
    let mut results: Vec<Validation> = Vec::new();
    for combo in combos {
        let mut all = rest.clone();
        all.extend(combo);
        let spec = FamilySpec::parse(family, &all)?;
        for m in spec.relevance_bound(nmax)? {
            results.push(spec.validate_member(&m, env.coset_budget())?);
        }
    }
    if results.is_empty() {
        return Err(CliError::Validation(format!("no members of {family} selected")));
    }
    match env.common.format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = results
                .iter()
                .map(|v| {
                    let checks: Vec<serde_json::Value> = v
                        .checks
                        .iter()
                        .map(|c| serde_json::json!({ "check": c.name, "passed": c.passed, "detail": c.detail }))
                        .collect();
                    serde_json::json!({ "member": v.member, "order": v.order, "passed": v.passed(), "checks": checks })
                })
                .collect();
            env.emit_json(&serde_json::json!({ "family": family.to_ascii_uppercase(), "members": rows }))?;
        }
        Format::Csv => {
            let mut s = String::from("member,order,check,passed,detail\n");
            for v in &results {
                for c in &v.checks {
                    s.push_str(&format!(
                        "\"{}\",{},{},{},\"{}\"\n",
                        v.member,
                        v.order,
                        c.name,
                        c.passed,
                        c.detail.replace('"', "\"\"")
                    ));
                }
            }
            env.emit(&s)?;
        }
        Format::Text => {
            let mut s = String::new();
            for v in &results {
                s.push_str(&format!("{} {}: order {}\n", family.to_ascii_uppercase(), v.member, v.order));
                for c in &v.checks {
                    let mark = if c.passed { "ok  " } else { "FAIL" };
                    s.push_str(&format!("  {mark} {}: {}\n", c.name, c.detail));
                }
            }
            env.emit(&s)?;
        }
    }
    let failed: Vec<String> =
        results.iter().flat_map(|v| v.failures().map(move |c| format!("{} {}", v.member, c.name))).collect();
    if failed.is_empty() {
        Ok(Outcome::Done)
    } else {
        Err(CliError::Validation(failed.join("; ")))
    }
}
