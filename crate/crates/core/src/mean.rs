//! Mean and spherical-mean Dehn functions.
//!
//! The ball counts every freely reduced nonempty null-homotopic word,
//! inverses included. For one-generator cyclic groups this doubles both the
//! area sum and the word count relative to listing positive powers only, so
//! the means agree with the positive-power closed forms.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::area::{AreaSolver, SearchConfig};
use crate::dehn::{csv_field, enumerate_null_words, word_areas, DehnError};
use crate::exec::{Executor, Serial};
use crate::families::{is_prime, primes_up_to, FamilyError, FamilySpec};
use crate::presentation::Presentation;
use crate::realization::{coset_enumerate, FiniteRealization, DEFAULT_COSET_BUDGET};
use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeanError {
    #[error("the ball of radius {n} contains no null-homotopic words; the mean is undefined")]
    EmptyBall { n: usize },
    #[error("area of `{word}` is only an upper bound; raise the search caps")]
    InexactArea { word: String },
    #[error("family {family} has no proof that finitely many members contribute; refusing to pool")]
    FinitenessNotEstablished { family: String },
    #[error(transparent)]
    Dehn(#[from] DehnError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

pub const COUNTING_NOTE: &str =
    "ball and sphere count every reduced word including inverses; for <a | a^p> that is twice the positive powers, which leaves the means unchanged";

/// Null-homotopic words of length `<= n` with their exact areas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullWordCensus {
    pub n: usize,
    /// Length-lex ordered.
    pub ball: Vec<(Word, usize)>,
}

impl NullWordCensus {
    pub fn sphere(&self) -> impl Iterator<Item = &(Word, usize)> {
        self.ball.iter().filter(move |(w, _)| w.len() == self.n)
    }

    pub fn tally(&self) -> Tally {
        let mut t = Tally::default();
        for (w, a) in &self.ball {
            t.ball_size += 1;
            t.ball_area += *a as u64;
            if w.len() == self.n {
                t.sphere_size += 1;
                t.sphere_area += *a as u64;
            }
        }
        t
    }

    pub fn to_csv(&self, p: &Presentation) -> String {
        let mut out = String::from("word,length,area\n");
        for (w, a) in &self.ball {
            let _ = writeln!(out, "{},{},{a}", csv_field(&p.show(w)), w.len());
        }
        out
    }
}

/// Every null-homotopic word of length `<= n` with its exact area.
pub fn census(
    p: &Presentation,
    r: &FiniteRealization,
    n: usize,
    cfg: &SearchConfig,
) -> Result<NullWordCensus, MeanError> {
    census_with(p, r, n, cfg, &Serial)
}

pub fn census_with<E: Executor>(
    p: &Presentation,
    r: &FiniteRealization,
    n: usize,
    cfg: &SearchConfig,
    exec: &E,
) -> Result<NullWordCensus, MeanError> {
    let words = enumerate_null_words(r, n);
    let solver = AreaSolver::with_realization(p, Some(r.clone()));
    let areas = word_areas(&solver, p, &words, cfg, exec)?;
    if let Some(i) = areas.iter().position(|a| !a.exact) {
        return Err(MeanError::InexactArea { word: p.show(&words[i]) });
    }
    Ok(NullWordCensus { n, ball: words.into_iter().zip(areas.into_iter().map(|a| a.area)).collect() })
}

/// Word counts and area sums over the ball and the sphere.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub ball_size: u64,
    #[serde(rename = "ball_area_sum")]
    pub ball_area: u64,
    pub sphere_size: u64,
    #[serde(rename = "sphere_area_sum")]
    pub sphere_area: u64,
}

impl Tally {
    fn add(&mut self, o: &Tally) {
        self.ball_size += o.ball_size;
        self.ball_area += o.ball_area;
        self.sphere_size += o.sphere_size;
        self.sphere_area += o.sphere_area;
    }

    /// `None` for an empty ball.
    pub fn mean(&self) -> Option<Ratio<u64>> {
        (self.ball_size > 0).then(|| Ratio::new(self.ball_area, self.ball_size))
    }

    /// Zero for an empty sphere.
    pub fn smean(&self) -> Ratio<u64> {
        if self.sphere_size == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(self.sphere_area, self.sphere_size)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MemberTally {
    pub member: String,
    #[serde(flatten)]
    pub tally: Tally,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanReport {
    pub subject: String,
    pub n: usize,
    pub mean: Option<Ratio<u64>>,
    pub smean: Ratio<u64>,
    pub tally: Tally,
    /// Per-member breakdown for families.
    pub members: Vec<MemberTally>,
}

fn ratio_text(r: &Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn ratio_decimal(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl MeanReport {
    pub fn from_tally(subject: String, n: usize, tally: Tally, members: Vec<MemberTally>) -> Self {
        MeanReport { subject, n, mean: tally.mean(), smean: tally.smean(), tally, members }
    }

    /// Exact values as `p/q` strings, with decimal approximations.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "subject": self.subject,
            "n": self.n,
            "mean": self.mean.as_ref().map(ratio_text),
            "mean_decimal": self.mean.as_ref().map(ratio_decimal),
            "smean": ratio_text(&self.smean),
            "smean_decimal": ratio_decimal(&self.smean),
            "ball_size": self.tally.ball_size,
            "ball_area_sum": self.tally.ball_area,
            "sphere_size": self.tally.sphere_size,
            "sphere_area_sum": self.tally.sphere_area,
            "members": self.members,
            "convention": COUNTING_NOTE,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("member,n,ball_size,ball_area_sum,sphere_size,sphere_area_sum,mean,smean\n");
        let mut row = |label: &str, t: &Tally| {
            let mean = t.mean().map(|m| ratio_text(&m)).unwrap_or_else(|| "undefined".into());
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                csv_field(label),
                self.n,
                t.ball_size,
                t.ball_area,
                t.sphere_size,
                t.sphere_area,
                mean,
                ratio_text(&t.smean())
            );
        };
        for m in &self.members {
            row(&m.member, &m.tally);
        }
        row("total", &self.tally);
        out
    }

    pub fn to_text(&self) -> String {
        let mean = match &self.mean {
            Some(m) => format!("{} ({:.6})", ratio_text(m), ratio_decimal(m)),
            None => "undefined (empty ball)".into(),
        };
        format!(
            "{} at n = {}\nmean  = {mean}\nsmean = {} ({:.6})\nball: {} words, area sum {}; sphere: {} words, area sum {}\nnote: {COUNTING_NOTE}\n",
            self.subject,
            self.n,
            ratio_text(&self.smean),
            ratio_decimal(&self.smean),
            self.tally.ball_size,
            self.tally.ball_area,
            self.tally.sphere_size,
            self.tally.sphere_area
        )
    }
}

/// Mean area over the ball of radius `n`.
pub fn mean_dehn(
    p: &Presentation,
    r: &FiniteRealization,
    n: usize,
    cfg: &SearchConfig,
) -> Result<Ratio<u64>, MeanError> {
    census(p, r, n, cfg)?.tally().mean().ok_or(MeanError::EmptyBall { n })
}

/// Mean area over the sphere of radius `n`; zero when the sphere is empty.
pub fn smean_dehn(
    p: &Presentation,
    r: &FiniteRealization,
    n: usize,
    cfg: &SearchConfig,
) -> Result<Ratio<u64>, MeanError> {
    Ok(census(p, r, n, cfg)?.tally().smean())
}

/// Report for a single presentation.
pub fn presentation_mean<E: Executor>(
    p: &Presentation,
    r: &FiniteRealization,
    n: usize,
    cfg: &SearchConfig,
    exec: &E,
) -> Result<MeanReport, MeanError> {
    let tally = census_with(p, r, n, cfg, exec)?.tally();
    Ok(MeanReport::from_tally(p.to_string(), n, tally, Vec::new()))
}

/// Pooled report over the family's relevant members at radius `n`: words
/// are tagged by member, so equal spellings in different groups count
/// separately. Both the mean and the spherical mean come from this report.
pub fn family_mean(f: &FamilySpec, n: usize, cfg: &SearchConfig) -> Result<MeanReport, MeanError> {
    family_mean_with(f, n, cfg, DEFAULT_COSET_BUDGET, &Serial)
}

pub fn family_mean_with<E: Executor>(
    f: &FamilySpec,
    n: usize,
    cfg: &SearchConfig,
    coset_budget: usize,
    exec: &E,
) -> Result<MeanReport, MeanError> {
    if !f.relevance_justified() {
        return Err(MeanError::FinitenessNotEstablished { family: f.name().into() });
    }
    let mut total = Tally::default();
    let mut members = Vec::new();
    for m in f.relevance_bound(n)? {
        let r = coset_enumerate(&m.presentation, coset_budget).map_err(DehnError::from)?;
        let tally = census_with(&m.presentation, &r, n, cfg, exec)?.tally();
        total.add(&tally);
        members.push(MemberTally { member: m.label, tally });
    }
    Ok(MeanReport::from_tally(format!("family {f}"), n, total, members))
}

/// Spherical mean of [`family_mean`].
pub fn family_smean(f: &FamilySpec, n: usize, cfg: &SearchConfig) -> Result<Ratio<u64>, MeanError> {
    Ok(family_mean(f, n, cfg)?.smean)
}

/// Closed forms for the family of all `<a | a^p>`, `p` prime: the mean sums
/// `1 + 2 + ... + ⌊n/p⌋` over primes `p <= n` and divides by `Σ ⌊n/p⌋`; the
/// spherical mean averages `n/p` over the prime divisors `p` of `n`.
pub fn cyclic_family_closed_forms(n: u64) -> (Ratio<u64>, Ratio<u64>) {
    assert!(n >= 2, "closed forms need n >= 2");
    let primes = primes_up_to(n);
    let num: u64 = primes.iter().map(|p| (n / p) * (n / p + 1) / 2).sum();
    let den: u64 = primes.iter().map(|p| n / p).sum();
    let divisors: Vec<u64> = (2..=n).filter(|&p| n.is_multiple_of(p) && is_prime(p)).collect();
    let snum: u64 = divisors.iter().map(|p| n / p).sum();
    (Ratio::new(num, den), Ratio::new(snum, divisors.len() as u64))
}
