//! Dehn functions of presentations and of families, and a heuristic growth
//! classifier for the resulting tables.
//!
//! Null-homotopic words are enumerated in length-lex order with letters
//! ordered `a < a^-1 < b < b^-1 < ...` (generator order). Areas are computed
//! once per cyclic class of `w` and `w^-1`, which share their area.

use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::area::{AreaError, AreaSolver, SearchConfig};
use crate::exec::{Executor, Serial};
use crate::families::{FamilyError, FamilySpec};
use crate::presentation::Presentation;
use crate::realization::{coset_enumerate, FiniteRealization, RealizationError, DEFAULT_COSET_BUDGET};
use crate::words::{Letter, Word};

pub const GROWTH_DISCLAIMER: &str =
    "growth label is a least-squares heuristic on sampled values, not a proof of asymptotic equivalence";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DehnError {
    #[error(transparent)]
    Realization(#[from] RealizationError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("area of `{word}`: {source}")]
    Area { word: String, source: AreaError },
    #[error("realization has rank {realization}, presentation has {presentation} generators")]
    RankMismatch { realization: usize, presentation: usize },
}

/// All freely reduced nonempty words of length `<= n` that evaluate to the
/// identity, in length-lex order.
pub fn enumerate_null_words(r: &FiniteRealization, n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for_each_null_word(r, n, |w| out.push(Word::from_letters(w.iter().copied())));
    out
}

/// Streaming form of [`enumerate_null_words`].
///
/// Each length is a depth-first walk over (reduced prefix, group element)
/// pairs, pruned when the element is farther from the identity than the
/// letters left.
pub fn for_each_null_word(r: &FiniteRealization, n: usize, mut f: impl FnMut(&[Letter])) {
    let letters: Vec<Letter> = (0..2 * r.rank() as u16).map(Letter::from_code).collect();
    let mut prefix: Vec<Letter> = Vec::with_capacity(n);
    for len in 1..=n {
        walk(r, &letters, len, FiniteRealization::IDENTITY, &mut prefix, &mut f);
    }
}

fn walk(
    r: &FiniteRealization,
    letters: &[Letter],
    len: usize,
    element: usize,
    prefix: &mut Vec<Letter>,
    f: &mut impl FnMut(&[Letter]),
) {
    let left = len - prefix.len();
    if left == 0 {
        if element == FiniteRealization::IDENTITY {
            f(prefix);
        }
        return;
    }
    for &l in letters {
        if prefix.last() == Some(&l.inverse()) {
            continue;
        }
        let next = r.act(element, l);
        if r.word_length(next) > left - 1 {
            continue;
        }
        prefix.push(l);
        walk(r, letters, len, next, prefix, f);
        prefix.pop();
    }
}

/// Class shared by `w`, its cyclic conjugates and their inverses.
fn area_class(w: &Word) -> Word {
    let a = w.cyclic_class_key();
    let b = w.inverse().cyclic_class_key();
    a.min(b)
}

/// Area of one word: value and whether it is certified minimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordArea {
    pub area: usize,
    pub exact: bool,
}

/// Areas of many null-homotopic words, one search per class.
pub(crate) fn word_areas<E: Executor>(
    solver: &AreaSolver,
    p: &Presentation,
    words: &[Word],
    cfg: &SearchConfig,
    exec: &E,
) -> Result<Vec<WordArea>, DehnError> {
    let mut index: FxHashMap<Word, usize> = FxHashMap::default();
    let mut classes: Vec<Word> = Vec::new();
    let slots: Vec<usize> = words
        .iter()
        .map(|w| {
            let key = area_class(w);
            *index.entry(key.clone()).or_insert_with(|| {
                classes.push(key);
                classes.len() - 1
            })
        })
        .collect();
    let results = exec.map(&classes, |k| solver.search(k, cfg));
    let mut areas = Vec::with_capacity(classes.len());
    for (k, res) in classes.iter().zip(results) {
        match res {
            Ok(r) => areas.push(WordArea { area: r.area, exact: r.exact }),
            Err(source) => return Err(DehnError::Area { word: p.show(k), source }),
        }
    }
    Ok(slots.into_iter().map(|s| areas[s]).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DehnEntry {
    pub n: usize,
    pub delta: usize,
    /// Shortlex-least word of length `<= n` attaining `delta`; `None` when
    /// there are no null-homotopic words of length `<= n`.
    #[serde(skip)]
    pub witness: Option<Word>,
    #[serde(rename = "witness")]
    pub witness_text: String,
    /// False when some area behind this entry is only an upper bound.
    pub exact: bool,
    /// Parameters of the attaining family member.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub member: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DehnTable {
    /// The presentation, or the family and its parameters.
    pub subject: String,
    pub entries: Vec<DehnEntry>,
}

impl DehnTable {
    pub fn delta(&self, n: usize) -> Option<usize> {
        self.entries.iter().find(|e| e.n == n).map(|e| e.delta)
    }

    pub fn deltas(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.delta).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|e| e.exact)
    }

    pub fn is_monotone(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].delta <= w[1].delta)
    }

    fn is_family(&self) -> bool {
        self.entries.iter().any(|e| e.member.is_some())
    }

    pub fn to_csv(&self) -> String {
        let family = self.is_family();
        let mut out = String::from(if family { "n,delta,witness,exact,member\n" } else { "n,delta,witness,exact\n" });
        for e in &self.entries {
            let _ = write!(out, "{},{},{},{}", e.n, e.delta, csv_field(&e.witness_text), e.exact);
            if family {
                let _ = write!(out, ",{}", csv_field(e.member.as_deref().unwrap_or("")));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("table serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("Dehn function of {}\n", self.subject);
        for e in &self.entries {
            let _ = write!(out, "delta({}) = {}", e.n, e.delta);
            if !e.exact {
                out.push_str(" (unverified)");
            }
            if !e.witness_text.is_empty() {
                let _ = write!(out, "  witness {}", e.witness_text);
            }
            if let Some(m) = &e.member {
                let _ = write!(out, "  [{m}]");
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Table of `δ(n)` for `n = 1..=n_max`.
pub fn dehn_function(p: &Presentation, n_max: usize, cfg: &SearchConfig) -> Result<DehnTable, DehnError> {
    let r = coset_enumerate(p, DEFAULT_COSET_BUDGET)?;
    dehn_function_with(p, &r, n_max, cfg, &Serial)
}

/// [`dehn_function`] over a given realization and executor.
pub fn dehn_function_with<E: Executor>(
    p: &Presentation,
    r: &FiniteRealization,
    n_max: usize,
    cfg: &SearchConfig,
    exec: &E,
) -> Result<DehnTable, DehnError> {
    if r.rank() != p.rank() {
        return Err(DehnError::RankMismatch { realization: r.rank(), presentation: p.rank() });
    }
    let words = enumerate_null_words(r, n_max);
    let solver = AreaSolver::with_realization(p, Some(r.clone()));
    let areas = word_areas(&solver, p, &words, cfg, exec)?;
    let mut entries = Vec::with_capacity(n_max);
    let mut best: Option<(usize, usize)> = None; // (area, index into words)
    let mut exact = true;
    let mut i = 0;
    for n in 1..=n_max {
        while i < words.len() && words[i].len() == n {
            exact &= areas[i].exact;
            if best.is_none_or(|(a, _)| areas[i].area > a) {
                best = Some((areas[i].area, i));
            }
            i += 1;
        }
        entries.push(match best {
            Some((delta, wi)) => DehnEntry {
                n,
                delta,
                witness: Some(words[wi].clone()),
                witness_text: p.show(&words[wi]),
                exact,
                member: None,
            },
            None => DehnEntry { n, delta: 0, witness: None, witness_text: String::new(), exact, member: None },
        });
    }
    Ok(DehnTable { subject: p.to_string(), entries })
}

/// Pointwise supremum over the family's relevant members, using the default
/// coset budget and a serial executor.
pub fn family_dehn_function(f: &FamilySpec, n_max: usize, cfg: &SearchConfig) -> Result<DehnTable, DehnError> {
    family_dehn_function_with(f, n_max, cfg, DEFAULT_COSET_BUDGET, &Serial)
}

/// Members are those of `f.relevance_bound(n_max)`. A member outside the
/// bound at some smaller `n` has no null words of length `<= n` there, so its
/// entry is zero and the pointwise maximum is unaffected. Ties go to the
/// member listed first.
pub fn family_dehn_function_with<E: Executor>(
    f: &FamilySpec,
    n_max: usize,
    cfg: &SearchConfig,
    coset_budget: usize,
    exec: &E,
) -> Result<DehnTable, DehnError> {
    let members = f.relevance_bound(n_max)?;
    let mut entries: Vec<DehnEntry> = (1..=n_max)
        .map(|n| DehnEntry { n, delta: 0, witness: None, witness_text: String::new(), exact: true, member: None })
        .collect();
    for m in &members {
        let r = coset_enumerate(&m.presentation, coset_budget)?;
        let t = dehn_function_with(&m.presentation, &r, n_max, cfg, exec)?;
        for (e, me) in entries.iter_mut().zip(t.entries) {
            e.exact &= me.exact;
            if me.delta > e.delta {
                e.delta = me.delta;
                e.witness = me.witness;
                e.witness_text = me.witness_text;
                e.member = Some(m.label.clone());
            }
        }
    }
    let subject = format!("family {f} ({} members)", members.len());
    Ok(DehnTable { subject, entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthLabel {
    Linear,
    Quadratic,
    Exponential,
    Inconclusive,
}

impl std::fmt::Display for GrowthLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GrowthLabel::Linear => "linear",
            GrowthLabel::Quadratic => "quadratic",
            GrowthLabel::Exponential => "exponential",
            GrowthLabel::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthClass {
    pub label: GrowthLabel,
    /// Sum of squared residuals of each fitted model.
    pub fit_errors: Vec<(GrowthLabel, f64)>,
    pub points: usize,
    pub disclaimer: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GrowthError {
    #[error("need at least {needed} nonzero exact entries, table has {found}")]
    InsufficientData { needed: usize, found: usize },
}

pub const MIN_GROWTH_POINTS: usize = 5;
/// Relative gap between the two best residuals below which no label is given.
pub const GROWTH_MARGIN: f64 = 0.2;

/// Least-squares fits of `a·n`, `a·n²` and `a·c^n` to the exact entries.
pub fn classify_growth(t: &DehnTable) -> Result<GrowthClass, GrowthError> {
    let pts: Vec<(f64, f64)> = t.entries.iter().filter(|e| e.exact).map(|e| (e.n as f64, e.delta as f64)).collect();
    classify_points(&pts)
}

/// [`classify_growth`] on raw `(n, value)` samples.
pub fn classify_points(pts: &[(f64, f64)]) -> Result<GrowthClass, GrowthError> {
    let nonzero = pts.iter().filter(|p| p.1 > 0.0).count();
    if nonzero < MIN_GROWTH_POINTS {
        return Err(GrowthError::InsufficientData { needed: MIN_GROWTH_POINTS, found: nonzero });
    }
    let sse = |model: &dyn Fn(f64) -> f64| pts.iter().map(|&(x, y)| (y - model(x)).powi(2)).sum::<f64>();
    let power_fit = |k: i32| {
        let num: f64 = pts.iter().map(|&(x, y)| x.powi(k) * y).sum();
        let den: f64 = pts.iter().map(|&(x, _)| x.powi(2 * k)).sum();
        let a = num / den;
        sse(&|x| a * x.powi(k))
    };
    let exp_fit = {
        let logs: Vec<(f64, f64)> = pts.iter().filter(|p| p.1 > 0.0).map(|&(x, y)| (x, y.ln())).collect();
        let m = logs.len() as f64;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let icpt = my - slope * mx;
        sse(&|x| (icpt + slope * x).exp())
    };
    let fit_errors = vec![
        (GrowthLabel::Linear, power_fit(1)),
        (GrowthLabel::Quadratic, power_fit(2)),
        (GrowthLabel::Exponential, exp_fit),
    ];
    let mut sorted = fit_errors.clone();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (best, second) = (sorted[0].1, sorted[1].1);
    let label =
        if second <= 0.0 || (second - best) / second < GROWTH_MARGIN { GrowthLabel::Inconclusive } else { sorted[0].0 };
    Ok(GrowthClass { label, fit_errors, points: pts.len(), disclaimer: GROWTH_DISCLAIMER })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::free_reduce;

    fn cyclic(p: u32) -> Presentation {
        Presentation::from_strs(&["a"], &[&format!("a^{p}")])
    }

    #[test]
    fn null_words_of_z5() {
        let p = cyclic(5);
        let r = coset_enumerate(&p, 100).unwrap();
        assert!(enumerate_null_words(&r, 4).is_empty());
        let words: Vec<String> = enumerate_null_words(&r, 5).iter().map(|w| p.show(w)).collect();
        assert_eq!(words, ["a^5", "a^-5"]);
    }

    #[test]
    fn null_words_match_filtering_all_words() {
        let p = Presentation::from_strs(&["s", "r"], &["s^2", "r^5", "s r s r^-4"]);
        let r = coset_enumerate(&p, 1000).unwrap();
        let fast = enumerate_null_words(&r, 6);
        // every reduced word, by brute force
        let mut slow = Vec::new();
        let mut frontier = vec![Vec::<Letter>::new()];
        for _ in 0..6 {
            let mut next = Vec::new();
            for w in &frontier {
                for c in 0..4 {
                    let mut v = w.clone();
                    v.push(Letter::from_code(c));
                    if free_reduce(&v).len() == v.len() {
                        next.push(v);
                    }
                }
            }
            for v in &next {
                let w = Word::from_letters(v.iter().copied());
                if r.is_null_homotopic(&w).unwrap() {
                    slow.push(w);
                }
            }
            frontier = next;
        }
        assert_eq!(fast, slow);
        let two: Vec<String> = fast.iter().filter(|w| w.len() == 2).map(|w| p.show(w)).collect();
        assert_eq!(two, ["s^2", "s^-2"]);
    }

    #[test]
    fn cyclic_table() {
        let t = dehn_function(&cyclic(5), 12, &SearchConfig::default()).unwrap();
        assert_eq!(t.deltas(), [0, 0, 0, 0, 1, 1, 1, 1, 1, 2, 2, 2]);
        assert!(t.is_exact() && t.is_monotone());
        assert_eq!(t.entries[9].witness_text, "a^10");
        assert!(t.to_csv().starts_with("n,delta,witness,exact\n1,0,,true\n"));
    }

    #[test]
    fn commutator_witness() {
        let p = Presentation::from_strs(&["x", "y"], &["x^3", "y^5", "x y x^-1 y^-1"]);
        let t = dehn_function(&p, 4, &SearchConfig::default()).unwrap();
        assert_eq!(t.delta(4), Some(1));
        assert_eq!(t.entries[3].witness_text, "x^3");
        let w = p.parse_word("x y x^-1 y^-1").unwrap();
        let r = coset_enumerate(&p, 100).unwrap();
        assert!(enumerate_null_words(&r, 4).contains(&w));
    }

    #[test]
    fn synthetic_growth() {
        let lin: Vec<(f64, f64)> = (1..=40).map(|n| (n as f64, (n / 5) as f64)).collect();
        assert_eq!(classify_points(&lin).unwrap().label, GrowthLabel::Linear);
        let quad: Vec<(f64, f64)> = (1..=40).map(|n| (n as f64, ((n / 4) * (n / 4)) as f64)).collect();
        assert_eq!(classify_points(&quad).unwrap().label, GrowthLabel::Quadratic);
        let exp: Vec<(f64, f64)> = (1..=10).map(|n| (n as f64, 2f64.powi(n))).collect();
        assert_eq!(classify_points(&exp).unwrap().label, GrowthLabel::Exponential);
        let few: Vec<(f64, f64)> = (1..=4).map(|n| (n as f64, n as f64)).collect();
        assert_eq!(classify_points(&few), Err(GrowthError::InsufficientData { needed: 5, found: 4 }));
    }
}
