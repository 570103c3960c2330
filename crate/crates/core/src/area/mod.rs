//! Minimal relator-filling areas with checkable certificates.
//!
//! `area_search` is the production engine; `area_bruteforce` enumerates
//! products of conjugated relators directly and shares no search code with it,
//! so the two can be played against each other.

mod bruteforce;
mod heuristic;
mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentation::Presentation;
use crate::words::{push_reduced, Letter, Word};

pub use bruteforce::{area_bruteforce, BruteForceOracle, ProductBall};
pub use search::{area_search, area_upper_bound, AreaSolver};

/// Caps for [`area_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Longest cyclic word allowed at any intermediate step of the first pass;
    /// raised automatically to the target length, and by escalation.
    pub max_intermediate_length: usize,
    /// Largest area the search will look for.
    pub max_area: usize,
    /// Maximum number of distinct states stored by one search pass.
    pub state_budget: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_intermediate_length: 16, max_area: 64, state_budget: 4_000_000 }
    }
}

/// One factor `conjugator · relator^{sign} · conjugator^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CertificateStep {
    pub conjugator: Word,
    pub relator: usize,
    pub sign: i8,
}

/// An explicit product of conjugated relators; its length bounds the area.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct AreaCertificate {
    pub steps: Vec<CertificateStep>,
}

impl AreaCertificate {
    pub fn claimed_area(&self) -> usize {
        self.steps.len()
    }

    /// The freely reduced product of the steps, or `None` if a relator index
    /// is out of range or the sign is not ±1.
    pub fn product(&self, p: &Presentation) -> Option<Word> {
        let mut out: Vec<Letter> = Vec::new();
        for step in &self.steps {
            let r = p.relators().get(step.relator)?;
            let r = match step.sign {
                1 => r.clone(),
                -1 => r.inverse(),
                _ => return None,
            };
            push_reduced(&mut out, step.conjugator.letters().iter().copied());
            push_reduced(&mut out, r.letters().iter().copied());
            push_reduced(&mut out, step.conjugator.inverse().letters().iter().copied());
        }
        Some(Word::from_letters(out))
    }

    pub fn to_json(&self, target: &Word, p: &Presentation, exact: bool) -> serde_json::Value {
        let json = CertificateJson {
            target: p.show(target),
            presentation: p.digest(),
            steps: self
                .steps
                .iter()
                .map(|s| StepJson { conjugator: p.show(&s.conjugator), relator: s.relator, sign: s.sign })
                .collect(),
            claimed_area: self.claimed_area(),
            exact,
        };
        serde_json::to_value(json).expect("certificate serializes")
    }

    /// Parse the JSON written by [`AreaCertificate::to_json`]; returns the
    /// certificate, its target word and exact flag.
    pub fn from_json(value: &serde_json::Value, p: &Presentation) -> Result<(Self, Word, bool), String> {
        let json: CertificateJson = serde_json::from_value(value.clone()).map_err(|e| e.to_string())?;
        if json.presentation != p.digest() {
            return Err("certificate was issued for a different presentation".into());
        }
        let target = p.parse_word(&json.target).map_err(|e| e.to_string())?;
        let mut steps = Vec::with_capacity(json.steps.len());
        for s in json.steps {
            steps.push(CertificateStep {
                conjugator: p.parse_word(&s.conjugator).map_err(|e| e.to_string())?,
                relator: s.relator,
                sign: s.sign,
            });
        }
        if steps.len() != json.claimed_area {
            return Err("claimed area does not match the number of steps".into());
        }
        Ok((AreaCertificate { steps }, target, json.exact))
    }
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    target: String,
    presentation: String,
    steps: Vec<StepJson>,
    claimed_area: usize,
    exact: bool,
}

#[derive(Serialize, Deserialize)]
struct StepJson {
    conjugator: String,
    relator: usize,
    sign: i8,
}

/// Whether the certificate's product freely reduces to `w`.
pub fn verify_certificate(cert: &AreaCertificate, w: &Word, p: &Presentation) -> bool {
    cert.product(p).as_ref() == Some(w)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AreaResult {
    pub area: usize,
    pub certificate: AreaCertificate,
    /// True when `area` is certified minimal; otherwise it is an upper bound.
    pub exact: bool,
    /// States stored by the final search pass.
    pub states: usize,
    /// Intermediate-length cap in force for the final pass.
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AreaError {
    #[error("word uses generator {0}, which is not in the presentation")]
    ForeignWord(usize),
    #[error("word is not null-homotopic: no filling of area <= {max_area} exists")]
    NotNullHomotopic { max_area: usize },
    #[error("search budget exhausted after {states} states without finding a filling")]
    BudgetExceeded { states: usize },
}
