//! Finite presentations `<S | R>` and their text format.
//!
//! ```text
//! # comments start with '#'
//! gens: a b
//! rels: b a b^-1 = a^4, a^9, b^3
//! ```
//!
//! Further `rels:` lines, or indented continuation lines, append relators.
//! A relation `u = v` becomes the relator `u v^-1`.

use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::words::{parse_word, Letter, Word, WordParseError};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
    #[error("relator {index} uses a generator outside the presentation")]
    ForeignLetter { index: usize },
    #[error("relator {index} is empty")]
    EmptyRelator { index: usize },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
}

/// Output of [`parse_presentation`]: the presentation plus non-fatal notes.
#[derive(Debug, Clone)]
pub struct ParsedPresentation {
    pub presentation: Presentation,
    pub warnings: Vec<String>,
}

fn valid_name(name: &str) -> bool {
    let mut cs = name.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Presentation {
    /// Validated constructor. Relators must be nonempty words over the generators.
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self, PresentationError> {
        for (i, g) in generators.iter().enumerate() {
            if !valid_name(g) {
                return Err(PresentationError::InvalidName(g.clone()));
            }
            if generators[..i].contains(g) {
                return Err(PresentationError::DuplicateGenerator(g.clone()));
            }
        }
        for (index, r) in relators.iter().enumerate() {
            if r.is_empty() {
                return Err(PresentationError::EmptyRelator { index });
            }
            if r.max_generator().is_some_and(|g| g >= generators.len()) {
                return Err(PresentationError::ForeignLetter { index });
            }
        }
        Ok(Presentation { generators, relators })
    }

    /// Convenience constructor from names and relator texts; panics on bad input.
    /// Intended for builders and tests where the input is a literal.
    pub fn from_strs(generators: &[&str], relators: &[&str]) -> Self {
        let gens: Vec<String> = generators.iter().map(|s| s.to_string()).collect();
        let rels = relators
            .iter()
            .map(|r| parse_word(r, &gens).unwrap_or_else(|e| panic!("bad relator {r:?}: {e}")))
            .collect();
        Presentation::new(gens, rels).expect("valid literal presentation")
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn relator_lengths(&self) -> Vec<usize> {
        self.relators.iter().map(Word::len).collect()
    }

    pub fn max_relator_length(&self) -> usize {
        self.relators.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, WordParseError> {
        parse_word(text, &self.generators)
    }

    pub fn show(&self, w: &Word) -> String {
        w.display(&self.generators).to_string()
    }

    /// True when every letter of `w` names a generator of this presentation.
    pub fn owns(&self, w: &Word) -> bool {
        w.max_generator().is_none_or(|g| g < self.rank())
    }

    pub fn generator_letter(&self, name: &str) -> Option<Letter> {
        self.generators.iter().position(|g| g == name).map(Letter::pos)
    }

    /// Cyclically reduce every relator and drop any relator that is a cyclic
    /// conjugate of an earlier one or of an earlier one's inverse. Order of
    /// survivors is preserved.
    pub fn normalize(&self) -> Presentation {
        let mut seen = Vec::new();
        let mut relators = Vec::new();
        for r in &self.relators {
            let (core, _) = r.cyclic_reduce();
            let key = core.cyclic_class_key();
            if !seen.contains(&key) {
                seen.push(key);
                relators.push(core);
            }
        }
        Presentation { generators: self.generators.clone(), relators }
    }

    pub fn is_normalized(&self) -> bool {
        self.normalize() == *self
    }

    /// Render in the file format understood by [`parse_presentation`].
    pub fn to_text(&self) -> String {
        let rels: Vec<String> = self.relators.iter().map(|r| self.show(r)).collect();
        format!("gens: {}\nrels: {}\n", self.generators.join(" "), rels.join(", "))
    }

    /// Hex SHA-256 of the canonical text form; identifies the presentation in
    /// exported certificates.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.show(r)).collect();
        write!(f, "<{} | {}>", self.generators.join(", "), rels.join(", "))
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Free-function form of [`Presentation::normalize`].
pub fn normalize_relators(p: &Presentation) -> Presentation {
    p.normalize()
}

/// Parse the presentation file format. Relators that reduce to the empty word
/// are dropped and reported in `warnings`.
pub fn parse_presentation(text: &str) -> Result<ParsedPresentation, PresentationError> {
    let mut generators: Option<Vec<String>> = None;
    // (line, column of item start, item text)
    let mut items: Vec<(usize, usize, String)> = Vec::new();
    let mut in_rels = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let trimmed = line.trim_start();
        let indent = line.len() - trimmed.len();
        let (body, body_col) = if let Some(rest) = trimmed.strip_prefix("gens:") {
            if generators.is_some() {
                return Err(syntax(line_no, indent + 1, "second `gens:` line"));
            }
            let mut names = Vec::new();
            for tok in rest.split(|c: char| c.is_whitespace() || c == ',') {
                if tok.is_empty() {
                    continue;
                }
                if !valid_name(tok) {
                    let col = raw.find(tok).map_or(1, |c| c + 1);
                    return Err(syntax(line_no, col, &format!("invalid generator name `{tok}`")));
                }
                if names.iter().any(|n| n == tok) {
                    return Err(PresentationError::DuplicateGenerator(tok.to_string()));
                }
                names.push(tok.to_string());
            }
            generators = Some(names);
            in_rels = false;
            continue;
        } else if let Some(rest) = trimmed.strip_prefix("rels:") {
            in_rels = true;
            (rest, indent + "rels:".len())
        } else if in_rels {
            (trimmed, indent)
        } else {
            return Err(syntax(line_no, indent + 1, "expected `gens:` or `rels:`"));
        };
        if generators.is_none() {
            return Err(syntax(line_no, indent + 1, "`rels:` before `gens:`"));
        }
        for (offset, item) in split_items(body) {
            if item.trim().is_empty() {
                continue;
            }
            let lead = item.len() - item.trim_start().len();
            items.push((line_no, body_col + offset + lead, item.trim().to_string()));
        }
    }

    let generators = generators.ok_or_else(|| syntax(1, 1, "missing `gens:` line"))?;
    let mut relators = Vec::new();
    let mut warnings = Vec::new();
    for (line, col0, item) in items {
        let word_err = |e: WordParseError, extra: usize| {
            let column = col0 + extra + e.column().unwrap_or(item.len() + 1);
            syntax(line, column, &e.to_string())
        };
        let rel = match item.find('=') {
            Some(eq) => {
                let lhs = parse_word(&item[..eq], &generators).map_err(|e| word_err(e, 0))?;
                let rhs = parse_word(&item[eq + 1..], &generators).map_err(|e| word_err(e, eq + 1))?;
                lhs.concat(&rhs.inverse())
            }
            None => parse_word(&item, &generators).map_err(|e| word_err(e, 0))?,
        };
        if rel.is_empty() {
            warnings.push(format!("line {line}: relator `{item}` is trivial after reduction; dropped"));
            continue;
        }
        relators.push(rel);
    }
    let presentation = Presentation::new(generators, relators)?;
    Ok(ParsedPresentation { presentation, warnings })
}

fn syntax(line: usize, column: usize, message: &str) -> PresentationError {
    PresentationError::Syntax { line, column, message: message.to_string() }
}

/// Split on commas that are not nested inside brackets; yields (byte offset, item).
fn split_items(body: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in body.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, &body[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &body[start..]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_cyclic() {
        let p = parse_presentation("gens: a\nrels: a^5").unwrap().presentation;
        assert_eq!(p.rank(), 1);
        assert_eq!(p.relators(), &[Word::power_of(0, 5)]);
    }

    #[test]
    fn parse_dihedral() {
        let p = parse_presentation("gens: s r\nrels: s^2, r^5, s r s r^-4").unwrap().presentation;
        assert_eq!(p.relator_lengths(), vec![2, 5, 7]);
    }

    #[test]
    fn parse_relation_syntax() {
        let p = parse_presentation("gens: a b\nrels: b a b^-1 = a^4, a^9, b^3").unwrap().presentation;
        assert_eq!(p.relators()[0], p.parse_word("b a b^-1 a^-4").unwrap());
        assert_eq!(p.relator_lengths(), vec![7, 9, 3]);
    }

    #[test]
    fn parse_comments_and_continuations() {
        let text = "# D4n\ngens: s r t  # three\nrels: s^2, r^3,\n  t^2, (s r)^2\nrels: [s,t], [r,t]\n";
        let p = parse_presentation(text).unwrap().presentation;
        assert_eq!(p.relators().len(), 6);
        assert_eq!(p.relators()[4], p.parse_word("s t s^-1 t^-1").unwrap());
    }

    #[test]
    fn empty_relator_dropped_with_warning() {
        let parsed = parse_presentation("gens: a b\nrels: a a^-1, a b = a b, b^2").unwrap();
        assert_eq!(parsed.presentation.relators().len(), 1);
        assert_eq!(parsed.warnings.len(), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_presentation("gens: a a\nrels: a"), Err(PresentationError::DuplicateGenerator(_))));
        match parse_presentation("gens: a b\nrels: a^2, c b") {
            Err(PresentationError::Syntax { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 12);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_presentation("rels: a"), Err(PresentationError::Syntax { line: 1, .. })));
        assert!(matches!(parse_presentation("gens: 1a"), Err(PresentationError::Syntax { .. })));
    }

    #[test]
    fn normalize_examples() {
        let p = Presentation::from_strs(&["a", "b"], &["a b", "b a"]);
        assert_eq!(p.normalize().relators(), &[p.parse_word("a b").unwrap()]);
        let p = Presentation::from_strs(&["a"], &["a a", "a^-1 a^-1"]);
        assert_eq!(p.normalize().relators(), &[Word::power_of(0, 2)]);
        let p = Presentation::from_strs(&["s", "r"], &["s s", "r^5"]);
        assert_eq!(p.normalize(), p);
    }

    #[test]
    fn normalize_cyclically_reduces_and_is_idempotent() {
        let p = Presentation::from_strs(&["a", "b"], &["a b a^-1", "b", "a^3"]);
        let n = p.normalize();
        assert_eq!(n.relators().len(), 2);
        assert_eq!(n.normalize(), n);
    }

    #[test]
    fn text_round_trip() {
        let p = Presentation::from_strs(&["a", "b"], &["b a b^-1 a^-4", "a^9", "b^3"]);
        let q = parse_presentation(&p.to_text()).unwrap().presentation;
        assert_eq!(p, q);
        assert_eq!(p.digest(), q.digest());
    }
}
