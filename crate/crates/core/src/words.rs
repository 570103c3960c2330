//! Free-group word algebra.
//!
//! A [`Word`] is always freely reduced. Letters are encoded densely as
//! `2 * generator + (inverse as u16)`, so the inverse of a letter is a single
//! xor and lexicographic order on codes is `a < a^-1 < b < b^-1 < ...`.

use std::fmt;

use thiserror::Error;

/// A signed generator: `generator^{+1}` or `generator^{-1}`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u16);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        assert!(generator < (u16::MAX as usize) / 2, "generator index out of range");
        Letter((generator as u16) << 1 | inverse as u16)
    }

    pub fn pos(generator: usize) -> Self {
        Self::new(generator, false)
    }

    pub fn neg(generator: usize) -> Self {
        Self::new(generator, true)
    }

    #[inline]
    pub const fn from_code(code: u16) -> Self {
        Letter(code)
    }

    #[inline]
    pub fn code(self) -> u16 {
        self.0
    }

    #[inline]
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    /// +1 or -1.
    #[inline]
    pub fn sign(self) -> i64 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inverse() {
            write!(f, "g{}^-1", self.generator())
        } else {
            write!(f, "g{}", self.generator())
        }
    }
}

/// A freely reduced word in a free group.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

/// Freely reduce an arbitrary letter sequence.
pub fn free_reduce(raw: &[Letter]) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(raw.len());
    push_reduced(&mut out, raw.iter().copied());
    Word(out)
}

/// Append letters to an already-reduced buffer, cancelling as we go.
pub(crate) fn push_reduced(out: &mut Vec<Letter>, letters: impl IntoIterator<Item = Letter>) {
    for l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out = Vec::new();
        push_reduced(&mut out, letters);
        Word(out)
    }

    /// `generator^exponent`.
    pub fn power_of(generator: usize, exponent: i64) -> Self {
        let l = Letter::new(generator, exponent < 0);
        Word(vec![l; exponent.unsigned_abs() as usize])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        push_reduced(&mut out, other.0.iter().copied());
        Word(out)
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            push_reduced(&mut out, base.0.iter().copied());
        }
        Word(out)
    }

    /// `self · other · self^{-1}`.
    pub fn conjugate(&self, other: &Word) -> Word {
        self.concat(other).concat(&self.inverse())
    }

    /// Split `self = conjugator · core · conjugator^{-1}` with `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.0.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        (Word(self.0[k..n - k].to_vec()), Word(self.0[..k].to_vec()))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(a), Some(b)) => self.0.len() == 1 || *a != b.inverse(),
            _ => true,
        }
    }

    /// Rotation starting at letter `k`.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let k = k % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// All distinct rotations, in rotation order starting with `self`.
    pub fn cyclic_conjugates(&self) -> Vec<Word> {
        if self.0.is_empty() {
            return vec![Word::empty()];
        }
        let period = self.primitive_period();
        (0..period).map(|k| self.rotate(k)).collect()
    }

    /// Least `d` dividing `len` with `self` equal to its rotation by `d`.
    pub fn primitive_period(&self) -> usize {
        let n = self.0.len();
        (1..=n).find(|&d| n.is_multiple_of(d) && (0..n).all(|i| self.0[i] == self.0[(i + d) % n])).unwrap_or(0)
    }

    /// Exponent sum of one generator.
    pub fn exponent_sum(&self, generator: usize) -> i64 {
        self.0.iter().filter(|l| l.generator() == generator).map(|l| l.sign()).sum()
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator()).max()
    }

    /// Canonical representative of the conjugacy class of the cyclic reduction,
    /// up to rotation and inversion. Area is constant on these classes.
    pub fn cyclic_class_key(&self) -> Word {
        let (core, _) = self.cyclic_reduce();
        let a = least_rotation(&core.0);
        let inv = core.inverse();
        let b = least_rotation(&inv.0);
        let ra = core.rotate(a);
        let rb = inv.rotate(b);
        ra.min(rb)
    }

    pub fn display<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> WordDisplay<'a, S> {
        WordDisplay { word: self, names }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Free-function form of [`Word::inverse`].
pub fn invert(w: &Word) -> Word {
    w.inverse()
}

/// Free-function form of [`Word::concat`].
pub fn concat(u: &Word, v: &Word) -> Word {
    u.concat(v)
}

/// Free-function form of [`Word::cyclic_reduce`]: `(core, conjugator)`.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    w.cyclic_reduce()
}

/// Free-function form of [`Word::cyclic_conjugates`].
pub fn cyclic_conjugates(w: &Word) -> Vec<Word> {
    w.cyclic_conjugates()
}

/// Index of the lexicographically least rotation of `s` (first one on ties).
pub fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n < 2 {
        return 0;
    }
    // Two-candidate scan; O(n).
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = &s[(i + k) % n];
        let b = &s[(j + k) % n];
        match a.cmp(b) {
            std::cmp::Ordering::Equal => k += 1,
            std::cmp::Ordering::Greater => {
                i += k + 1;
                if i == j {
                    i += 1;
                }
                k = 0;
            }
            std::cmp::Ordering::Less => {
                j += k + 1;
                if i == j {
                    j += 1;
                }
                k = 0;
            }
        }
    }
    i.min(j)
}

/// Exponent-collapsed printer: `a a a b^-1` prints as `a^3 b^-1`, ε as `1`.
pub struct WordDisplay<'a, S> {
    word: &'a Word,
    names: &'a [S],
}

impl<S: AsRef<str>> fmt::Display for WordDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = self.word.letters();
        if letters.is_empty() {
            return f.write_str("1");
        }
        let mut i = 0;
        let mut first = true;
        while i < letters.len() {
            let l = letters[i];
            let mut run = 1;
            while i + run < letters.len() && letters[i + run] == l {
                run += 1;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let name = self
                .names
                .get(l.generator())
                .map(|s| s.as_ref().to_string())
                .unwrap_or_else(|| format!("g{}", l.generator()));
            let exp = run as i64 * l.sign();
            if exp == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{exp}")?;
            }
            i += run;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordParseError {
    #[error("unknown generator `{name}` at column {column}")]
    UnknownGenerator { name: String, column: usize },
    #[error("malformed exponent at column {column}")]
    BadExponent { column: usize },
    #[error("unexpected `{found}` at column {column}")]
    Unexpected { found: char, column: usize },
    #[error("unexpected end of input")]
    UnexpectedEnd,
}

impl WordParseError {
    pub fn column(&self) -> Option<usize> {
        match self {
            WordParseError::UnknownGenerator { column, .. }
            | WordParseError::BadExponent { column }
            | WordParseError::Unexpected { column, .. } => Some(*column),
            WordParseError::UnexpectedEnd => None,
        }
    }
}

/// Parse a word over the given generator names.
///
/// Grammar: juxtaposed atoms separated by optional whitespace, `*` or `.`;
/// `atom := name | name^int | (word)^int | [word, word] | 1`.
/// An uppercase single letter whose lowercase form is a generator (and which
/// is not itself a generator) denotes the inverse. An identifier that is not a
/// generator name is split greedily into generator names, e.g. `srsr^-4`; the
/// exponent then binds to the last name only. `[u, v]` is `u v u^-1 v^-1`.
/// Columns in errors are 1-based character positions.
pub fn parse_word<S: AsRef<str>>(text: &str, names: &[S]) -> Result<Word, WordParseError> {
    let mut p = WordParser { chars: text.chars().collect(), pos: 0, names };
    let letters = p.sequence(None)?;
    p.skip_separators();
    if let Some(&c) = p.chars.get(p.pos) {
        return Err(WordParseError::Unexpected { found: c, column: p.pos + 1 });
    }
    Ok(free_reduce(&letters))
}

struct WordParser<'a, S> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [S],
}

impl<S: AsRef<str>> WordParser<'_, S> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_separators(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() || c == '*' || c == '.' || c == '·' {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Parse atoms until end of input or one of the stop characters.
    fn sequence(&mut self, stop: Option<&[char]>) -> Result<Vec<Letter>, WordParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_separators();
            let Some(c) = self.peek() else { break };
            if let Some(stop) = stop {
                if stop.contains(&c) {
                    break;
                }
            }
            let atom = self.atom()?;
            push_reduced(&mut out, atom);
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<Vec<Letter>, WordParseError> {
        let start = self.pos;
        let c = self.peek().ok_or(WordParseError::UnexpectedEnd)?;
        if c == '(' {
            self.pos += 1;
            let inner = self.sequence(Some(&[')']))?;
            self.expect(')')?;
            let exp = self.exponent()?.unwrap_or(1);
            return Ok(power(&inner, exp));
        }
        if c == '[' {
            self.pos += 1;
            let u = self.sequence(Some(&[',']))?;
            self.expect(',')?;
            let v = self.sequence(Some(&[']']))?;
            self.expect(']')?;
            let mut comm = Vec::new();
            push_reduced(&mut comm, u.iter().copied());
            push_reduced(&mut comm, v.iter().copied());
            push_reduced(&mut comm, u.iter().rev().map(|l| l.inverse()));
            push_reduced(&mut comm, v.iter().rev().map(|l| l.inverse()));
            let exp = self.exponent()?.unwrap_or(1);
            return Ok(power(&comm, exp));
        }
        if c == '1' {
            self.pos += 1;
            // identity; an exponent on it is harmless
            self.exponent()?;
            return Ok(Vec::new());
        }
        if c.is_ascii_alphabetic() {
            let mut end = self.pos;
            while end < self.chars.len() && (self.chars[end].is_ascii_alphanumeric() || self.chars[end] == '_') {
                end += 1;
            }
            let ident: String = self.chars[self.pos..end].iter().collect();
            self.pos = end;
            let mut pieces = self.resolve(&ident, start)?;
            let exp = self.exponent()?.unwrap_or(1);
            let last = pieces.pop().expect("resolve returns at least one letter");
            let mut out = pieces;
            push_reduced(&mut out, power(&[last], exp));
            return Ok(out);
        }
        Err(WordParseError::Unexpected { found: c, column: start + 1 })
    }

    fn expect(&mut self, want: char) -> Result<(), WordParseError> {
        self.skip_separators();
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(WordParseError::Unexpected { found: c, column: self.pos + 1 }),
            None => Err(WordParseError::UnexpectedEnd),
        }
    }

    fn exponent(&mut self) -> Result<Option<i64>, WordParseError> {
        if self.peek() != Some('^') {
            return Ok(None);
        }
        let caret = self.pos;
        self.pos += 1;
        let mut neg = false;
        match self.peek() {
            Some('-') => {
                neg = true;
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        let digits_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if digits_start == self.pos {
            return Err(WordParseError::BadExponent { column: caret + 1 });
        }
        let s: String = self.chars[digits_start..self.pos].iter().collect();
        let v: i64 = s.parse().map_err(|_| WordParseError::BadExponent { column: caret + 1 })?;
        if v > 1_000_000 {
            return Err(WordParseError::BadExponent { column: caret + 1 });
        }
        Ok(Some(if neg { -v } else { v }))
    }

    fn single(&self, name: &str) -> Option<Letter> {
        if let Some(i) = self.names.iter().position(|n| n.as_ref() == name) {
            return Some(Letter::pos(i));
        }
        let mut cs = name.chars();
        if let (Some(c), None) = (cs.next(), cs.next()) {
            if c.is_ascii_uppercase() {
                let lower = c.to_ascii_lowercase().to_string();
                if let Some(i) = self.names.iter().position(|n| n.as_ref() == lower) {
                    return Some(Letter::neg(i));
                }
            }
        }
        None
    }

    fn resolve(&self, ident: &str, column0: usize) -> Result<Vec<Letter>, WordParseError> {
        if let Some(l) = self.single(ident) {
            return Ok(vec![l]);
        }
        // Greedy longest-prefix split into generator names.
        let mut out = Vec::new();
        let mut rest = ident;
        let mut offset = 0;
        while !rest.is_empty() {
            let found = (1..=rest.len())
                .rev()
                .filter(|&k| rest.is_char_boundary(k))
                .find_map(|k| self.single(&rest[..k]).map(|l| (k, l)));
            match found {
                Some((k, l)) => {
                    out.push(l);
                    rest = &rest[k..];
                    offset += k;
                }
                None => {
                    return Err(WordParseError::UnknownGenerator {
                        name: ident.to_string(),
                        column: column0 + offset + 1,
                    })
                }
            }
        }
        Ok(out)
    }
}

fn power(base: &[Letter], exp: i64) -> Vec<Letter> {
    let mut out = Vec::new();
    for _ in 0..exp.unsigned_abs() {
        if exp >= 0 {
            push_reduced(&mut out, base.iter().copied());
        } else {
            push_reduced(&mut out, base.iter().rev().map(|l| l.inverse()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: Letter = Letter(0);
    const AI: Letter = Letter(1);
    const B: Letter = Letter(2);
    const BI: Letter = Letter(3);

    fn w(ls: &[Letter]) -> Word {
        free_reduce(ls)
    }

    #[test]
    fn free_reduce_examples() {
        assert!(free_reduce(&[A, AI]).is_empty());
        assert_eq!(free_reduce(&[A, B, BI, A]).letters(), &[A, A]);
        assert!(free_reduce(&[A, B, AI, A, BI, AI]).is_empty());
    }

    #[test]
    fn invert_examples() {
        assert!(Word::empty().inverse().is_empty());
        assert_eq!(w(&[A, B]).inverse().letters(), &[BI, AI]);
        assert_eq!(w(&[A, A, BI]).inverse().letters(), &[B, AI, AI]);
    }

    #[test]
    fn concat_examples() {
        assert_eq!(w(&[A, B]).concat(&w(&[BI])).letters(), &[A]);
        let x = w(&[A, BI, A]);
        assert_eq!(Word::empty().concat(&x), x);
        assert!(w(&[A, B]).concat(&w(&[BI, AI])).is_empty());
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (core, conj) = w(&[A, B, AI]).cyclic_reduce();
        assert_eq!(core.letters(), &[B]);
        assert_eq!(conj.letters(), &[A]);
        let (core, conj) = w(&[A, B]).cyclic_reduce();
        assert_eq!(core.letters(), &[A, B]);
        assert!(conj.is_empty());
        let (core, conj) = w(&[A, A, B, AI, AI]).cyclic_reduce();
        assert_eq!(core.letters(), &[B]);
        assert_eq!(conj.letters(), &[A, A]);
    }

    #[test]
    fn cyclic_reduce_single_letter_and_empty() {
        let (core, conj) = w(&[A]).cyclic_reduce();
        assert_eq!(core.letters(), &[A]);
        assert!(conj.is_empty());
        let (core, conj) = Word::empty().cyclic_reduce();
        assert!(core.is_empty() && conj.is_empty());
    }

    #[test]
    fn cyclic_conjugates_examples() {
        let cs = w(&[A, B]).cyclic_conjugates();
        assert_eq!(cs, vec![w(&[A, B]), w(&[B, A])]);
        assert_eq!(w(&[A, A, A]).cyclic_conjugates(), vec![w(&[A, A, A])]);
        assert_eq!(Word::empty().cyclic_conjugates(), vec![Word::empty()]);
        assert_eq!(w(&[A, B, A, B]).cyclic_conjugates().len(), 2);
    }

    #[test]
    fn least_rotation_matches_naive() {
        let s = [3, 1, 2, 1, 2, 1, 1];
        let naive = (0..s.len()).min_by_key(|&k| s[k..].iter().chain(&s[..k]).copied().collect::<Vec<_>>()).unwrap();
        assert_eq!(least_rotation(&s), naive);
        assert_eq!(least_rotation(&[1, 1, 1]), 0);
    }

    #[test]
    fn parse_examples() {
        let a = ["a"];
        assert_eq!(parse_word("a^5", &a).unwrap(), Word::power_of(0, 5));
        let xy = ["x", "y"];
        let c = parse_word("x y x^-1 y^-1", &xy).unwrap();
        assert_eq!(c.letters(), &[A, B, AI, BI]);
        let ab = ["a", "b"];
        let r = parse_word("b a b^-1 a^-4", &ab).unwrap();
        assert_eq!(r.len(), 7);
    }

    #[test]
    fn parse_variants() {
        let sr = ["s", "r"];
        let a = parse_word("srsr^-4", &sr).unwrap();
        let b = parse_word("s r s r^-4", &sr).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_word("(s r)^2", &sr).unwrap(), parse_word("s r s r", &sr).unwrap());
        assert_eq!(parse_word("[s, r]", &sr).unwrap(), parse_word("s r s^-1 r^-1", &sr).unwrap());
        assert_eq!(parse_word("S r", &sr).unwrap(), parse_word("s^-1 r", &sr).unwrap());
        assert!(parse_word("1", &sr).unwrap().is_empty());
        assert!(parse_word("  ", &sr).unwrap().is_empty());
        assert_eq!(parse_word("s*r", &sr).unwrap(), parse_word("s r", &sr).unwrap());
    }

    #[test]
    fn parse_errors() {
        let ab = ["a", "b"];
        assert!(matches!(parse_word("a c", &ab), Err(WordParseError::UnknownGenerator { column: 3, .. })));
        assert!(matches!(parse_word("a^", &ab), Err(WordParseError::BadExponent { column: 2 })));
        assert!(matches!(parse_word("a^-x", &ab), Err(WordParseError::BadExponent { .. })));
        assert!(matches!(parse_word("(a b", &ab), Err(WordParseError::UnexpectedEnd)));
    }

    #[test]
    fn printer_round_trip() {
        let sr = ["s", "r"];
        let wd = parse_word("s r^2 s r^-8", &sr).unwrap();
        let text = wd.display(&sr).to_string();
        assert_eq!(text, "s r^2 s r^-8");
        assert_eq!(parse_word(&text, &sr).unwrap(), wd);
        assert_eq!(Word::empty().display(&sr).to_string(), "1");
    }
}
