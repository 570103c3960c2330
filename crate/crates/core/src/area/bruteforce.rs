//! Literal enumeration of products of conjugated relators.
//!
//! The conjugate set `C = { g r^{±1} g^{-1} : |g| <= L }` is listed in full.
//! Products of exactly `j` elements of `C` are stored for small `j`, and a
//! word is tested for `d` factors by splitting `d = a + b` (plus, if needed, a
//! depth-first choice of the outermost factors) and looking up `w q^{-1}` in
//! the stored level `a` for every `q` in level `b`.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::presentation::Presentation;
use crate::words::{free_reduce, Letter, Word};

/// Stored product levels stop growing past this many words.
pub const DEFAULT_LEVEL_LIMIT: usize = 3_000_000;

/// Cached conjugate set and product levels for one presentation.
pub struct BruteForceOracle {
    conjugates: Vec<Word>,
    /// `levels[j]` holds every reduced product of exactly `j` conjugates.
    levels: Vec<FxHashSet<Word>>,
}

fn all_reduced_words(rank: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Vec::<Letter>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for code in 0..(2 * rank) as u16 {
                let l = Letter::from_code(code);
                if w.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().map(|v| Word::from_letters(v.iter().copied())));
        frontier = next;
    }
    out
}

fn product(u: &Word, v: &Word) -> Word {
    let mut raw: Vec<Letter> = Vec::with_capacity(u.len() + v.len());
    raw.extend_from_slice(u.letters());
    raw.extend_from_slice(v.letters());
    free_reduce(&raw)
}

/// Distinct words `g r^{±1} g^{-1}` with `|g| <= max_conj_len`, in
/// generation order, plus the same set hashed.
fn conjugate_set(p: &Presentation, max_conj_len: usize) -> (Vec<Word>, FxHashSet<Word>) {
    let mut seen = FxHashSet::default();
    let mut conjugates = Vec::new();
    for g in all_reduced_words(p.rank(), max_conj_len) {
        let gi = g.inverse();
        for r in p.relators() {
            for rr in [r.clone(), r.inverse()] {
                let c = product(&product(&g, &rr), &gi);
                if seen.insert(c.clone()) {
                    conjugates.push(c);
                }
            }
        }
    }
    (conjugates, seen)
}

impl BruteForceOracle {
    /// Conjugators of length `<= max_conj_len`; product levels up to
    /// `max_level`, or fewer if a level would exceed `level_limit` words.
    pub fn new(p: &Presentation, max_conj_len: usize, max_level: usize, level_limit: usize) -> Self {
        let (conjugates, seen) = conjugate_set(p, max_conj_len);
        let mut levels = vec![std::iter::once(Word::empty()).collect::<FxHashSet<_>>(), seen];
        while levels.len() <= max_level {
            let prev = levels.last().expect("levels start nonempty");
            if prev.len().saturating_mul(conjugates.len()) > level_limit.saturating_mul(4) {
                break;
            }
            let mut next = FxHashSet::default();
            let mut overflow = false;
            'fill: for u in prev {
                for c in &conjugates {
                    next.insert(product(u, c));
                    if next.len() > level_limit {
                        overflow = true;
                        break 'fill;
                    }
                }
            }
            if overflow {
                break;
            }
            levels.push(next);
        }
        BruteForceOracle { conjugates, levels }
    }

    pub fn conjugate_count(&self) -> usize {
        self.conjugates.len()
    }

    /// Highest fully stored product level.
    pub fn stored_levels(&self) -> usize {
        self.levels.len() - 1
    }

    /// Least `d <= max_d` such that `w` is a product of `d` conjugates.
    pub fn area(&self, w: &Word, max_d: usize) -> Option<usize> {
        (0..=max_d).find(|&d| self.is_product(w, d))
    }

    /// Is `w` a product of exactly `d` elements of the conjugate set?
    pub fn is_product(&self, w: &Word, d: usize) -> bool {
        let m = self.stored_levels();
        if d <= m {
            return self.levels[d].contains(w);
        }
        if d <= 2 * m {
            let (a, b) = (m, d - m);
            let wanted = &self.levels[a];
            return self.levels[b].iter().any(|q| wanted.contains(&product(w, &q.inverse())));
        }
        // Peel the leftmost factor and recurse.
        self.conjugates.iter().any(|c| self.is_product(&product(&c.inverse(), w), d - 1))
    }
}

/// Products of conjugates grown one factor at a time from the empty word,
/// keeping only partial products of length `<= max_len`.
///
/// Every recorded value is the length of an explicit product, so it bounds
/// the area from above; with generous bounds it is the area. Unlike
/// [`BruteForceOracle`] this covers every word of a ball in one sweep.
pub struct ProductBall {
    areas: FxHashMap<Word, usize>,
}

impl ProductBall {
    pub fn new(p: &Presentation, max_conj_len: usize, max_d: usize, max_len: usize) -> Self {
        let (conjugates, _) = conjugate_set(p, max_conj_len);
        let mut areas = FxHashMap::default();
        areas.insert(Word::empty(), 0);
        let mut frontier = vec![Word::empty()];
        for d in 1..=max_d {
            let mut next = Vec::new();
            for u in &frontier {
                for c in &conjugates {
                    let v = product(u, c);
                    if v.len() <= max_len && !areas.contains_key(&v) {
                        areas.insert(v.clone(), d);
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        ProductBall { areas }
    }

    /// Least number of factors found for `w`.
    pub fn area(&self, w: &Word) -> Option<usize> {
        self.areas.get(w).copied()
    }

    pub fn len(&self) -> usize {
        self.areas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.areas.is_empty()
    }
}

/// Least number `d <= max_d` of conjugates `g r^{±1} g^{-1}` with
/// `|g| <= max_conj_len` whose product freely reduces to `w`; `None` if there
/// is none within those bounds.
pub fn area_bruteforce(w: &Word, p: &Presentation, max_d: usize, max_conj_len: usize) -> Option<usize> {
    if w.is_empty() {
        return Some(0);
    }
    let oracle = BruteForceOracle::new(p, max_conj_len, max_d.div_ceil(2).max(1), DEFAULT_LEVEL_LIMIT);
    oracle.area(w, max_d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_examples() {
        let p = Presentation::from_strs(&["a"], &["a^5"]);
        let w = p.parse_word("a^5").unwrap();
        assert_eq!(area_bruteforce(&w, &p, 2, 2), Some(1));
        let w = p.parse_word("a^10").unwrap();
        assert_eq!(area_bruteforce(&w, &p, 3, 1), Some(2));
        assert_eq!(area_bruteforce(&Word::empty(), &p, 1, 0), Some(0));
        let w = p.parse_word("a^2").unwrap();
        assert_eq!(area_bruteforce(&w, &p, 3, 2), None);
    }

    #[test]
    fn product_ball_matches_levels() {
        let p = Presentation::from_strs(&["s", "r"], &["s^2", "r^5", "s r s r^-4"]);
        let ball = ProductBall::new(&p, 2, 4, 10);
        let oracle = BruteForceOracle::new(&p, 2, 2, DEFAULT_LEVEL_LIMIT);
        for w in ["s^2", "r^5", "s r^-1 s r^-1", "s r^2 s r^-3"] {
            let w = p.parse_word(w).unwrap();
            let b = ball.area(&w).unwrap();
            assert!(oracle.area(&w, 4).is_none_or(|a| a <= b), "{w:?}");
        }
        assert_eq!(ball.area(&p.parse_word("s r^-1 s r^-1").unwrap()), Some(4));
    }

    #[test]
    fn reduced_word_counts() {
        // 1 + 4 + 12 + 36 words of length <= 3 on two generators.
        assert_eq!(all_reduced_words(2, 3).len(), 53);
    }

    #[test]
    fn peeling_beyond_stored_levels() {
        let p = Presentation::from_strs(&["a"], &["a^3"]);
        let oracle = BruteForceOracle::new(&p, 0, 1, DEFAULT_LEVEL_LIMIT);
        let w = p.parse_word("a^12").unwrap();
        assert_eq!(oracle.area(&w, 5), Some(4));
    }
}
