//! Concrete finite groups from presentations via coset enumeration over the
//! trivial subgroup (regular representation).
//!
//! The enumerator is HLT with a lookahead pass when the live-coset budget is
//! reached. Scan order is fixed (cosets in creation order, relators in index
//! order, letters in code order), so the resulting numbering is deterministic.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::rc::Rc;

use thiserror::Error;

use crate::presentation::Presentation;
use crate::words::{Letter, Word};

const NONE: u32 = u32::MAX;

/// Live-coset budget used when callers do not choose one.
pub const DEFAULT_COSET_BUDGET: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizationError {
    #[error("coset enumeration exceeded the budget of {budget} cosets (group too large or infinite)")]
    BudgetExceeded { budget: usize },
    #[error("word uses generator {generator} but the group has {rank} generators")]
    ForeignWord { generator: usize, rank: usize },
    #[error("element id {0} out of range")]
    BadElement(usize),
}

/// A finite group given by its right regular action on itself.
///
/// Element `i` is the coset `H·g_i` of the trivial subgroup, i.e. the group
/// element `g_i`; the identity is element 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRealization {
    rank: usize,
    /// `table[i * 2 * rank + code]` = element id of `g_i · letter`.
    table: Vec<u32>,
    order: usize,
    /// Breadth-first spanning tree: (parent element, letter) for each non-identity id.
    tree: Vec<(u32, Letter)>,
    depth: Vec<u32>,
}

impl FiniteRealization {
    pub const IDENTITY: usize = 0;

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn act(&self, element: usize, letter: Letter) -> usize {
        self.table[element * 2 * self.rank + letter.code() as usize] as usize
    }

    /// Permutation of `{0..order}` induced by right multiplication by a generator.
    pub fn generator_map(&self, generator: usize) -> Vec<usize> {
        (0..self.order).map(|e| self.act(e, Letter::pos(generator))).collect()
    }

    fn check(&self, w: &Word) -> Result<(), RealizationError> {
        match w.max_generator() {
            Some(g) if g >= self.rank => Err(RealizationError::ForeignWord { generator: g, rank: self.rank }),
            _ => Ok(()),
        }
    }

    /// Element represented by `w`.
    pub fn evaluate(&self, w: &Word) -> Result<usize, RealizationError> {
        self.check(w)?;
        Ok(self.apply(Self::IDENTITY, w.letters()))
    }

    /// Right-multiply `element` by the letters in order.
    pub fn apply(&self, element: usize, letters: &[Letter]) -> usize {
        letters.iter().fold(element, |e, &l| self.act(e, l))
    }

    pub fn is_null_homotopic(&self, w: &Word) -> Result<bool, RealizationError> {
        Ok(self.evaluate(w)? == Self::IDENTITY)
    }

    /// Shortlex-least word representing the element (from the BFS tree).
    pub fn representative(&self, element: usize) -> Word {
        let mut letters = Vec::new();
        let mut e = element;
        while e != Self::IDENTITY {
            let (parent, l) = self.tree[e];
            letters.push(l);
            e = parent as usize;
        }
        letters.reverse();
        Word::from_letters(letters)
    }

    /// Word length of the element with respect to the generators.
    pub fn word_length(&self, element: usize) -> usize {
        self.depth[element] as usize
    }

    pub fn multiply(&self, x: usize, y: usize) -> usize {
        self.apply(x, self.representative(y).letters())
    }

    pub fn inverse(&self, x: usize) -> usize {
        self.evaluate(&self.representative(x).inverse()).expect("own word")
    }

    pub fn element_order(&self, element: usize) -> Result<usize, RealizationError> {
        if element >= self.order {
            return Err(RealizationError::BadElement(element));
        }
        let rep = self.representative(element);
        let mut e = element;
        let mut k = 1;
        while e != Self::IDENTITY {
            e = self.apply(e, rep.letters());
            k += 1;
        }
        Ok(k)
    }

    /// One CSV row per generator: `name,image of 0,image of 1,...`.
    pub fn to_csv(&self, names: &[String]) -> String {
        let mut out = String::from("generator");
        for i in 0..self.order {
            let _ = write!(out, ",{i}");
        }
        out.push('\n');
        for g in 0..self.rank {
            out.push_str(names.get(g).map(String::as_str).unwrap_or("?"));
            for img in self.generator_map(g) {
                let _ = write!(out, ",{img}");
            }
            out.push('\n');
        }
        out
    }

    fn from_table(rank: usize, table: Vec<u32>, order: usize) -> Self {
        let width = 2 * rank;
        let mut tree = vec![(NONE, Letter::from_code(0)); order];
        let mut depth = vec![u32::MAX; order];
        depth[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for code in 0..width {
                let f = table[e * width + code] as usize;
                if depth[f] == u32::MAX {
                    depth[f] = depth[e] + 1;
                    tree[f] = (e as u32, Letter::from_code(code as u16));
                    queue.push_back(f);
                }
            }
        }
        FiniteRealization { rank, table, order, tree, depth }
    }
}

/// Free-function form of [`FiniteRealization::evaluate`].
pub fn evaluate(w: &Word, r: &FiniteRealization) -> Result<usize, RealizationError> {
    r.evaluate(w)
}

/// Free-function form of [`FiniteRealization::is_null_homotopic`].
pub fn is_null_homotopic(w: &Word, r: &FiniteRealization) -> Result<bool, RealizationError> {
    r.is_null_homotopic(w)
}

/// Free-function form of [`FiniteRealization::element_order`].
pub fn element_order(element: usize, r: &FiniteRealization) -> Result<usize, RealizationError> {
    r.element_order(element)
}

/// Enumerate cosets of the trivial subgroup. `max_cosets` bounds the number
/// of simultaneously live cosets.
pub fn coset_enumerate(p: &Presentation, max_cosets: usize) -> Result<FiniteRealization, RealizationError> {
    let rank = p.rank();
    if rank == 0 {
        return Ok(FiniteRealization::from_table(0, Vec::new(), 1));
    }
    let relators: Vec<Vec<u16>> = p.relators().iter().map(|r| r.letters().iter().map(|l| l.code()).collect()).collect();
    let mut en = Enumerator::new(rank, relators, max_cosets.max(1));
    en.run()?;
    Ok(en.finish())
}

struct Enumerator {
    width: usize,
    table: Vec<u32>,
    /// Union-find parent; `parent[i] == i` iff coset i is live.
    parent: Vec<u32>,
    live: usize,
    max_live: usize,
    max_total: usize,
    relators: Rc<Vec<Vec<u16>>>,
    queue: VecDeque<u32>,
}

impl Enumerator {
    fn new(rank: usize, relators: Vec<Vec<u16>>, max_live: usize) -> Self {
        let width = 2 * rank;
        Enumerator {
            width,
            table: vec![NONE; width],
            parent: vec![0],
            live: 1,
            max_live,
            // Total definitions are bounded too, so pathological inputs terminate.
            max_total: max_live.saturating_mul(64).max(1024),
            relators: Rc::new(relators),
            queue: VecDeque::new(),
        }
    }

    #[inline]
    fn get(&self, c: u32, x: u16) -> u32 {
        self.table[c as usize * self.width + x as usize]
    }

    #[inline]
    fn set(&mut self, c: u32, x: u16, d: u32) {
        self.table[c as usize * self.width + x as usize] = d;
    }

    fn alive(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut c = c;
        while self.parent[c as usize] != r {
            let next = self.parent[c as usize];
            self.parent[c as usize] = r;
            c = next;
        }
        r
    }

    /// Define `c·x` as a new coset. Returns true when a lookahead pass ran
    /// first (and possibly collapsed cosets) instead.
    fn define(&mut self, c: u32, x: u16) -> Result<bool, RealizationError> {
        if self.live >= self.max_live {
            self.lookahead();
            if self.live >= self.max_live {
                return Err(RealizationError::BudgetExceeded { budget: self.max_live });
            }
            return Ok(true);
        }
        let n = self.parent.len();
        if n >= self.max_total || n >= NONE as usize - 1 {
            return Err(RealizationError::BudgetExceeded { budget: self.max_live });
        }
        let d = n as u32;
        self.parent.push(d);
        self.table.extend(std::iter::repeat_n(NONE, self.width));
        self.live += 1;
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        Ok(false)
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi as usize] = lo;
        self.live -= 1;
        self.queue.push_back(hi);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        while let Some(g) = self.queue.pop_front() {
            for x in 0..self.width as u16 {
                let d = self.get(g, x);
                if d == NONE {
                    continue;
                }
                if self.get(d, x ^ 1) == g {
                    self.set(d, x ^ 1, NONE);
                }
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mu_x = self.get(mu, x);
                if mu_x != NONE {
                    self.merge(nu, mu_x);
                } else {
                    let nu_xi = self.get(nu, x ^ 1);
                    if nu_xi != NONE {
                        self.merge(mu, nu_xi);
                    } else {
                        self.set(mu, x, nu);
                        self.set(nu, x ^ 1, mu);
                    }
                }
            }
        }
    }

    /// Trace relator `w` from coset `c`, defining new cosets where needed
    /// (`fill`), or only deducing/coinciding otherwise.
    fn scan(&mut self, c: u32, w: &[u16], fill: bool) -> Result<(), RealizationError> {
        'restart: loop {
            if !self.alive(c) {
                return Ok(());
            }
            let mut f = c;
            let mut b = c;
            let mut i = 0isize;
            let mut j = w.len() as isize - 1;
            loop {
                while i <= j && self.get(f, w[i as usize]) != NONE {
                    f = self.get(f, w[i as usize]);
                    i += 1;
                }
                if i > j {
                    if f != b {
                        self.coincidence(f, b);
                    }
                    return Ok(());
                }
                while j >= i && self.get(b, w[j as usize] ^ 1) != NONE {
                    b = self.get(b, w[j as usize] ^ 1);
                    j -= 1;
                }
                if j < i {
                    self.coincidence(f, b);
                    return Ok(());
                }
                if i == j {
                    let x = w[i as usize];
                    self.set(f, x, b);
                    self.set(b, x ^ 1, f);
                    return Ok(());
                }
                if !fill {
                    return Ok(());
                }
                if self.define(f, w[i as usize])? {
                    // A lookahead ran; cosets on this trace may have merged.
                    continue 'restart;
                }
            }
        }
    }

    fn lookahead(&mut self) {
        let rels = Rc::clone(&self.relators);
        let mut c = 0u32;
        while (c as usize) < self.parent.len() {
            for w in rels.iter() {
                if !self.alive(c) {
                    break;
                }
                // Scans without filling never define, so they cannot fail.
                let _ = self.scan(c, w, false);
            }
            c += 1;
        }
    }

    fn run(&mut self) -> Result<(), RealizationError> {
        let rels = Rc::clone(&self.relators);
        let mut c = 0u32;
        while (c as usize) < self.parent.len() {
            for w in rels.iter() {
                if !self.alive(c) {
                    break;
                }
                self.scan(c, w, true)?;
            }
            let mut x = 0u16;
            while (x as usize) < self.width && self.alive(c) {
                if self.get(c, x) == NONE && self.define(c, x)? {
                    continue;
                }
                x += 1;
            }
            c += 1;
        }
        Ok(())
    }

    fn finish(mut self) -> FiniteRealization {
        let n = self.parent.len();
        let mut new_id = vec![NONE; n];
        let mut order = 0u32;
        for c in 0..n as u32 {
            if self.alive(c) {
                new_id[c as usize] = order;
                order += 1;
            }
        }
        let rank = self.width / 2;
        let mut table = vec![NONE; order as usize * self.width];
        for c in 0..n as u32 {
            if !self.alive(c) {
                continue;
            }
            for x in 0..self.width as u16 {
                let d = self.get(c, x);
                let d = self.rep(d);
                table[new_id[c as usize] as usize * self.width + x as usize] = new_id[d as usize];
            }
        }
        debug_assert!(table.iter().all(|&v| v != NONE));
        FiniteRealization::from_table(rank, table, order as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn realize(gens: &[&str], rels: &[&str]) -> FiniteRealization {
        coset_enumerate(&Presentation::from_strs(gens, rels), 10_000).unwrap()
    }

    fn check_valid(p: &Presentation, r: &FiniteRealization) {
        for g in 0..p.rank() {
            let mut m = r.generator_map(g);
            m.sort_unstable();
            assert_eq!(m, (0..r.order()).collect::<Vec<_>>());
        }
        for rel in p.relators() {
            for start in 0..r.order() {
                assert_eq!(r.apply(start, rel.letters()), start);
            }
        }
        assert!((0..r.order()).all(|e| r.word_length(e) < r.order()));
    }

    #[test]
    fn orders() {
        assert_eq!(realize(&["a"], &["a^5"]).order(), 5);
        assert_eq!(realize(&["s", "r"], &["s^2", "r^5", "s r s r^-4"]).order(), 10);
        assert_eq!(realize(&["a", "b"], &["b a b^-1 a^-4", "a^9", "b^3"]).order(), 27);
        assert_eq!(realize(&["a", "s"], &["s^5", "a^7", "s^-1 a s a^-2"]).order(), 5);
        assert_eq!(realize(&["a", "b"], &["a^2", "b^3", "(a b)^5"]).order(), 60);
        assert_eq!(realize(&["a"], &["a^4", "a^6"]).order(), 2);
        assert_eq!(realize(&["a", "b"], &["a", "b"]).order(), 1);
    }

    #[test]
    fn small_budget_examples() {
        let z5 = Presentation::from_strs(&["a"], &["a^5"]);
        assert_eq!(coset_enumerate(&z5, 100).unwrap().order(), 5);
        let d10 = Presentation::from_strs(&["s", "r"], &["s^2", "r^5", "s r s r^-4"]);
        assert_eq!(coset_enumerate(&d10, 100).unwrap().order(), 10);
        let h3 = Presentation::from_strs(&["a", "b"], &["b a b^-1 a^-4", "a^9", "b^3"]);
        assert_eq!(coset_enumerate(&h3, 200).unwrap().order(), 27);
    }

    #[test]
    fn tables_are_valid() {
        for (g, r) in [
            (vec!["a", "b"], vec!["b a b^-1 a^-6", "a^25", "b^5"]),
            (vec!["s", "r", "t"], vec!["s^2", "r^5", "t^2", "(s r)^2", "[s,t]", "[r,t]"]),
            (vec!["a", "s"], vec!["s^5", "a^7", "s^-1 a s a^-2"]),
        ] {
            let p = Presentation::from_strs(&g, &r);
            let real = coset_enumerate(&p, 10_000).unwrap();
            check_valid(&p, &real);
        }
    }

    #[test]
    fn infinite_group_fails_cleanly() {
        let z2 = Presentation::from_strs(&["a", "b"], &["a b a^-1 b^-1"]);
        assert!(matches!(coset_enumerate(&z2, 500), Err(RealizationError::BudgetExceeded { .. })));
        let free = Presentation::from_strs(&["a"], &[]);
        assert!(coset_enumerate(&free, 50).is_err());
    }

    #[test]
    fn evaluate_and_orders() {
        let z5 = realize(&["a"], &["a^5"]);
        assert_eq!(z5.evaluate(&Word::empty()).unwrap(), 0);
        assert!(z5.is_null_homotopic(&Word::power_of(0, 5)).unwrap());
        assert!(z5.is_null_homotopic(&Word::power_of(0, 10)).unwrap());
        assert!(!z5.is_null_homotopic(&Word::power_of(0, 3)).unwrap());
        assert_ne!(z5.evaluate(&Word::power_of(0, 2)).unwrap(), 0);
        assert_eq!(z5.element_order(0).unwrap(), 1);
        let a = z5.evaluate(&Word::power_of(0, 1)).unwrap();
        assert_eq!(z5.element_order(a).unwrap(), 5);
        assert!(z5.evaluate(&Word::power_of(1, 1)).is_err());

        let d10 = realize(&["s", "r"], &["s^2", "r^5", "s r s r^-4"]);
        let r = d10.evaluate(&Word::power_of(1, 1)).unwrap();
        assert_eq!(d10.element_order(r).unwrap(), 5);
        let s = d10.evaluate(&Word::power_of(0, 1)).unwrap();
        assert_eq!(d10.element_order(s).unwrap(), 2);
        assert_eq!(d10.multiply(s, d10.inverse(s)), 0);
    }

    #[test]
    fn example_generator_is_trivial() {
        let g = realize(&["a", "s"], &["s^5", "a^7", "s^-1 a s a^-2"]);
        assert!(g.is_null_homotopic(&Word::power_of(0, 1)).unwrap());
    }

    #[test]
    fn csv_export() {
        let z3 = realize(&["a"], &["a^3"]);
        let csv = z3.to_csv(&["a".to_string()]);
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("generator,0,1,2\n"));
    }
}
