//! A* over multisets of cyclic words.
//!
//! Area is a conjugacy invariant, so a word is kept as the least rotation of
//! its cyclic reduction. A search state is a multiset of such words whose
//! areas add up. Only the first word `K` of a state (shortest, then least) is
//! ever touched, and only at its first letter `e = K[0]`. In a minimal van
//! Kampen diagram for `K` the edge of `e` lies either on a face or on a
//! filament, so two kinds of move suffice:
//!
//! * face: splice a cyclic conjugate `c` of a relator or its inverse with
//!   `last(c) = e^{-1}` in front of `K` (cost 1);
//! * split: `K = e u e^{-1} v` with `u` null-homotopic becomes the pair
//!   `u`, `v` (cost 0).
//!
//! Following the faces of a fixed minimal diagram in this order never makes
//! the total length exceed `|w| + (d - 1)(max relator length - 2)`, so the
//! length cap is only a resource limit: a result is certified exact when no
//! successor rejected by the cap could have led to a cheaper filling.
//! Otherwise the cap is escalated by the longest relator length until the
//! value is stable across consecutive escalations.
//!
//! The heuristic is the exponent-sum bound of [`ExponentBound`], summed over
//! the words of a state.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};

use super::heuristic::{BoundCache, ExponentBound, UNREACHABLE};
use super::{AreaCertificate, AreaError, AreaResult, CertificateStep, SearchConfig};
use crate::presentation::Presentation;
use crate::realization::{coset_enumerate, FiniteRealization};
use crate::words::{least_rotation, push_reduced, Letter, Word};

/// Consecutive escalations that must agree before a value is called exact.
const STABLE_ESCALATIONS: usize = 2;

/// Coset budget used to decide null-homotopy of split halves.
const REALIZATION_BUDGET: usize = 1 << 16;

/// Separates the words of a state inside its hash key.
const SEP: Letter = Letter::from_code(u16::MAX);

/// High bit of [`Node::mv`] marks a split; the rest is the split index.
const SPLIT: u32 = 1 << 31;

struct Move {
    letters: Box<[Letter]>,
    relator: usize,
    sign: i8,
    rotation: usize,
}

/// Reusable area engine for one presentation.
///
/// Holds the relator move table, the exponent-sum bound and, when the group
/// is small enough to enumerate, its regular representation (used to test
/// split halves). Safe to share between threads.
pub struct AreaSolver {
    rank: usize,
    max_relator_length: usize,
    moves: Vec<Move>,
    /// Moves whose last letter is the inverse of the indexed letter code.
    by_letter: Vec<Vec<u32>>,
    /// `relator = conj · core · conj^{-1}` for each relator.
    relator_conj: Vec<Word>,
    bound: ExponentBound,
    realization: Option<FiniteRealization>,
}

struct Node {
    parent: u32,
    mv: u32,
    g: u32,
}

const ROOT: u32 = u32::MAX;

type Path = Vec<u32>;

enum Outcome {
    Found { area: usize, path: Path, rigorous: bool, states: usize },
    Exhausted { blocked: bool },
    Budget { states: usize, best: Option<(usize, Path)> },
}

/// Cyclically reduce a freely reduced `buf` and rotate to its least rotation.
/// Returns the canonical word plus the conjugator length `s` and rotation `m`:
/// `buf = buf[..s] · core · buf[..s]^{-1}` and `core = core[..m] · K · core[..m]^{-1}`.
fn canonical(buf: &[Letter]) -> (Vec<Letter>, usize, usize) {
    let n = buf.len();
    let mut s = 0;
    while 2 * s + 1 < n && buf[s] == buf[n - 1 - s].inverse() {
        s += 1;
    }
    let core = &buf[s..n - s];
    let m = least_rotation(core);
    let mut out = Vec::with_capacity(core.len());
    out.extend_from_slice(&core[m..]);
    out.extend_from_slice(&core[..m]);
    (out, s, m)
}

fn component_order(a: &[Letter], b: &[Letter]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

fn encode(mut comps: Vec<Vec<Letter>>) -> Box<[Letter]> {
    comps.sort_by(|a, b| component_order(a, b));
    let mut key = Vec::with_capacity(comps.iter().map(|c| c.len() + 1).sum());
    for (i, c) in comps.iter().enumerate() {
        if i > 0 {
            key.push(SEP);
        }
        key.extend_from_slice(c);
    }
    key.into_boxed_slice()
}

fn decode(key: &[Letter]) -> Vec<&[Letter]> {
    if key.is_empty() {
        return Vec::new();
    }
    key.split(|&l| l == SEP).collect()
}

fn inverse_letters(w: &[Letter]) -> impl Iterator<Item = Letter> + '_ {
    w.iter().rev().map(|l| l.inverse())
}

/// A successor state with its cost, before deduplication.
struct Successor {
    key: Box<[Letter]>,
    cost: u32,
    mv: u32,
    length: usize,
}

impl AreaSolver {
    /// Build the solver, enumerating the group if it has at most
    /// 65536 elements.
    pub fn new(p: &Presentation) -> Self {
        Self::with_realization(p, coset_enumerate(p, REALIZATION_BUDGET).ok())
    }

    /// Build the solver around a known realization of `p` (or none).
    pub fn with_realization(p: &Presentation, realization: Option<FiniteRealization>) -> Self {
        let mut moves = Vec::new();
        let mut by_letter = vec![Vec::new(); 2 * p.rank()];
        let mut relator_conj = Vec::new();
        let mut seen: FxHashSet<Box<[Letter]>> = FxHashSet::default();
        for (idx, r) in p.relators().iter().enumerate() {
            let (core, conj) = r.cyclic_reduce();
            relator_conj.push(conj);
            let inv = core.inverse();
            for rotation in 0..core.len() {
                for (sign, base) in [(1i8, &core), (-1i8, &inv)] {
                    let letters: Box<[Letter]> = base.rotate(rotation).letters().into();
                    if !seen.insert(letters.clone()) {
                        continue;
                    }
                    let last = *letters.last().expect("relators are nonempty");
                    by_letter[last.inverse().code() as usize].push(moves.len() as u32);
                    moves.push(Move { letters, relator: idx, sign, rotation });
                }
            }
        }
        AreaSolver {
            rank: p.rank(),
            max_relator_length: p.max_relator_length(),
            moves,
            by_letter,
            relator_conj,
            bound: ExponentBound::new(p),
            realization,
        }
    }

    pub fn realization(&self) -> Option<&FiniteRealization> {
        self.realization.as_ref()
    }

    fn is_null(&self, letters: &[Letter], bound: &mut BoundCache<'_>) -> bool {
        match &self.realization {
            Some(r) => r.apply(FiniteRealization::IDENTITY, letters) == FiniteRealization::IDENTITY,
            None => bound.word(letters) != UNREACHABLE,
        }
    }

    fn heuristic(&self, comps: &[&[Letter]], bound: &mut BoundCache<'_>) -> u32 {
        let mut h = 0u32;
        for c in comps {
            let b = bound.word(c);
            if b == UNREACHABLE {
                return UNREACHABLE;
            }
            h = h.saturating_add(b);
        }
        h
    }

    /// All successors of the state `key`, in a fixed order.
    fn successors(&self, key: &[Letter], bound: &mut BoundCache<'_>, out: &mut Vec<Successor>) {
        out.clear();
        let comps = decode(key);
        let k = comps[0];
        let rest = &comps[1..];
        let rest_len: usize = rest.iter().map(|c| c.len()).sum();
        let first = k[0];
        let mut buf = Vec::with_capacity(k.len() + self.max_relator_length);
        for &mi in &self.by_letter[first.code() as usize] {
            buf.clear();
            push_reduced(&mut buf, self.moves[mi as usize].letters.iter().copied());
            push_reduced(&mut buf, k.iter().copied());
            let (next, _, _) = canonical(&buf);
            let length = rest_len + next.len();
            let mut words: Vec<Vec<Letter>> = rest.iter().map(|c| c.to_vec()).collect();
            if !next.is_empty() {
                words.push(next);
            }
            out.push(Successor { key: encode(words), cost: 1, mv: mi, length });
        }
        for m in 2..k.len().saturating_sub(1) {
            if k[m] != first.inverse() || !self.is_null(&k[1..m], bound) {
                continue;
            }
            let (u, _, _) = canonical(&k[1..m]);
            let (v, _, _) = canonical(&k[m + 1..]);
            let length = rest_len + u.len() + v.len();
            let mut words: Vec<Vec<Letter>> = rest.iter().map(|c| c.to_vec()).collect();
            words.extend([u, v].into_iter().filter(|w| !w.is_empty()));
            out.push(Successor { key: encode(words), cost: 0, mv: SPLIT | m as u32, length });
        }
    }

    fn run(&self, start: &[Letter], cap: usize, max_area: usize, budget: usize) -> Outcome {
        let max_area = max_area.min(u32::MAX as usize - 1) as u32;
        let mut bound = BoundCache::new(&self.bound);
        let start = encode(vec![start.to_vec()]);
        let h0 = self.heuristic(&decode(&start), &mut bound);
        if h0 == UNREACHABLE || h0 > max_area {
            return Outcome::Exhausted { blocked: false };
        }
        let mut index: FxHashMap<Box<[Letter]>, u32> = FxHashMap::default();
        let mut nodes: Vec<Node> = vec![Node { parent: ROOT, mv: 0, g: 0 }];
        let mut buckets: Vec<Bucket> = Vec::new();
        index.insert(start.clone(), 0);
        push_bucket(&mut buckets, h0 as usize, (0, 0, start));

        // (area, parent node, final move)
        let mut best: Option<(u32, u32, u32)> = None;
        let mut blocked_min = u32::MAX;
        let mut succ = Vec::new();
        let mut f = h0 as usize;
        loop {
            while f < buckets.len() && buckets[f].is_empty() {
                f += 1;
            }
            if f >= buckets.len() || best.is_some_and(|b| f as u32 >= b.0) {
                break;
            }
            let (id, g, key) = buckets[f].pop_front().expect("nonempty bucket");
            if nodes[id as usize].g != g {
                continue;
            }
            self.successors(&key, &mut bound, &mut succ);
            for s in succ.drain(..) {
                let ng = g + s.cost;
                if s.key.is_empty() {
                    if best.is_none_or(|b| ng < b.0) {
                        best = Some((ng, id, s.mv));
                    }
                    continue;
                }
                let h = self.heuristic(&decode(&s.key), &mut bound);
                if h == UNREACHABLE {
                    continue;
                }
                let nf = ng + h;
                if nf > max_area || best.is_some_and(|b| nf >= b.0) {
                    continue;
                }
                if s.length > cap {
                    blocked_min = blocked_min.min(nf);
                    continue;
                }
                let node = Node { parent: id, mv: s.mv, g: ng };
                let nid = match index.get(&s.key) {
                    Some(&old) if nodes[old as usize].g <= ng => continue,
                    Some(&old) => {
                        nodes[old as usize] = node;
                        old
                    }
                    None => {
                        if nodes.len() >= budget {
                            let best = best.map(|b| (b.0 as usize, trace(&nodes, b.1, b.2)));
                            return Outcome::Budget { states: nodes.len(), best };
                        }
                        let nid = nodes.len() as u32;
                        nodes.push(node);
                        index.insert(s.key.clone(), nid);
                        nid
                    }
                };
                push_bucket(&mut buckets, nf as usize, (nid, ng, s.key));
                f = f.min(nf as usize);
            }
        }
        match best {
            Some((area, id, mv)) => Outcome::Found {
                area: area as usize,
                path: trace(&nodes, id, mv),
                rigorous: blocked_min >= area,
                states: nodes.len(),
            },
            None => Outcome::Exhausted { blocked: blocked_min != u32::MAX },
        }
    }

    /// Replay a move path from `w`, recording each removed face as a step.
    ///
    /// The state is tracked as an ordered product of `h_j K_j h_j^{-1}`;
    /// removing a face from factor `i` contributes the step conjugated by the
    /// product `P` of the factors before it.
    fn certificate(&self, w: &Word, path: &Path) -> AreaCertificate {
        let (k, s, m) = canonical(w.letters());
        let mut h = Vec::new();
        push_reduced(&mut h, w.letters()[..s + m].iter().copied());
        let mut factors: Vec<(Vec<Letter>, Vec<Letter>)> = vec![(k, h)];
        let mut steps = Vec::with_capacity(path.len());
        for &mv in path {
            let i = (0..factors.len())
                .min_by(|&a, &b| component_order(&factors[a].0, &factors[b].0).then(a.cmp(&b)))
                .expect("path continues past the empty state");
            let (k, h) = factors.remove(i);
            if mv & SPLIT != 0 {
                let m = (mv & !SPLIT) as usize;
                let mut pieces = Vec::new();
                for (word, prefix) in [(&k[1..m], &k[..1]), (&k[m + 1..], &k[..0])] {
                    let (core, s, r) = canonical(word);
                    if core.is_empty() {
                        continue;
                    }
                    let mut hh = h.clone();
                    push_reduced(&mut hh, prefix.iter().copied());
                    push_reduced(&mut hh, word[..s + r].iter().copied());
                    pieces.push((core, hh));
                }
                factors.splice(i..i, pieces);
                continue;
            }
            let mv = &self.moves[mv as usize];
            // c = c1 c2 with base = c2 c1 a rotation of the relator core;
            // c K = c · K removes the face (h c2^{-1}) base^{-1} (h c2^{-1})^{-1}.
            let mut conj = Vec::new();
            for (fk, fh) in &factors[..i] {
                push_reduced(&mut conj, fh.iter().copied());
                push_reduced(&mut conj, fk.iter().copied());
                push_reduced(&mut conj, inverse_letters(fh));
            }
            push_reduced(&mut conj, h.iter().copied());
            let c2 = &mv.letters[mv.letters.len() - mv.rotation..];
            push_reduced(&mut conj, inverse_letters(c2));
            push_reduced(&mut conj, inverse_letters(self.relator_conj[mv.relator].letters()));
            steps.push(CertificateStep { conjugator: Word::from_letters(conj), relator: mv.relator, sign: -mv.sign });
            let mut buf = Vec::new();
            push_reduced(&mut buf, mv.letters.iter().copied());
            push_reduced(&mut buf, k.iter().copied());
            let (next, s, r) = canonical(&buf);
            if !next.is_empty() {
                let mut hh = h;
                push_reduced(&mut hh, buf[..s + r].iter().copied());
                factors.insert(i, (next, hh));
            }
        }
        debug_assert!(factors.is_empty(), "move path does not reach the empty word");
        AreaCertificate { steps }
    }

    fn check_owned(&self, w: &Word) -> Result<(), AreaError> {
        match w.max_generator() {
            Some(g) if g >= self.rank => Err(AreaError::ForeignWord(g)),
            _ => Ok(()),
        }
    }

    /// See [`area_search`].
    pub fn search(&self, w: &Word, cfg: &SearchConfig) -> Result<AreaResult, AreaError> {
        self.check_owned(w)?;
        let (start, _, _) = canonical(w.letters());
        if start.is_empty() {
            return Ok(AreaResult { area: 0, certificate: AreaCertificate::default(), exact: true, states: 1, cap: 0 });
        }
        let growth = self.max_relator_length.saturating_sub(2);
        let full_cap = |d: usize| start.len() + d.saturating_sub(1) * growth;
        let mut cap = cfg.max_intermediate_length.max(start.len());
        let mut history: Vec<Option<usize>> = Vec::new();
        let mut best: Option<(usize, Path, usize, usize)> = None;
        let record = |best: &mut Option<(usize, Path, usize, usize)>, area, path, states, cap| {
            if best.as_ref().is_none_or(|b| area < b.0) {
                *best = Some((area, path, states, cap));
            }
        };
        loop {
            log::debug!("area search pass with cap {cap}");
            match self.run(&start, cap, cfg.max_area, cfg.state_budget) {
                Outcome::Found { area, path, rigorous, states } => {
                    if rigorous || cap >= full_cap(area) {
                        let certificate = self.certificate(w, &path);
                        return Ok(AreaResult { area, certificate, exact: true, states, cap });
                    }
                    record(&mut best, area, path, states, cap);
                    history.push(Some(area));
                }
                Outcome::Exhausted { blocked: false } => {
                    return Err(AreaError::NotNullHomotopic { max_area: cfg.max_area });
                }
                Outcome::Exhausted { blocked: true } => {
                    if cap >= full_cap(cfg.max_area) {
                        return Err(AreaError::NotNullHomotopic { max_area: cfg.max_area });
                    }
                    history.push(None)
                }
                Outcome::Budget { states, best: found } => {
                    if let Some((area, path)) = found {
                        record(&mut best, area, path, states, cap);
                    }
                    break;
                }
            }
            if history.len() > STABLE_ESCALATIONS {
                let tail = &history[history.len() - 1 - STABLE_ESCALATIONS..];
                if tail[0].is_some() && tail.iter().all(|v| *v == tail[0]) {
                    let (area, path, states, cap) = best.expect("stable value was recorded");
                    let certificate = self.certificate(w, &path);
                    return Ok(AreaResult { area, certificate, exact: true, states, cap });
                }
            }
            cap += self.max_relator_length.max(1);
        }
        if let Some((area, path, states, cap)) = best {
            let certificate = self.certificate(w, &path);
            return Ok(AreaResult { area, certificate, exact: false, states, cap });
        }
        self.upper_bound(w, cfg).map_err(|_| AreaError::BudgetExceeded { states: cfg.state_budget })
    }

    /// See [`area_upper_bound`].
    pub fn upper_bound(&self, w: &Word, cfg: &SearchConfig) -> Result<AreaResult, AreaError> {
        self.check_owned(w)?;
        let (start, _, _) = canonical(w.letters());
        if start.is_empty() {
            return Ok(AreaResult {
                area: 0,
                certificate: AreaCertificate::default(),
                exact: false,
                states: 1,
                cap: 0,
            });
        }
        let half = (self.max_relator_length / 2).max(1);
        let priority = |g: u32, len: usize| g as usize * half + len;
        let mut bound = BoundCache::new(&self.bound);
        let start = encode(vec![start]);
        let mut index: FxHashMap<Box<[Letter]>, u32> = FxHashMap::default();
        let mut nodes: Vec<Node> = vec![Node { parent: ROOT, mv: 0, g: 0 }];
        let mut buckets: Vec<Bucket> = Vec::new();
        index.insert(start.clone(), 0);
        push_bucket(&mut buckets, priority(0, start.len()), (0, 0, start));
        let mut succ = Vec::new();
        let mut f = 0;
        loop {
            while f < buckets.len() && buckets[f].is_empty() {
                f += 1;
            }
            if f >= buckets.len() {
                return Err(AreaError::NotNullHomotopic { max_area: cfg.max_area });
            }
            let (id, g, key) = buckets[f].pop_front().expect("nonempty bucket");
            if nodes[id as usize].g != g {
                continue;
            }
            self.successors(&key, &mut bound, &mut succ);
            for s in succ.drain(..) {
                let ng = g + s.cost;
                if ng as usize > cfg.max_area {
                    continue;
                }
                if s.key.is_empty() {
                    let path = trace(&nodes, id, s.mv);
                    let certificate = self.certificate(w, &path);
                    let area = certificate.claimed_area();
                    return Ok(AreaResult { area, certificate, exact: false, states: nodes.len(), cap: usize::MAX });
                }
                if self.heuristic(&decode(&s.key), &mut bound) == UNREACHABLE {
                    continue;
                }
                let node = Node { parent: id, mv: s.mv, g: ng };
                let nid = match index.get(&s.key) {
                    Some(&old) if nodes[old as usize].g <= ng => continue,
                    Some(&old) => {
                        nodes[old as usize] = node;
                        old
                    }
                    None => {
                        if nodes.len() >= cfg.state_budget {
                            return Err(AreaError::BudgetExceeded { states: nodes.len() });
                        }
                        nodes.push(node);
                        index.insert(s.key.clone(), nodes.len() as u32 - 1);
                        nodes.len() as u32 - 1
                    }
                };
                let p = priority(ng, s.length);
                push_bucket(&mut buckets, p, (nid, ng, s.key));
                f = f.min(p);
            }
        }
    }
}

/// Frontier entries `(node id, cost so far, state key)` of one priority.
type Bucket = VecDeque<(u32, u32, Box<[Letter]>)>;

fn push_bucket<T>(buckets: &mut Vec<VecDeque<T>>, f: usize, item: T) {
    if buckets.len() <= f {
        buckets.resize_with(f + 1, VecDeque::new);
    }
    buckets[f].push_back(item);
}

fn trace(nodes: &[Node], mut id: u32, last: u32) -> Path {
    let mut path = vec![last];
    while nodes[id as usize].parent != ROOT {
        let n = &nodes[id as usize];
        path.push(n.mv);
        id = n.parent;
    }
    path.reverse();
    path
}

/// Minimal number of conjugated relators whose product is `w`.
///
/// The first pass caps the total length of intermediate words at
/// `max(cfg.max_intermediate_length, |w|)`; the cap grows by the longest
/// relator length until the value is certified. If the state budget runs out
/// the best filling found is returned with `exact = false`.
pub fn area_search(w: &Word, p: &Presentation, cfg: &SearchConfig) -> Result<AreaResult, AreaError> {
    AreaSolver::new(p).search(w, cfg)
}

/// A filling of `w` found by greedy best-first search, with `exact = false`.
///
/// States are ordered by `half the longest relator length * area so far +
/// total length`, which favours moves that shorten the word. No minimality
/// claim is made.
pub fn area_upper_bound(w: &Word, p: &Presentation, cfg: &SearchConfig) -> Result<AreaResult, AreaError> {
    AreaSolver::new(p).upper_bound(w, cfg)
}
