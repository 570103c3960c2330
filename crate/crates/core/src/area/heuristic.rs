//! Admissible lower bounds on area from exponent sums.
//!
//! Each conjugated relator changes the exponent-sum vector of a word by the
//! exponent-sum vector of that relator (up to sign), so the least number of
//! relator vectors summing to the word's vector bounds its area from below.
//! The bound is a metric on exponent vectors, hence consistent for A*.

use rustc_hash::FxHashMap;

use crate::presentation::Presentation;
use crate::words::Letter;

/// Integer programs larger than this fall back to the weighted-norm bound.
const MAX_ILP_VECTORS: usize = 4;
const MAX_ILP_COST: u32 = 40;

pub(crate) struct ExponentBound {
    rank: usize,
    /// Distinct nonzero exponent vectors of the relators, up to sign.
    vectors: Vec<Vec<i64>>,
    /// Weight vectors `λ` with `Σ λ_x |v_x| <= 1` for every relator vector.
    norms: Vec<Vec<f64>>,
    /// Generators that no relator moves: their exponent sum must stay zero.
    frozen: Vec<bool>,
}

pub(crate) const UNREACHABLE: u32 = u32::MAX;

impl ExponentBound {
    pub(crate) fn new(p: &Presentation) -> Self {
        let rank = p.rank();
        let mut vectors: Vec<Vec<i64>> = Vec::new();
        for r in p.relators() {
            let v: Vec<i64> = (0..rank).map(|g| r.exponent_sum(g)).collect();
            if v.iter().all(|&x| x == 0) {
                continue;
            }
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            if !vectors.contains(&v) && !vectors.contains(&neg) {
                vectors.push(v);
            }
        }
        let max_abs: Vec<i64> = (0..rank).map(|g| vectors.iter().map(|v| v[g].abs()).max().unwrap_or(0)).collect();
        let frozen = max_abs.iter().map(|&m| m == 0).collect();
        let mut norms = Vec::new();
        for g in 0..rank {
            if max_abs[g] > 0 {
                let mut l = vec![0.0; rank];
                l[g] = 1.0 / max_abs[g] as f64;
                norms.push(l);
            }
        }
        let base: Vec<f64> = max_abs.iter().map(|&m| if m > 0 { 1.0 / m as f64 } else { 0.0 }).collect();
        let scale = vectors
            .iter()
            .map(|v| v.iter().zip(&base).map(|(&x, &l)| x.abs() as f64 * l).sum::<f64>())
            .fold(0.0f64, f64::max);
        if scale > 0.0 {
            norms.push(base.iter().map(|l| l / scale).collect());
        }
        ExponentBound { rank, vectors, norms, frozen }
    }

    /// Lower bound on area for a word with exponent vector `v`;
    /// [`UNREACHABLE`] when no product of relators has that vector.
    pub(crate) fn bound(&self, v: &[i64]) -> u32 {
        if v.iter().zip(&self.frozen).any(|(&x, &f)| f && x != 0) {
            return UNREACHABLE;
        }
        if v.iter().all(|&x| x == 0) {
            return 0;
        }
        let lp = self.norm_bound(v);
        if self.vectors.len() <= MAX_ILP_VECTORS {
            self.ilp(v, lp)
        } else {
            lp
        }
    }

    fn norm_bound(&self, v: &[i64]) -> u32 {
        self.norms
            .iter()
            .map(|l| {
                let s: f64 = v.iter().zip(l).map(|(&x, &w)| x.abs() as f64 * w).sum();
                (s - 1e-9).ceil().max(0.0) as u32
            })
            .max()
            .unwrap_or(0)
    }

    /// Least `Σ|n_i|` with `Σ n_i · vectors[i] = v`, by iterative deepening
    /// from `lower`. Returns `MAX_ILP_COST + 1` if nothing cheaper exists.
    fn ilp(&self, v: &[i64], lower: u32) -> u32 {
        let mut target = v.to_vec();
        for cost in lower.max(1)..=MAX_ILP_COST {
            if self.ilp_exact(0, cost as i64, &mut target) {
                return cost;
            }
        }
        (MAX_ILP_COST + 1).max(lower)
    }

    /// Is `target` a combination of vectors[i..] with `Σ|n| == budget`?
    fn ilp_exact(&self, i: usize, budget: i64, target: &mut [i64]) -> bool {
        if i == self.vectors.len() {
            return budget == 0 && target.iter().all(|&x| x == 0);
        }
        let vec = &self.vectors[i];
        if i + 1 == self.vectors.len() {
            // Solve the last coefficient directly.
            for n in [budget, -budget] {
                if target.iter().zip(vec).all(|(&t, &x)| t == n * x) {
                    return true;
                }
            }
            return false;
        }
        for m in 0..=budget {
            for n in if m == 0 { vec![0] } else { vec![m, -m] } {
                for (t, &x) in target.iter_mut().zip(vec) {
                    *t -= n * x;
                }
                let ok = self.ilp_exact(i + 1, budget - m, target);
                for (t, &x) in target.iter_mut().zip(vec) {
                    *t += n * x;
                }
                if ok {
                    return true;
                }
            }
        }
        false
    }
}

/// Memoizing front end to [`ExponentBound::bound`], local to one search.
pub(crate) struct BoundCache<'a> {
    bound: &'a ExponentBound,
    cache: FxHashMap<Vec<i64>, u32>,
    scratch: Vec<i64>,
}

impl<'a> BoundCache<'a> {
    pub(crate) fn new(bound: &'a ExponentBound) -> Self {
        BoundCache { bound, cache: FxHashMap::default(), scratch: vec![0; bound.rank] }
    }

    /// Bound for the word spelled by `letters`.
    pub(crate) fn word(&mut self, letters: &[Letter]) -> u32 {
        self.scratch.iter_mut().for_each(|x| *x = 0);
        for l in letters {
            self.scratch[l.generator()] += l.sign();
        }
        if let Some(&b) = self.cache.get(&self.scratch) {
            return b;
        }
        let b = self.bound.bound(&self.scratch);
        self.cache.insert(self.scratch.clone(), b);
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Presentation;

    #[test]
    fn commutator_presentation_bound() {
        let p = Presentation::from_strs(&["x", "y"], &["x^11", "y^13", "[x,y]"]);
        let h = ExponentBound::new(&p);
        assert_eq!(h.bound(&[0, 0]), 0);
        assert_eq!(h.bound(&[11, 0]), 1);
        assert_eq!(h.bound(&[-11, 13]), 2);
        assert_eq!(h.bound(&[22, -13]), 3);
        assert_eq!(h.bound(&[3, 0]), MAX_ILP_COST + 1);
    }

    #[test]
    fn frozen_generator_is_unreachable() {
        let p = Presentation::from_strs(&["a", "b"], &["a^5", "[a,b]"]);
        let h = ExponentBound::new(&p);
        assert_eq!(h.bound(&[0, 1]), UNREACHABLE);
        assert_eq!(h.bound(&[10, 0]), 2);
    }

    #[test]
    fn ilp_beats_norm_bound() {
        // vectors (-5,0), (25,0), (0,5): reaching (35,0) needs 25+5+5.
        let p = Presentation::from_strs(&["a", "b"], &["b a b^-1 a^-6", "a^25", "b^5"]);
        let h = ExponentBound::new(&p);
        assert_eq!(h.bound(&[35, 0]), 3);
        assert_eq!(h.bound(&[-5, 5]), 2);
    }
}
