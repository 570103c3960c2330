//! Randomized checks of exact areas: certificate soundness, invariance under
//! conjugation and inversion, and subadditivity.

use dehnlab::words::Letter;
use dehnlab::{verify_certificate, AreaSolver, Presentation, SearchConfig, Word};
use proptest::prelude::*;

fn groups() -> Vec<Presentation> {
    vec![
        Presentation::from_strs(&["a"], &["a^5"]),
        Presentation::from_strs(&["s", "r"], &["s^2", "r^5", "s r s r^-4"]),
        Presentation::from_strs(&["x", "y"], &["x^3", "y^5", "[x,y]"]),
        Presentation::from_strs(&["a", "s"], &["s^5", "a^7", "s^-1 a s a^-2"]),
    ]
}

fn reduced(rank: usize, codes: &[u16]) -> Word {
    let letters: Vec<Letter> = codes.iter().map(|c| Letter::from_code(c % (2 * rank as u16))).collect();
    dehnlab::free_reduce(&letters)
}

/// Product of conjugated relators described by (conjugator codes, relator, sign).
fn null_word(p: &Presentation, factors: &[(Vec<u16>, usize, bool)]) -> Word {
    let mut w = Word::empty();
    for (g, r, inv) in factors {
        let rel = &p.relators()[r % p.relators().len()];
        let rel = if *inv { rel.inverse() } else { rel.clone() };
        w = w.concat(&reduced(p.rank(), g).conjugate(&rel));
    }
    w
}

fn factors() -> impl Strategy<Value = Vec<(Vec<u16>, usize, bool)>> {
    prop::collection::vec((prop::collection::vec(0u16..64, 0..3), 0usize..8, any::<bool>()), 1..3)
}

fn cfg() -> SearchConfig {
    SearchConfig { state_budget: 400_000, ..SearchConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_area_invariants(
        g in 0usize..4,
        f1 in factors(),
        f2 in factors(),
        u in prop::collection::vec(0u16..64, 0..=3),
    ) {
        let p = &groups()[g];
        let solver = AreaSolver::new(p);
        let w1 = null_word(p, &f1);
        let w2 = null_word(p, &f2);
        let a1 = solver.search(&w1, &cfg()).unwrap();
        prop_assert!(verify_certificate(&a1.certificate, &w1, p));
        prop_assert_eq!(a1.certificate.claimed_area(), a1.area);
        prop_assert_eq!(a1.area == 0, w1.is_empty());
        prop_assert!(a1.area <= f1.len());
        if !a1.exact {
            return Ok(());
        }
        let inv = solver.search(&w1.inverse(), &cfg()).unwrap();
        if inv.exact {
            prop_assert_eq!(inv.area, a1.area);
        }
        let conj = reduced(p.rank(), &u).conjugate(&w1);
        let c = solver.search(&conj, &cfg()).unwrap();
        prop_assert!(verify_certificate(&c.certificate, &conj, p));
        if c.exact {
            prop_assert_eq!(c.area, a1.area);
        }
        let a2 = solver.search(&w2, &cfg()).unwrap();
        let both = w1.concat(&w2);
        let s = solver.search(&both, &cfg()).unwrap();
        prop_assert!(verify_certificate(&s.certificate, &both, p));
        if a2.exact && s.exact {
            prop_assert!(s.area <= a1.area + a2.area);
        }
    }
}
