//! The search against product enumeration on every short null-homotopic word.

use dehnlab::area::ProductBall;
use dehnlab::{area_bruteforce, coset_enumerate, enumerate_null_words, AreaSolver, Presentation, SearchConfig};

/// Conjugators up to length 4 and partial products up to length 12.
fn check_all_words(p: &Presentation, n: usize) {
    let r = coset_enumerate(p, 10_000).unwrap();
    let ball = ProductBall::new(p, 4, 10, 12);
    let solver = AreaSolver::with_realization(p, Some(r.clone()));
    let words = enumerate_null_words(&r, n);
    assert!(!words.is_empty());
    for w in &words {
        let a = solver.search(w, &SearchConfig::default()).unwrap();
        assert!(a.exact, "{}", p.show(w));
        assert_eq!(ball.area(w), Some(a.area), "{}", p.show(w));
    }
}

#[test]
fn cyclic_group_words_up_to_eight() {
    check_all_words(&Presentation::from_strs(&["a"], &["a^5"]), 8);
}

#[test]
fn dihedral_words_up_to_eight() {
    check_all_words(&Presentation::from_strs(&["s", "r"], &["s^2", "r^5", "s r s r^-4"]), 8);
}

#[test]
fn commutator_words_up_to_eight() {
    check_all_words(&Presentation::from_strs(&["x", "y"], &["x^3", "y^5", "[x,y]"]), 8);
}

#[test]
fn level_oracle_on_small_words() {
    let p = Presentation::from_strs(&["s", "r"], &["s^2", "r^5", "s r s r^-4"]);
    let r = coset_enumerate(&p, 100).unwrap();
    let solver = AreaSolver::with_realization(&p, Some(r.clone()));
    for w in enumerate_null_words(&r, 5) {
        let a = solver.search(&w, &SearchConfig::default()).unwrap();
        assert_eq!(area_bruteforce(&w, &p, 4, 3), Some(a.area), "{}", p.show(&w));
    }
}
