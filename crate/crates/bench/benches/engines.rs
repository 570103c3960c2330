use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dehnlab::{coset_enumerate, enumerate_null_words, AreaSolver, Presentation, SearchConfig};

fn coset_enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("coset_enumerate");
    let cases = [
        ("D22", Presentation::from_strs(&["s", "r"], &["s^2", "r^11", "s r s r^-10"])),
        ("H5", Presentation::from_strs(&["a", "b"], &["b a b^-1 a^-6", "a^25", "b^5"])),
        ("Z11xZ13", Presentation::from_strs(&["x", "y"], &["x^11", "y^13", "[x,y]"])),
    ];
    for (name, p) in &cases {
        g.bench_function(*name, |b| b.iter(|| coset_enumerate(black_box(p), 100_000).unwrap()));
    }
    g.finish();
}

fn area_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("area_search");
    let cfg = SearchConfig::default();
    let cases = [
        ("x2y2 in Z5xZ7", Presentation::from_strs(&["x", "y"], &["x^5", "y^7", "[x,y]"]), "x^2 y^2 x^-2 y^-2"),
        ("x3y3 in Z11xZ13", Presentation::from_strs(&["x", "y"], &["x^11", "y^13", "[x,y]"]), "x^3 y^3 x^-3 y^-3"),
        (
            "sr2sr2sr-8sr-8 in D10",
            Presentation::from_strs(&["s", "r"], &["s^2", "r^5", "s r s r^-4"]),
            "s r^2 s r^2 s r^-8 s r^-8",
        ),
    ];
    for (name, p, w) in &cases {
        let solver = AreaSolver::new(p);
        let w = p.parse_word(w).unwrap();
        g.bench_function(*name, |b| b.iter(|| solver.search(black_box(&w), &cfg).unwrap()));
    }
    g.finish();
}

fn null_word_enumeration(c: &mut Criterion) {
    let p = Presentation::from_strs(&["s", "r"], &["s^2", "r^5", "s r s r^-4"]);
    let r = coset_enumerate(&p, 1000).unwrap();
    c.bench_function("enumerate_null_words D10 n=10", |b| b.iter(|| enumerate_null_words(black_box(&r), 10).len()));
}

criterion_group!(benches, coset_enumeration, area_search, null_word_enumeration);
criterion_main!(benches);
