use dehnlab::dehn::{dehn_function_with, family_dehn_function};
use dehnlab::families::FamilySpec;
use dehnlab::mean::{family_mean, family_smean};
use dehnlab::{
    coset_enumerate, cyclic_family_closed_forms, dehn_function, AreaSolver, Presentation, SearchConfig, Serial,
};

fn cyclic(p: u32) -> Presentation {
    Presentation::from_strs(&["a"], &[&format!("a^{p}")])
}

#[test]
fn cyclic_closed_form() {
    for p in [3u32, 5, 7] {
        let n_max = 4 * p as usize;
        let t = dehn_function(&cyclic(p), n_max, &SearchConfig::default()).unwrap();
        let want: Vec<usize> = (1..=n_max).map(|n| n / p as usize).collect();
        assert_eq!(t.deltas(), want);
        assert!(t.is_monotone() && t.is_exact());
    }
}

#[test]
fn witnesses_recheck() {
    let p = Presentation::from_strs(&["s", "r"], &["s^2", "r^5", "s r s r^-4"]);
    let r = coset_enumerate(&p, 100).unwrap();
    let cfg = SearchConfig::default();
    let t = dehn_function_with(&p, &r, 9, &cfg, &Serial).unwrap();
    assert!(t.is_monotone());
    let solver = AreaSolver::with_realization(&p, Some(r.clone()));
    for e in &t.entries {
        let Some(w) = &e.witness else { continue };
        assert!(w.len() <= e.n);
        assert!(r.is_null_homotopic(w).unwrap());
        let a = solver.search(w, &cfg).unwrap();
        assert!(a.exact);
        assert_eq!(a.area, e.delta);
    }
}

#[test]
fn quadratic_witness() {
    let p = Presentation::from_strs(&["x", "y"], &["x^11", "y^13", "[x,y]"]);
    let w = p.parse_word("x^2 y^2 x^-2 y^-2").unwrap();
    let a = AreaSolver::new(&p).search(&w, &SearchConfig::default()).unwrap();
    assert!(a.exact && a.area >= 4);
}

#[test]
fn family_dominates_members() {
    let cfg = SearchConfig::default();
    for name in ["G1", "DIH"] {
        let f = FamilySpec::parse(name, &[]).unwrap();
        let t = family_dehn_function(&f, 8, &cfg).unwrap();
        assert!(t.is_monotone());
        let members: Vec<_> = f
            .relevance_bound(8)
            .unwrap()
            .into_iter()
            .map(|m| dehn_function(&m.presentation, 8, &cfg).unwrap())
            .collect();
        for (i, e) in t.entries.iter().enumerate() {
            let ds: Vec<usize> = members.iter().map(|m| m.entries[i].delta).collect();
            assert!(ds.iter().all(|&d| d <= e.delta));
            assert!(e.delta == 0 || ds.contains(&e.delta));
        }
    }
}

#[test]
fn g1_family_is_half_n() {
    let f = FamilySpec::parse("G1", &[]).unwrap();
    let t = family_dehn_function(&f, 20, &SearchConfig::default()).unwrap();
    assert_eq!(t.deltas(), (1..=20).map(|n| n / 2).collect::<Vec<_>>());
    assert_eq!(t.entries[9].member.as_deref(), Some("p=2"));
}

#[test]
fn builders_pass_validation() {
    let specs = [
        ("G1", vec![]),
        ("G1K", vec![("m", "2")]),
        ("ZPQ1", vec![]),
        ("ZPQ2", vec![]),
        ("EX24", vec![]),
        ("G2", vec![("r", "3,5")]),
        ("G3", vec![("cutoff", "5")]),
        ("DIH", vec![]),
        ("DIHALT", vec![]),
        ("DIHK", vec![("i", "2"), ("j", "3")]),
        ("D4N", vec![]),
    ];
    for (name, params) in specs {
        let params: Vec<(String, String)> = params.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        let f = FamilySpec::parse(name, &params).unwrap();
        let members = f.relevance_bound(12).unwrap();
        assert!(!members.is_empty(), "{name}");
        for m in members {
            assert!(m.presentation.rank() <= f.k_bound());
            let v = f.validate_member(&m, 100_000).unwrap();
            assert!(v.passed(), "{name} {}: {:?}", m.label, v.failures().collect::<Vec<_>>());
        }
    }
}

#[test]
fn cyclic_family_means_small_n() {
    let f = FamilySpec::parse("G1", &[]).unwrap();
    let cfg = SearchConfig::default();
    for n in 2..=12 {
        let (mean, smean) = cyclic_family_closed_forms(n as u64);
        let rep = family_mean(&f, n, &cfg).unwrap();
        assert_eq!(rep.mean, Some(mean), "n={n}");
        assert_eq!(family_smean(&f, n, &cfg).unwrap(), smean, "n={n}");
        assert_eq!(rep.tally.ball_size % 2, 0);
    }
}
