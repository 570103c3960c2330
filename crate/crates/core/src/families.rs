//! Builders, registry and validators for the concrete presentation families.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::presentation::Presentation;
use crate::realization::{coset_enumerate, FiniteRealization, RealizationError};
use crate::words::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("unknown family `{0}` (known: G1, G1K, ZPQ1, ZPQ2, EX24, G2, G3, DIH, DIHALT, DIHK, D4N)")]
    UnknownFamily(String),
    #[error("family {family} does not take parameter `{key}`")]
    UnknownParameter { family: String, key: String },
    #[error("parameter `{key}`: {message}")]
    BadParameter { key: String, message: String },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("primes must be distinct, got {0} twice")]
    EqualPrimes(u64),
    #[error("exponent {m} must satisfy 1 < m < {p}")]
    ExponentOutOfRange { m: i64, p: u64 },
    #[error("{count} generators exceed the family bound K = {k}")]
    TooManyGenerators { count: usize, k: usize },
    #[error("need 5 <= p < k, got p = {p}, k = {k}")]
    Ex24Range { p: u64, k: u64 },
    #[error("k = {k} divides 2^{p} - 1")]
    Ex24Divides { p: u64, k: u64 },
    #[error("n = {0} is below the family minimum of 2")]
    SmallN(u64),
    #[error("n = {0} must be odd")]
    EvenN(u64),
    #[error("generator {0} is trivial in this member")]
    TrivialGenerator(String),
    #[error("generating subset check failed: {0}")]
    NotGenerating(String),
    #[error("polycyclic data shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Realization(#[from] RealizationError),
}

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}

fn require_prime(p: u64) -> Result<(), FamilyError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(FamilyError::NotPrime(p))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn build(gens: &[&str], rels: &[String]) -> Presentation {
    let rels: Vec<&str> = rels.iter().map(String::as_str).collect();
    Presentation::from_strs(gens, &rels)
}

/// `<a | a^p>`.
pub fn build_g1(p: u64) -> Result<Presentation, FamilyError> {
    require_prime(p)?;
    Ok(build(&["a"], &[format!("a^{p}")]))
}

/// `Z_p` on the redundant generating set `a, a^{m_1}, ..., a^{m_l}`, with
/// relators `a^p`, `b_i^p` and the tying relators `b_i a^{-m_i}`.
pub fn build_g1_redundant(p: u64, exponents: &[i64]) -> Result<Presentation, FamilyError> {
    require_prime(p)?;
    for &m in exponents {
        if m <= 1 || m as u64 >= p {
            return Err(FamilyError::ExponentOutOfRange { m, p });
        }
    }
    let names: Vec<String> =
        if exponents.len() == 1 { vec!["b".into()] } else { (1..=exponents.len()).map(|i| format!("b{i}")).collect() };
    let mut gens = vec!["a"];
    gens.extend(names.iter().map(String::as_str));
    let mut rels = vec![format!("a^{p}")];
    rels.extend(names.iter().map(|b| format!("{b}^{p}")));
    rels.extend(names.iter().zip(exponents).map(|(b, m)| format!("{b} a^-{m}")));
    Ok(build(&gens, &rels))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZpqStyle {
    /// `<a | a^{pq}>`
    OneGenerator,
    /// `<x, y | x^p, y^q, x y x^-1 y^-1>`
    TwoGenerator,
}

pub fn build_zpzq(p: u64, q: u64, style: ZpqStyle) -> Result<Presentation, FamilyError> {
    require_prime(p)?;
    require_prime(q)?;
    if p == q {
        return Err(FamilyError::EqualPrimes(p));
    }
    Ok(match style {
        ZpqStyle::OneGenerator => build(&["a"], &[format!("a^{}", p * q)]),
        ZpqStyle::TwoGenerator => build(&["x", "y"], &[format!("x^{p}"), format!("y^{q}"), "[x,y]".into()]),
    })
}

/// `<a, s | s^p, a^k, s^-1 a s a^-2>` for primes `5 <= p < k` with
/// `k ∤ 2^p - 1`; the generator `a` is trivial in the group.
pub fn build_example24(p: u64, k: u64) -> Result<Presentation, FamilyError> {
    require_prime(p)?;
    require_prime(k)?;
    if p < 5 || k <= p {
        return Err(FamilyError::Ex24Range { p, k });
    }
    let mersenne = 1u128.checked_shl(p as u32).filter(|_| p < 128).map(|x| x - 1);
    match mersenne {
        Some(m) if m % k as u128 == 0 => return Err(FamilyError::Ex24Divides { p, k }),
        Some(_) => {}
        None => return Err(FamilyError::BadParameter { key: "p".into(), message: "too large".into() }),
    }
    Ok(build(&["a", "s"], &[format!("s^{p}"), format!("a^{k}"), "s^-1 a s a^-2".into()]))
}

/// `x_l^{s_l} = x_{l+1}^{a_{l,l+1}} ... x_n^{a_{l,n}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerRelation {
    pub exponent: u64,
    /// `a_{l,k}` for `k = l+1 .. n`.
    pub tail: Vec<i64>,
}

/// Data of a finite polycyclic presentation.
///
/// Generators are `x1 .. xn`. Indices below are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolycyclicData {
    pub n: usize,
    /// `x_l^{r_l} = 1`.
    pub relative_orders: Vec<u64>,
    /// Optional power relation per generator (`None` is `s_l = ∞`).
    pub powers: Vec<Option<PowerRelation>>,
    /// `conjugation[l][j]` for `j < l` lists `b_{l,j,k}` for `k = j+1 .. n`:
    /// `x_j^{-1} x_l x_j = x_{j+1}^{b_{l,j,j+1}} ... x_n^{b_{l,j,n}}`.
    pub conjugation: Vec<Vec<Vec<i64>>>,
}

impl PolycyclicData {
    /// Trivial conjugation (`b_{l,j,k} = δ_{l,k}`), no power relations.
    pub fn abelian(relative_orders: Vec<u64>) -> Self {
        let n = relative_orders.len();
        let conjugation =
            (0..n).map(|l| (0..l).map(|j| (j + 1..n).map(|k| i64::from(k == l)).collect()).collect()).collect();
        PolycyclicData { n, relative_orders, powers: vec![None; n], conjugation }
    }

    pub fn check_shape(&self) -> Result<(), FamilyError> {
        let n = self.n;
        if n == 0 {
            return Err(FamilyError::Shape("need at least one generator".into()));
        }
        if self.relative_orders.len() != n || self.powers.len() != n || self.conjugation.len() != n {
            return Err(FamilyError::Shape(format!("expected {n} relative orders, powers and conjugation rows")));
        }
        if self.relative_orders.contains(&0) {
            return Err(FamilyError::Shape("relative orders must be positive".into()));
        }
        for (l, p) in self.powers.iter().enumerate() {
            if let Some(p) = p {
                if p.tail.len() != n - l - 1 {
                    return Err(FamilyError::Shape(format!("power relation {} needs {} exponents", l + 1, n - l - 1)));
                }
            }
        }
        for (l, row) in self.conjugation.iter().enumerate() {
            if row.len() != l {
                return Err(FamilyError::Shape(format!("conjugation row {} needs {} entries", l + 1, l)));
            }
            for (j, b) in row.iter().enumerate() {
                if b.len() != n - j - 1 {
                    return Err(FamilyError::Shape(format!(
                        "conjugation b[{}][{}] needs {} exponents",
                        l + 1,
                        j + 1,
                        n - j - 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn order_bound(&self) -> u64 {
        self.relative_orders.iter().product()
    }
}

fn monomial(names: &[String], from: usize, exps: &[i64]) -> String {
    let parts: Vec<String> =
        exps.iter().enumerate().filter(|(_, &e)| e != 0).map(|(i, e)| format!("{}^{}", names[from + i], e)).collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

/// The presentation with the four relation families instantiated: relative
/// orders, power relations, conjugation relations and commutation.
pub fn build_g2(d: &PolycyclicData) -> Result<Presentation, FamilyError> {
    d.check_shape()?;
    let names: Vec<String> = (1..=d.n).map(|i| format!("x{i}")).collect();
    let mut rels = Vec::new();
    for (l, r) in d.relative_orders.iter().enumerate() {
        rels.push(format!("{}^{r}", names[l]));
    }
    for (l, p) in d.powers.iter().enumerate() {
        if let Some(p) = p {
            rels.push(format!("{}^{} = {}", names[l], p.exponent, monomial(&names, l + 1, &p.tail)));
        }
    }
    for l in 0..d.n {
        for j in 0..l {
            let rhs = monomial(&names, j + 1, &d.conjugation[l][j]);
            rels.push(format!("{}^-1 {} {} = {}", names[j], names[l], names[j], rhs));
        }
    }
    for l in 0..d.n {
        for j in 0..l {
            rels.push(format!("{} {} {}^-1 = {}", names[j], names[l], names[j], names[l]));
        }
    }
    let gens: Vec<&str> = names.iter().map(String::as_str).collect();
    let text = format!("gens: {}\nrels: {}\n", gens.join(" "), rels.join(", "));
    let parsed = crate::presentation::parse_presentation(&text).map_err(|e| FamilyError::Shape(e.to_string()))?;
    Ok(parsed.presentation)
}

/// `<a, b | b a b^-1 = a^{p+1}, a^{p^2}, b^p>`, of order `p^3`.
pub fn build_g3(p: u64) -> Result<Presentation, FamilyError> {
    require_prime(p)?;
    Ok(build(&["a", "b"], &[format!("b a b^-1 a^-{}", p + 1), format!("a^{}", p * p), format!("b^{p}")]))
}

/// Which of `s`, `t = s r^i`, `u = r^j` generate a dihedral group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KgenSubset {
    pub s: bool,
    pub i: Option<u64>,
    pub j: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DihedralStyle {
    /// `<s, r | s^2, r^{n+1}, s r s r^-n>`
    Standard,
    /// `<s, t | s^2, t^2, (s t)^{n+1}>` with `t` standing for `s r`.
    Alt,
    /// A subset of `{s, s r^i, r^j}`.
    Kgen(KgenSubset),
    /// `<s, r, t | s^2, r^n, t^2, (s r)^2, [s,t], [r,t]>`, `n` odd.
    D4n,
}

/// Dihedral elements `s^f r^a` of order `2N`.
fn dihedral_closure(gens: &[(bool, u64)], big_n: u64) -> usize {
    let mul = |(f1, a1): (bool, u64), (f2, a2): (bool, u64)| {
        let a1 = if f2 { (big_n - a1) % big_n } else { a1 };
        (f1 ^ f2, (a1 + a2) % big_n)
    };
    let mut seen: BTreeSet<(bool, u64)> = BTreeSet::new();
    let mut stack = vec![(false, 0)];
    seen.insert((false, 0));
    while let Some(x) = stack.pop() {
        for &g in gens {
            let y = mul(x, g);
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen.len()
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    (1..m.max(2)).find(|&x| (a * x) % m == 1 % m).unwrap_or(0)
}

fn build_kgen(n: u64, sub: KgenSubset) -> Result<Presentation, FamilyError> {
    let big_n = n + 1;
    let mut gens: Vec<&str> = Vec::new();
    let mut elems = Vec::new();
    if sub.s {
        gens.push("s");
        elems.push((true, 0));
    }
    if let Some(i) = sub.i {
        gens.push("t");
        elems.push((true, i % big_n));
    }
    if let Some(j) = sub.j {
        if j % big_n == 0 {
            return Err(FamilyError::TrivialGenerator("u".into()));
        }
        gens.push("u");
        elems.push((false, j % big_n));
    }
    let generated = dihedral_closure(&elems, big_n);
    if generated as u64 != 2 * big_n {
        return Err(FamilyError::NotGenerating(format!(
            "{{{}}} generates {generated} of the {} elements of D_{}",
            gens.join(", "),
            2 * big_n,
            2 * big_n
        )));
    }
    let order_of = |x: u64| big_n / gcd(x % big_n, big_n);
    let mut rels = Vec::new();
    if sub.s {
        rels.push("s^2".to_string());
    }
    if sub.i.is_some() {
        rels.push("t^2".to_string());
    }
    if let Some(j) = sub.j {
        rels.push(format!("u^{}", order_of(j)));
    }
    match (sub.s, sub.i, sub.j) {
        (true, Some(i), None) => rels.push(format!("(s t)^{}", order_of(i))),
        (true, None, Some(_)) => rels.push("s u s u".into()),
        (false, Some(_), Some(_)) => rels.push("t u t u".into()),
        (true, Some(i), Some(j)) => {
            // x = s t = r^i and u = r^j; the lattice of (α, β) with
            // α i + β j ≡ 0 (mod N) has basis (N/d, 0), (α0, β0).
            let d = gcd(i % big_n, big_n);
            let beta0 = d / gcd(d, j % big_n);
            let nd = big_n / d;
            let rhs = (big_n - (beta0 * j) % big_n) % big_n / d;
            let alpha0 = (rhs % nd * mod_inverse((i % big_n) / d % nd, nd)) % nd;
            rels.push(format!("(s t)^{nd}"));
            rels.push("[s t, u]".into());
            rels.push(format!("(s t)^{alpha0} u^{beta0}"));
            rels.push("s u s u".into());
        }
        _ => {}
    }
    let rels: Vec<String> = rels.into_iter().filter(|r| !r.ends_with("^0")).collect();
    let text = format!("gens: {}\nrels: {}\n", gens.join(" "), rels.join(", "));
    let parsed = crate::presentation::parse_presentation(&text).map_err(|e| FamilyError::Shape(e.to_string()))?;
    Ok(parsed.presentation)
}

pub fn build_dihedral(n: u64, style: DihedralStyle) -> Result<Presentation, FamilyError> {
    match style {
        DihedralStyle::Standard | DihedralStyle::Alt | DihedralStyle::Kgen(_) if n < 2 => Err(FamilyError::SmallN(n)),
        DihedralStyle::Standard => {
            Ok(build(&["s", "r"], &["s^2".into(), format!("r^{}", n + 1), format!("s r s r^-{n}")]))
        }
        DihedralStyle::Alt => Ok(build(&["s", "t"], &["s^2".into(), "t^2".into(), format!("(s t)^{}", n + 1)])),
        DihedralStyle::Kgen(sub) => build_kgen(n, sub),
        DihedralStyle::D4n => {
            if n.is_multiple_of(2) {
                return Err(FamilyError::EvenN(n));
            }
            Ok(build(
                &["s", "r", "t"],
                &["s^2".into(), format!("r^{n}"), "t^2".into(), "(s r)^2".into(), "[s,t]".into(), "[r,t]".into()],
            ))
        }
    }
}

/// The order a member's group must have.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedOrder {
    Exactly(u64),
    Divides(u64),
}

impl ExpectedOrder {
    pub fn admits(self, order: u64) -> bool {
        match self {
            ExpectedOrder::Exactly(e) => order == e,
            ExpectedOrder::Divides(e) => order > 0 && e % order == 0,
        }
    }
}

impl fmt::Display for ExpectedOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpectedOrder::Exactly(e) => write!(f, "{e}"),
            ExpectedOrder::Divides(e) => write!(f, "a divisor of {e}"),
        }
    }
}

/// One presentation of a family.
#[derive(Debug, Clone)]
pub struct Member {
    /// Parameter assignment, e.g. `p=5` or `n=4`.
    pub label: String,
    pub presentation: Presentation,
    pub expected_order: ExpectedOrder,
    pub params: Vec<(String, u64)>,
}

impl Member {
    pub fn param(&self, key: &str) -> Option<u64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyKind {
    G1,
    G1K { exponents: Vec<i64> },
    Zpq1,
    Zpq2,
    Ex24,
    G2 { data: PolycyclicData },
    G3,
    Dih,
    DihAlt,
    DihK { subset: KgenSubset },
    D4n,
}

/// A registered family, optionally pinned to a single member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    /// Largest member parameter considered where no relevance proof exists.
    pub cutoff: Option<u64>,
    /// Member parameters fixed on the command line (`p`, `q`, `k`, `n`).
    pub fixed: Vec<(String, u64)>,
}

fn parse_u64(key: &str, value: &str) -> Result<u64, FamilyError> {
    value.trim().parse().map_err(|_| FamilyError::BadParameter {
        key: key.into(),
        message: format!("expected a nonnegative integer, got `{value}`"),
    })
}

fn parse_list(key: &str, value: &str) -> Result<Vec<i64>, FamilyError> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim().parse().map_err(|_| FamilyError::BadParameter {
                key: key.into(),
                message: format!("expected a comma-separated integer list, got `{value}`"),
            })
        })
        .collect()
}

pub const FAMILY_NAMES: [&str; 11] = ["G1", "G1K", "ZPQ1", "ZPQ2", "EX24", "G2", "G3", "DIH", "DIHALT", "DIHK", "D4N"];

impl FamilySpec {
    pub fn new(kind: FamilyKind) -> Self {
        FamilySpec { kind, cutoff: None, fixed: Vec::new() }
    }

    /// Look up a family by registry name and apply `key=value` parameters.
    pub fn parse(name: &str, params: &[(String, String)]) -> Result<Self, FamilyError> {
        let upper = name.to_ascii_uppercase();
        let member_keys: &[&str] = match upper.as_str() {
            "G1" | "G1K" | "G3" => &["p"],
            "ZPQ1" | "ZPQ2" => &["p", "q"],
            "EX24" => &["p", "k"],
            "G2" => &[],
            "DIH" | "DIHALT" | "DIHK" | "D4N" => &["n"],
            _ => return Err(FamilyError::UnknownFamily(name.into())),
        };
        let mut spec = FamilySpec::new(FamilyKind::G1);
        let mut exponents = Vec::new();
        let mut orders = Vec::new();
        let mut subset = KgenSubset { s: true, i: None, j: None };
        for (key, value) in params {
            match (upper.as_str(), key.as_str()) {
                (_, "cutoff") => spec.cutoff = Some(parse_u64(key, value)?),
                (_, k) if member_keys.contains(&k) => spec.fixed.push((k.to_string(), parse_u64(key, value)?)),
                ("G1K", "m") => exponents = parse_list(key, value)?,
                ("G2", "r") => orders = parse_list(key, value)?,
                ("DIHK", "s") => subset.s = parse_u64(key, value)? != 0,
                ("DIHK", "i") => subset.i = Some(parse_u64(key, value)?),
                ("DIHK", "j") => subset.j = Some(parse_u64(key, value)?),
                _ => return Err(FamilyError::UnknownParameter { family: upper.clone(), key: key.clone() }),
            }
        }
        spec.kind = match upper.as_str() {
            "G1" => FamilyKind::G1,
            "G1K" => {
                if exponents.is_empty() {
                    return Err(FamilyError::BadParameter { key: "m".into(), message: "required, e.g. m=2,3".into() });
                }
                FamilyKind::G1K { exponents }
            }
            "ZPQ1" => FamilyKind::Zpq1,
            "ZPQ2" => FamilyKind::Zpq2,
            "EX24" => FamilyKind::Ex24,
            "G2" => {
                if orders.is_empty() || orders.iter().any(|&r| r <= 0) {
                    return Err(FamilyError::BadParameter {
                        key: "r".into(),
                        message: "required positive relative orders, e.g. r=3,5".into(),
                    });
                }
                FamilyKind::G2 { data: PolycyclicData::abelian(orders.iter().map(|&r| r as u64).collect()) }
            }
            "G3" => FamilyKind::G3,
            "DIH" => FamilyKind::Dih,
            "DIHALT" => FamilyKind::DihAlt,
            "DIHK" => {
                if !subset.s && subset.i.is_none() && subset.j.is_none() {
                    return Err(FamilyError::NotGenerating("empty generating subset".into()));
                }
                FamilyKind::DihK { subset }
            }
            "D4N" => FamilyKind::D4n,
            _ => unreachable!("checked above"),
        };
        Ok(spec)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::G1 => "G1",
            FamilyKind::G1K { .. } => "G1K",
            FamilyKind::Zpq1 => "ZPQ1",
            FamilyKind::Zpq2 => "ZPQ2",
            FamilyKind::Ex24 => "EX24",
            FamilyKind::G2 { .. } => "G2",
            FamilyKind::G3 => "G3",
            FamilyKind::Dih => "DIH",
            FamilyKind::DihAlt => "DIHALT",
            FamilyKind::DihK { .. } => "DIHK",
            FamilyKind::D4n => "D4N",
        }
    }

    /// Maximum generating-set size over the family.
    pub fn k_bound(&self) -> usize {
        match &self.kind {
            FamilyKind::G1 | FamilyKind::Zpq1 => 1,
            FamilyKind::G1K { exponents } => 1 + exponents.len(),
            FamilyKind::Zpq2 | FamilyKind::Ex24 | FamilyKind::G3 | FamilyKind::Dih | FamilyKind::DihAlt => 2,
            FamilyKind::G2 { data } => data.n,
            FamilyKind::DihK { subset } => {
                usize::from(subset.s) + usize::from(subset.i.is_some()) + usize::from(subset.j.is_some())
            }
            FamilyKind::D4n => 3,
        }
    }

    /// Whether generators must be nontrivial in every member.
    pub fn forbid_null_generators(&self) -> bool {
        !matches!(self.kind, FamilyKind::Ex24)
    }

    /// Whether [`FamilySpec::relevance_bound`] provably lists every member
    /// with a null-homotopic word of length `<= n`.
    ///
    /// `<a | a^m>` has such a word iff `m <= n`, which covers `G1` and
    /// `ZPQ1`; pinned and single-member families are trivially exhaustive.
    /// Every other family has members with short null words for every
    /// parameter and is truncated at the cutoff instead.
    pub fn relevance_justified(&self) -> bool {
        self.is_pinned() || matches!(self.kind, FamilyKind::G1 | FamilyKind::Zpq1 | FamilyKind::G2 { .. })
    }

    fn fixed_value(&self, key: &str) -> Option<u64> {
        self.fixed.iter().rev().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// All member parameters given.
    pub fn is_pinned(&self) -> bool {
        let keys: &[&str] = match self.kind {
            FamilyKind::G1 | FamilyKind::G1K { .. } | FamilyKind::G3 => &["p"],
            FamilyKind::Zpq1 | FamilyKind::Zpq2 => &["p", "q"],
            FamilyKind::Ex24 => &["p", "k"],
            FamilyKind::G2 { .. } => &[],
            _ => &["n"],
        };
        keys.iter().all(|k| self.fixed_value(k).is_some())
    }

    /// Build the member with the given parameters.
    pub fn member(&self, params: &[(&str, u64)]) -> Result<Member, FamilyError> {
        let get = |key: &str| {
            params
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| FamilyError::BadParameter { key: key.into(), message: "missing".into() })
        };
        let label = params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",");
        let (presentation, expected_order) = match &self.kind {
            FamilyKind::G1 => {
                let p = get("p")?;
                (build_g1(p)?, ExpectedOrder::Exactly(p))
            }
            FamilyKind::G1K { exponents } => {
                let p = get("p")?;
                (build_g1_redundant(p, exponents)?, ExpectedOrder::Exactly(p))
            }
            FamilyKind::Zpq1 | FamilyKind::Zpq2 => {
                let (p, q) = (get("p")?, get("q")?);
                let style = if self.kind == FamilyKind::Zpq1 { ZpqStyle::OneGenerator } else { ZpqStyle::TwoGenerator };
                (build_zpzq(p, q, style)?, ExpectedOrder::Exactly(p * q))
            }
            FamilyKind::Ex24 => {
                let (p, k) = (get("p")?, get("k")?);
                (build_example24(p, k)?, ExpectedOrder::Exactly(p))
            }
            FamilyKind::G2 { data } => (build_g2(data)?, ExpectedOrder::Divides(data.order_bound())),
            FamilyKind::G3 => {
                let p = get("p")?;
                (build_g3(p)?, ExpectedOrder::Exactly(p * p * p))
            }
            FamilyKind::Dih | FamilyKind::DihAlt | FamilyKind::DihK { .. } => {
                let n = get("n")?;
                let style = match self.kind {
                    FamilyKind::Dih => DihedralStyle::Standard,
                    FamilyKind::DihAlt => DihedralStyle::Alt,
                    FamilyKind::DihK { subset } => DihedralStyle::Kgen(subset),
                    _ => unreachable!(),
                };
                (build_dihedral(n, style)?, ExpectedOrder::Exactly(2 * (n + 1)))
            }
            FamilyKind::D4n => {
                let n = get("n")?;
                (build_dihedral(n, DihedralStyle::D4n)?, ExpectedOrder::Exactly(4 * n))
            }
        };
        let label = if label.is_empty() { self.name().to_string() } else { label };
        let count = presentation.rank();
        if count > self.k_bound() {
            return Err(FamilyError::TooManyGenerators { count, k: self.k_bound() });
        }
        let params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Ok(Member { label, presentation, expected_order, params })
    }

    /// The finite sub-family considered at word length `n`: members that can
    /// have null-homotopic words of length `<= n` (justified families), or
    /// members with parameter `<= cutoff` (default `n`) otherwise.
    pub fn relevance_bound(&self, n: usize) -> Result<Vec<Member>, FamilyError> {
        let n = n as u64;
        let cutoff = self.cutoff.unwrap_or(n);
        if self.is_pinned() {
            let params: Vec<(&str, u64)> = self.fixed.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            return Ok(vec![self.member(&params)?]);
        }
        let pin = |key: &str, candidates: Vec<u64>| -> Vec<u64> {
            match self.fixed_value(key) {
                Some(v) => candidates.into_iter().filter(|&c| c == v).collect(),
                None => candidates,
            }
        };
        let mut out = Vec::new();
        match &self.kind {
            FamilyKind::G1 => {
                for p in pin("p", primes_up_to(n)) {
                    out.push(self.member(&[("p", p)])?);
                }
            }
            FamilyKind::G1K { exponents } => {
                let floor = exponents.iter().copied().max().unwrap_or(1).max(1) as u64;
                for p in pin("p", primes_up_to(cutoff)).into_iter().filter(|&p| p > floor) {
                    out.push(self.member(&[("p", p)])?);
                }
            }
            FamilyKind::Zpq1 | FamilyKind::Zpq2 => {
                let limit = if self.kind == FamilyKind::Zpq1 { n } else { cutoff };
                let primes = primes_up_to(limit / 2);
                for &p in &primes {
                    for &q in primes.iter().filter(|&&q| q > p) {
                        let ok = match self.kind {
                            FamilyKind::Zpq1 => p * q <= n,
                            _ => q <= cutoff,
                        };
                        let pinned = self.fixed_value("p").is_none_or(|v| v == p)
                            && self.fixed_value("q").is_none_or(|v| v == q);
                        if ok && pinned {
                            out.push(self.member(&[("p", p), ("q", q)])?);
                        }
                    }
                }
            }
            FamilyKind::Ex24 => {
                let primes = primes_up_to(cutoff);
                for &p in primes.iter().filter(|&&p| p >= 5) {
                    for &k in primes.iter().filter(|&&k| k > p) {
                        let pinned = self.fixed_value("p").is_none_or(|v| v == p)
                            && self.fixed_value("k").is_none_or(|v| v == k);
                        if pinned && build_example24(p, k).is_ok() {
                            out.push(self.member(&[("p", p), ("k", k)])?);
                        }
                    }
                }
            }
            FamilyKind::G2 { .. } => out.push(self.member(&[])?),
            FamilyKind::G3 => {
                for p in pin("p", primes_up_to(cutoff)) {
                    out.push(self.member(&[("p", p)])?);
                }
            }
            FamilyKind::Dih | FamilyKind::DihAlt => {
                for m in 2..=cutoff {
                    out.push(self.member(&[("n", m)])?);
                }
            }
            FamilyKind::DihK { .. } => {
                for m in 2..=cutoff {
                    match self.member(&[("n", m)]) {
                        Ok(member) => out.push(member),
                        Err(FamilyError::NotGenerating(_) | FamilyError::TrivialGenerator(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
            FamilyKind::D4n => {
                for m in (3..=cutoff).filter(|m| m % 2 == 1) {
                    out.push(self.member(&[("n", m)])?);
                }
            }
        }
        Ok(out)
    }

    /// Check a member's group order, generating-set size and null-generator
    /// policy, plus the family's defining identities.
    pub fn validate_member(&self, member: &Member, coset_budget: usize) -> Result<Validation, FamilyError> {
        let p = &member.presentation;
        let r = coset_enumerate(p, coset_budget)?;
        let order = r.order() as u64;
        let mut checks = Vec::new();
        checks.push(Check::new(
            "group order",
            member.expected_order.admits(order),
            format!("order {order}, expected {}", member.expected_order),
        ));
        checks.push(Check::new(
            "generator bound",
            p.rank() <= self.k_bound(),
            format!("{} generators, K = {}", p.rank(), self.k_bound()),
        ));
        let null_gens: Vec<&str> = p
            .generators()
            .iter()
            .enumerate()
            .filter(|(g, _)| r.act(FiniteRealization::IDENTITY, Letter::pos(*g)) == FiniteRealization::IDENTITY)
            .map(|(_, name)| name.as_str())
            .collect();
        if self.forbid_null_generators() {
            checks.push(Check::new(
                "no null-homotopic generators",
                null_gens.is_empty(),
                if null_gens.is_empty() { "none".into() } else { format!("null: {}", null_gens.join(", ")) },
            ));
        } else {
            checks.push(Check::new(
                "a is null-homotopic",
                null_gens.contains(&"a"),
                format!("null generators: {{{}}}", null_gens.join(", ")),
            ));
        }
        let eval = |text: &str| p.parse_word(text).ok().and_then(|w: Word| r.evaluate(&w).ok());
        match &self.kind {
            FamilyKind::G3 => {
                let q = member.param("p").unwrap_or(0);
                let ok = eval("b a b^-1") == eval(&format!("a^{}", q + 1));
                checks.push(Check::new("b a b^-1 = a^(p+1)", ok, format!("p = {q}")));
            }
            FamilyKind::Dih => {
                let n1 = order / 2;
                let ok = (1..=n1).all(|i| eval(&format!("s r^{i} s")) == eval(&format!("r^-{i}")));
                checks.push(Check::new("s r^i s = r^-i", ok, format!("i = 1..{n1}")));
            }
            FamilyKind::DihK { subset } if subset.s && subset.j.is_some() => {
                let n1 = order / 2;
                let ok = (1..=n1).all(|i| eval(&format!("s u^{i} s")) == eval(&format!("u^-{i}")));
                checks.push(Check::new("s u^i s = u^-i", ok, format!("i = 1..{n1}")));
            }
            _ => {}
        }
        Ok(Validation { member: member.label.clone(), order, checks })
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        match &self.kind {
            FamilyKind::G1K { exponents } => {
                let m: Vec<String> = exponents.iter().map(|m| m.to_string()).collect();
                write!(f, " m={}", m.join(","))?;
            }
            FamilyKind::G2 { data } => {
                let r: Vec<String> = data.relative_orders.iter().map(|m| m.to_string()).collect();
                write!(f, " r={}", r.join(","))?;
            }
            FamilyKind::DihK { subset } => {
                write!(f, " s={}", u8::from(subset.s))?;
                if let Some(i) = subset.i {
                    write!(f, " i={i}")?;
                }
                if let Some(j) = subset.j {
                    write!(f, " j={j}")?;
                }
            }
            _ => {}
        }
        for (k, v) in &self.fixed {
            write!(f, " {k}={v}")?;
        }
        if let Some(c) = self.cutoff {
            write!(f, " cutoff={c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check { name, passed, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validation {
    pub member: String,
    pub order: u64,
    pub checks: Vec<Check>,
}

impl Validation {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realization::coset_enumerate;

    fn order(p: &Presentation) -> usize {
        coset_enumerate(p, 100_000).unwrap().order()
    }

    #[test]
    fn primality() {
        let ps: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn g1_builders() {
        assert_eq!(build_g1(5).unwrap().to_text(), Presentation::from_strs(&["a"], &["a^5"]).to_text());
        assert_eq!(order(&build_g1(2).unwrap()), 2);
        assert_eq!(build_g1(4), Err(FamilyError::NotPrime(4)));
    }

    #[test]
    fn g1_redundant() {
        let p = build_g1_redundant(5, &[2]).unwrap();
        assert_eq!(p.to_text(), Presentation::from_strs(&["a", "b"], &["a^5", "b^5", "b a^-2"]).to_text());
        assert_eq!(order(&p), 5);
        let p = build_g1_redundant(7, &[2, 3]).unwrap();
        assert_eq!((p.rank(), order(&p)), (3, 7));
        assert_eq!(build_g1_redundant(5, &[5]), Err(FamilyError::ExponentOutOfRange { m: 5, p: 5 }));
    }

    #[test]
    fn zpq_styles() {
        assert_eq!(order(&build_zpzq(2, 3, ZpqStyle::OneGenerator).unwrap()), 6);
        assert_eq!(order(&build_zpzq(5, 7, ZpqStyle::TwoGenerator).unwrap()), 35);
        assert_eq!(build_zpzq(3, 3, ZpqStyle::OneGenerator), Err(FamilyError::EqualPrimes(3)));
    }

    #[test]
    fn example24_constraints() {
        let p = build_example24(5, 7).unwrap();
        let r = coset_enumerate(&p, 10_000).unwrap();
        assert_eq!(r.order(), 5);
        assert_eq!(r.act(FiniteRealization::IDENTITY, Letter::pos(0)), FiniteRealization::IDENTITY);
        assert_eq!(build_example24(5, 31), Err(FamilyError::Ex24Divides { p: 5, k: 31 }));
        assert_eq!(build_example24(3, 7), Err(FamilyError::Ex24Range { p: 3, k: 7 }));
    }

    #[test]
    fn g2_abelian() {
        let p = build_g2(&PolycyclicData::abelian(vec![3, 5])).unwrap();
        let expected =
            Presentation::from_strs(&["x1", "x2"], &["x1^3", "x2^5", "x1^-1 x2 x1 x2^-1", "x1 x2 x1^-1 x2^-1"]);
        assert_eq!(p.to_text(), expected.to_text());
        assert_eq!(order(&p), 15);
        assert_eq!(order(&build_g2(&PolycyclicData::abelian(vec![5, 7])).unwrap()), 35);
        let mut bad = PolycyclicData::abelian(vec![3, 5]);
        bad.conjugation[1][0].push(0);
        assert!(matches!(build_g2(&bad), Err(FamilyError::Shape(_))));
    }

    #[test]
    fn g3_orders() {
        for (p, o) in [(2, 8), (3, 27), (5, 125)] {
            assert_eq!(order(&build_g3(p).unwrap()), o);
        }
    }

    #[test]
    fn dihedral_orders() {
        for n in 2..=8 {
            assert_eq!(order(&build_dihedral(n, DihedralStyle::Standard).unwrap()), 2 * (n as usize + 1));
            assert_eq!(order(&build_dihedral(n, DihedralStyle::Alt).unwrap()), 2 * (n as usize + 1));
        }
        for n in [3, 5, 7] {
            assert_eq!(order(&build_dihedral(n, DihedralStyle::D4n).unwrap()), 4 * n as usize);
        }
        assert_eq!(build_dihedral(4, DihedralStyle::D4n), Err(FamilyError::EvenN(4)));
    }

    #[test]
    fn kgen_subsets() {
        let cases = [
            KgenSubset { s: true, i: Some(1), j: None },
            KgenSubset { s: true, i: None, j: Some(3) },
            KgenSubset { s: false, i: Some(2), j: Some(3) },
            KgenSubset { s: true, i: Some(2), j: Some(3) },
            KgenSubset { s: true, i: Some(4), j: Some(6) },
        ];
        for n in 2..=9u64 {
            for sub in cases {
                match build_dihedral(n, DihedralStyle::Kgen(sub)) {
                    Ok(p) => assert_eq!(order(&p), 2 * (n as usize + 1), "n={n} {sub:?}"),
                    Err(FamilyError::TrivialGenerator(_)) => assert_eq!(sub.j.unwrap() % (n + 1), 0),
                    Err(FamilyError::NotGenerating(_)) => {
                        let elems: Vec<(bool, u64)> = [(sub.s, (true, 0))]
                            .into_iter()
                            .filter(|x| x.0)
                            .map(|x| x.1)
                            .chain(sub.i.map(|i| (true, i % (n + 1))))
                            .chain(sub.j.map(|j| (false, j % (n + 1))))
                            .collect();
                        assert!(dihedral_closure(&elems, n + 1) < 2 * (n as usize + 1));
                    }
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn registry_parsing() {
        let f = FamilySpec::parse("g1", &[]).unwrap();
        assert_eq!(f.name(), "G1");
        assert!(f.relevance_justified());
        let labels: Vec<String> = f.relevance_bound(10).unwrap().into_iter().map(|m| m.label).collect();
        assert_eq!(labels, ["p=2", "p=3", "p=5", "p=7"]);
        let f = FamilySpec::parse("ZPQ1", &[]).unwrap();
        let labels: Vec<String> = f.relevance_bound(10).unwrap().into_iter().map(|m| m.label).collect();
        assert_eq!(labels, ["p=2,q=3", "p=2,q=5"]);
        let f = FamilySpec::parse("DIH", &[("n".into(), "4".into())]).unwrap();
        assert!(f.is_pinned());
        assert_eq!(f.relevance_bound(3).unwrap().len(), 1);
        assert!(!FamilySpec::parse("DIH", &[]).unwrap().relevance_justified());
        assert!(matches!(FamilySpec::parse("NOPE", &[]), Err(FamilyError::UnknownFamily(_))));
        assert!(matches!(
            FamilySpec::parse("G1", &[("m".into(), "2".into())]),
            Err(FamilyError::UnknownParameter { .. })
        ));
        let f = FamilySpec::parse("G1K", &[("m".into(), "2,3".into())]).unwrap();
        assert_eq!(f.k_bound(), 3);
        assert_eq!(f.relevance_bound(7).unwrap().len(), 2);
    }

    #[test]
    fn validators() {
        let f = FamilySpec::parse("EX24", &[]).unwrap();
        let m = f.member(&[("p", 5), ("k", 7)]).unwrap();
        let v = f.validate_member(&m, 10_000).unwrap();
        assert!(v.passed(), "{v:?}");
        assert_eq!(v.order, 5);
        let f = FamilySpec::parse("G3", &[]).unwrap();
        for p in [2, 3, 5] {
            let v = f.validate_member(&f.member(&[("p", p)]).unwrap(), 10_000).unwrap();
            assert!(v.passed(), "{v:?}");
        }
        let f = FamilySpec::parse("DIH", &[]).unwrap();
        for m in f.relevance_bound(8).unwrap() {
            assert!(f.validate_member(&m, 10_000).unwrap().passed());
        }
        let f = FamilySpec::parse("DIHK", &[("i".into(), "1".into()), ("j".into(), "1".into())]).unwrap();
        for m in f.relevance_bound(8).unwrap() {
            assert!(f.validate_member(&m, 10_000).unwrap().passed(), "{}", m.label);
        }
        // a null generator is caught by the policy check
        let f = FamilySpec::parse("G1K", &[("m".into(), "2".into())]).unwrap();
        let bogus = Member {
            label: "bogus".into(),
            presentation: Presentation::from_strs(&["a", "b"], &["a^5", "b"]),
            expected_order: ExpectedOrder::Exactly(5),
            params: vec![("p".into(), 5)],
        };
        let v = f.validate_member(&bogus, 1000).unwrap();
        assert_eq!(v.failures().map(|c| c.name).collect::<Vec<_>>(), ["no null-homotopic generators"]);
    }
}
