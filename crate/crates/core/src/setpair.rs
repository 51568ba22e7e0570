//! Set-pair systems over a finite ground set: t-system classification,
//! the fractional sums, sharp constructions and the antichain bridge.

use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::bitset::ElementSet;
use crate::error::{Error, Result};
use crate::exact::{binomial_u, Rational};

/// Default cap on the ground-set size. One machine word per set.
pub const DEFAULT_MAX_GROUND: usize = 64;

/// A pair `(A, B)` of subsets of the ground set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetPair {
    pub a_set: ElementSet,
    pub b_set: ElementSet,
}

impl SetPair {
    pub fn new(a_set: ElementSet, b_set: ElementSet) -> Self {
        SetPair { a_set, b_set }
    }

    pub fn from_slices(a: &[usize], b: &[usize]) -> Self {
        SetPair::new(
            ElementSet::from_elements(a.iter().copied()),
            ElementSet::from_elements(b.iter().copied()),
        )
    }

    pub fn a_len(&self) -> usize {
        self.a_set.len()
    }

    pub fn b_len(&self) -> usize {
        self.b_set.len()
    }

    pub fn self_intersection(&self) -> usize {
        self.a_set.intersection_len(&self.b_set)
    }
}

/// An ordered family of set pairs over `[ground_size]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetPairSystem {
    ground_size: usize,
    pairs: Vec<SetPair>,
}

impl SetPairSystem {
    pub fn new(ground_size: usize, pairs: Vec<SetPair>) -> Result<Self> {
        SetPairSystem::with_cap(ground_size, pairs, DEFAULT_MAX_GROUND)
    }

    pub fn with_cap(ground_size: usize, pairs: Vec<SetPair>, cap: usize) -> Result<Self> {
        if ground_size == 0 {
            return Err(Error::Domain("ground set size must be positive".into()));
        }
        if ground_size > cap {
            return Err(Error::CapExceeded { requested: ground_size, cap });
        }
        for pair in &pairs {
            for set in [&pair.a_set, &pair.b_set] {
                if let Some(e) = set.max_element().filter(|&e| e > ground_size) {
                    return Err(Error::OutsideGroundSet { element: e, ground_size });
                }
            }
        }
        Ok(SetPairSystem { ground_size, pairs })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn pairs(&self) -> &[SetPair] {
        &self.pairs
    }

    pub fn m(&self) -> usize {
        self.pairs.len()
    }

    pub fn into_pairs(self) -> Vec<SetPair> {
        self.pairs
    }

    /// Applies a ground-set permutation; `perm[i - 1]` is the image of `i`.
    pub fn relabel(&self, perm: &[usize]) -> SetPairSystem {
        assert_eq!(perm.len(), self.ground_size);
        let pairs = self
            .pairs
            .iter()
            .map(|p| SetPair::new(p.a_set.relabel(perm), p.b_set.relabel(perm)))
            .collect();
        SetPairSystem { ground_size: self.ground_size, pairs }
    }

    /// Reorders the pair list; `order[k]` is the old index of new pair `k`.
    pub fn reorder(&self, order: &[usize]) -> SetPairSystem {
        let pairs = order.iter().map(|&i| self.pairs[i].clone()).collect();
        SetPairSystem { ground_size: self.ground_size, pairs }
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        let _ = writeln!(out, "  \"ground_size\": {},", self.ground_size);
        if self.pairs.is_empty() {
            out.push_str("  \"pairs\": []\n}\n");
            return out;
        }
        out.push_str("  \"pairs\": [\n");
        for (k, pair) in self.pairs.iter().enumerate() {
            let sep = if k + 1 == self.pairs.len() { "" } else { "," };
            let _ = writeln!(
                out,
                "    {{\"A\": {}, \"B\": {}}}{sep}",
                json_int_list(&pair.a_set),
                json_int_list(&pair.b_set)
            );
        }
        out.push_str("  ]\n}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        SetPairSystem::from_json_with_cap(text, DEFAULT_MAX_GROUND)
    }

    pub fn from_json_with_cap(text: &str, cap: usize) -> Result<Self> {
        let raw: RawSystem = serde_json::from_str(text)?;
        raw.into_system(cap)
    }
}

fn json_int_list(set: &ElementSet) -> String {
    let items: Vec<String> = set.iter().map(|e| e.to_string()).collect();
    format!("[{}]", items.join(", "))
}

#[derive(Serialize, Deserialize)]
struct RawPair {
    #[serde(rename = "A")]
    a: Vec<usize>,
    #[serde(rename = "B")]
    b: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    ground_size: usize,
    pairs: Vec<RawPair>,
}

fn parse_set(values: &[usize], ground_size: usize) -> Result<ElementSet> {
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse(format!(
            "set {values:?} is not a strictly increasing list"
        )));
    }
    if let Some(&e) = values.iter().find(|&&e| e == 0 || e > ground_size) {
        return Err(Error::OutsideGroundSet { element: e, ground_size });
    }
    Ok(ElementSet::from_elements(values.iter().copied()))
}

impl RawSystem {
    fn into_system(self, cap: usize) -> Result<SetPairSystem> {
        let n = self.ground_size;
        if n > cap {
            return Err(Error::CapExceeded { requested: n, cap });
        }
        let pairs = self
            .pairs
            .iter()
            .map(|p| Ok(SetPair::new(parse_set(&p.a, n)?, parse_set(&p.b, n)?)))
            .collect::<Result<Vec<_>>>()?;
        SetPairSystem::with_cap(n, pairs, cap)
    }
}

impl Serialize for SetPairSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawSystem {
            ground_size: self.ground_size,
            pairs: self
                .pairs
                .iter()
                .map(|p| RawPair { a: p.a_set.to_vec(), b: p.b_set.to_vec() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SetPairSystem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        RawSystem::deserialize(deserializer)?
            .into_system(usize::MAX)
            .map_err(serde::de::Error::custom)
    }
}

/// One violated constraint. Indices are 1-based; `i == j` marks a
/// self-intersection above the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    pub observed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub t: usize,
    pub self_ok: bool,
    pub strong: bool,
    pub skew: bool,
    pub witnesses: Vec<Witness>,
}

impl ClassificationReport {
    /// `"strong"`, `"skew"` (skew but not strong) or `"neither"`.
    pub fn verdict(&self) -> &'static str {
        if self.strong {
            "strong"
        } else if self.skew {
            "skew"
        } else {
            "neither"
        }
    }
}

/// Classifies `m` pairs given the intersection measure `meet(i, j)` of the
/// `i`-th first member against the `j`-th second member (0-based).
/// Shared by the set and subspace classifiers.
pub fn classify_by(m: usize, t: usize, mut meet: impl FnMut(usize, usize) -> usize) -> ClassificationReport {
    let mut witnesses = Vec::new();
    let mut self_ok = true;
    let mut lower_ok = true;
    let mut upper_ok = true;
    for i in 0..m {
        for j in 0..m {
            let observed = meet(i, j);
            let violated = if i == j { observed > t } else { observed <= t };
            if !violated {
                continue;
            }
            witnesses.push(Witness { i: i + 1, j: j + 1, observed });
            match i.cmp(&j) {
                std::cmp::Ordering::Equal => self_ok = false,
                std::cmp::Ordering::Less => upper_ok = false,
                std::cmp::Ordering::Greater => lower_ok = false,
            }
        }
    }
    let skew = self_ok && upper_ok;
    ClassificationReport {
        t,
        self_ok,
        strong: skew && lower_ok,
        skew,
        witnesses,
    }
}

/// Strong/skew Bollobás t-system classification with every violated
/// constraint reported.
pub fn classify(system: &SetPairSystem, t: usize) -> ClassificationReport {
    let pairs = system.pairs();
    classify_by(pairs.len(), t, |i, j| pairs[i].a_set.intersection_len(&pairs[j].b_set))
}

/// True iff every self-intersection has size exactly `t`.
pub fn has_exact_self_intersection(system: &SetPairSystem, t: usize) -> bool {
    system.pairs().iter().all(|p| p.self_intersection() == t)
}

/// `1 / C(a + b - 2t, a - t)`; `None` when `a < t` or `b < t`.
pub fn furedi_term(a: usize, b: usize, t: usize) -> Option<Rational> {
    if a < t || b < t {
        return None;
    }
    let c = binomial_u((a + b - 2 * t) as u64, (a - t) as i64);
    Rational::reciprocal_of(&c).ok()
}

/// `1 / C(a + b - t, b - t)`; `None` when `b < t`.
pub fn zhu_term(a: usize, b: usize, t: usize) -> Option<Rational> {
    if b < t {
        return None;
    }
    let c = binomial_u((a + b - t) as u64, (b - t) as i64);
    Rational::reciprocal_of(&c).ok()
}

fn sum_terms(
    sizes: impl Iterator<Item = (usize, usize)>,
    term: impl Fn(usize, usize) -> Option<Rational>,
    requirement: &str,
) -> Result<Rational> {
    let mut total = Rational::zero();
    for (k, (a, b)) in sizes.enumerate() {
        let value = term(a, b).ok_or_else(|| Error::DegeneratePair {
            index: k + 1,
            detail: format!("sizes ({a}, {b}) violate {requirement}"),
        })?;
        total += &value;
    }
    Ok(total)
}

/// Sum of `1 / C(a_i + b_i - 2t, a_i - t)` over the pairs, for pair sizes
/// given directly. Requires `a_i, b_i ≥ t`.
pub fn furedi_sum_of_sizes(sizes: impl Iterator<Item = (usize, usize)>, t: usize) -> Result<Rational> {
    sum_terms(sizes, |a, b| furedi_term(a, b, t), &format!("a, b >= t = {t}"))
}

pub fn furedi_sum(system: &SetPairSystem, t: usize) -> Result<Rational> {
    furedi_sum_of_sizes(system.pairs().iter().map(|p| (p.a_len(), p.b_len())), t)
}

/// Sum of `1 / C(a_i + b_i - t, b_i - t)`. Only evaluates; checking the
/// exact-`t` hypothesis is up to the caller.
pub fn zhu_sum(system: &SetPairSystem, t: usize) -> Result<Rational> {
    sum_terms(
        system.pairs().iter().map(|p| (p.a_len(), p.b_len())),
        |a, b| zhu_term(a, b, t),
        &format!("b >= t = {t}"),
    )
}

/// Sum of `1 / C(a_i + b - 2t, a_i - t)` with `b = max_i |B_i|`.
pub fn max_b_sum(system: &SetPairSystem, t: usize) -> Result<Rational> {
    let b = system.pairs().iter().map(SetPair::b_len).max().unwrap_or(0);
    furedi_sum_of_sizes(system.pairs().iter().map(|p| (p.a_len(), b)), t)
}

/// Lexicographic `k`-subsets of `{1, …, n}`.
pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut current: Vec<usize> = (1..=k).collect();
    loop {
        out.push(current.clone());
        // Rightmost position that can still advance.
        let Some(pos) = (0..k).rev().find(|&i| current[i] < n - k + i + 1) else {
            return out;
        };
        current[pos] += 1;
        for i in pos + 1..k {
            current[i] = current[i - 1] + 1;
        }
    }
}

/// The sharp system: ground set `[a + b + t]`, `T = {a+b+1, …, a+b+t}`, and
/// one pair `(A ∪ T, ([a+b] \ A) ∪ T)` per `a`-subset `A` of `[a + b]`.
pub fn generate_sharp_system(a: usize, b: usize, t: usize) -> Result<SetPairSystem> {
    generate_sharp_system_with_cap(a, b, t, DEFAULT_MAX_GROUND)
}

pub fn generate_sharp_system_with_cap(a: usize, b: usize, t: usize, cap: usize) -> Result<SetPairSystem> {
    if a == 0 || b == 0 {
        return Err(Error::Domain(format!("sharp system needs a, b >= 1 (got a={a}, b={b})")));
    }
    let n = a + b + t;
    if n > cap {
        return Err(Error::CapExceeded { requested: n, cap });
    }
    let tail = ElementSet::from_elements(a + b + 1..=n);
    let pairs = k_subsets(a + b, a)
        .into_iter()
        .map(|subset| {
            let a_part = ElementSet::from_elements(subset);
            let b_part = a_part.complement(a + b);
            SetPair::new(a_part.union(&tail), b_part.union(&tail))
        })
        .collect();
    SetPairSystem::with_cap(n, pairs, cap)
}

fn check_family(family: &[ElementSet], n: usize) -> Result<()> {
    for set in family {
        if let Some(e) = set.max_element().filter(|&e| e > n) {
            return Err(Error::OutsideGroundSet { element: e, ground_size: n });
        }
    }
    Ok(())
}

/// `{(F_i, [n] \ F_i)}`: strong (t = 0) iff the family is an antichain.
pub fn antichain_to_system(family: &[ElementSet], n: usize) -> Result<SetPairSystem> {
    check_family(family, n)?;
    let pairs = family
        .iter()
        .map(|f| SetPair::new(f.clone(), f.complement(n)))
        .collect();
    SetPairSystem::with_cap(n, pairs, n.max(DEFAULT_MAX_GROUND))
}

/// No member contains another (repeated members count as containment).
pub fn is_antichain(family: &[ElementSet]) -> bool {
    family.iter().enumerate().all(|(i, f)| {
        family
            .iter()
            .enumerate()
            .all(|(j, g)| i == j || !f.is_subset(g))
    })
}

/// A family of subsets of `[ground_size]`, stored as
/// `{"ground_size": n, "family": [[...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    pub ground_size: usize,
    pub members: Vec<ElementSet>,
}

#[derive(Deserialize)]
struct RawFamily {
    ground_size: usize,
    family: Vec<Vec<usize>>,
}

impl SetFamily {
    pub fn from_json_with_cap(text: &str, cap: usize) -> Result<Self> {
        let raw: RawFamily = serde_json::from_str(text)?;
        if raw.ground_size == 0 {
            return Err(Error::Domain("ground set size must be positive".into()));
        }
        if raw.ground_size > cap {
            return Err(Error::CapExceeded { requested: raw.ground_size, cap });
        }
        let members = raw
            .family
            .iter()
            .map(|f| parse_set(f, raw.ground_size))
            .collect::<Result<Vec<_>>>()?;
        Ok(SetFamily { ground_size: raw.ground_size, members })
    }

    pub fn to_json(&self) -> String {
        let items: Vec<String> = self.members.iter().map(json_int_list).collect();
        format!(
            "{{\n  \"ground_size\": {},\n  \"family\": [{}]\n}}\n",
            self.ground_size,
            items.join(", ")
        )
    }
}

/// `Σ 1 / C(n, |F_i|)`.
pub fn lym_sum(family: &[ElementSet], n: usize) -> Result<Rational> {
    check_family(family, n)?;
    let mut total = Rational::zero();
    for f in family {
        total += &Rational::reciprocal_of(&binomial_u(n as u64, f.len() as i64))?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformBoundVerdict {
    pub uniform: bool,
    pub r: Option<usize>,
    pub s: Option<usize>,
    #[serde(with = "opt_biguint_str", skip_serializing_if = "Option::is_none", default)]
    pub bound: Option<BigUint>,
    pub m: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub holds: Option<bool>,
}

mod opt_biguint_str {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.collect_str(x),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        let raw: Option<String> = Option::deserialize(d)?;
        raw.map(|x| x.parse().map_err(serde::de::Error::custom)).transpose()
    }
}

/// Checks `m ≤ C(r + s - 2t, r - t)` for a skew t-system whose first sets
/// all have size `r` and second sets size `s`.
pub fn check_uniform_bound(system: &SetPairSystem, t: usize) -> Result<UniformBoundVerdict> {
    let report = classify(system, t);
    if !report.skew {
        return Err(Error::Hypothesis {
            reason: format!("not a skew {t}-system"),
            witnesses: report.witnesses,
        });
    }
    let m = system.m();
    let pairs = system.pairs();
    let uniform = !pairs.is_empty()
        && pairs.iter().all(|p| p.a_len() == pairs[0].a_len() && p.b_len() == pairs[0].b_len());
    if !uniform {
        return Ok(UniformBoundVerdict { uniform, r: None, s: None, bound: None, m, holds: None });
    }
    let (r, s) = (pairs[0].a_len(), pairs[0].b_len());
    if r < t || s < t {
        return Err(Error::DegeneratePair {
            index: 1,
            detail: format!("uniform sizes ({r}, {s}) below t = {t}"),
        });
    }
    let bound = binomial_u((r + s - 2 * t) as u64, (r - t) as i64);
    let holds = BigUint::from(m) <= bound;
    Ok(UniformBoundVerdict {
        uniform,
        r: Some(r),
        s: Some(s),
        bound: Some(bound),
        m,
        holds: Some(holds),
    })
}

/// `|A_i|` nondecreasing and `|B_i|` nonincreasing in list order.
pub fn is_monotone_ordered(system: &SetPairSystem) -> bool {
    system
        .pairs()
        .windows(2)
        .all(|w| w[0].a_len() <= w[1].a_len() && w[0].b_len() >= w[1].b_len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(n: usize, pairs: &[(&[usize], &[usize])]) -> SetPairSystem {
        SetPairSystem::new(n, pairs.iter().map(|(a, b)| SetPair::from_slices(a, b)).collect()).unwrap()
    }

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    fn set(xs: &[usize]) -> ElementSet {
        ElementSet::from_elements(xs.iter().copied())
    }

    #[test]
    fn classify_examples() {
        let s = sys(2, &[(&[1], &[2]), (&[2], &[1])]);
        let rep = classify(&s, 0);
        assert!(rep.strong && rep.skew && rep.self_ok);
        assert!(rep.witnesses.is_empty());
        assert_eq!(rep.verdict(), "strong");

        let dup = sys(2, &[(&[1], &[2]), (&[1], &[2])]);
        let rep = classify(&dup, 0);
        assert!(!rep.strong && !rep.skew && rep.self_ok);
        assert!(rep.witnesses.contains(&Witness { i: 1, j: 2, observed: 0 }));
        assert_eq!(rep.verdict(), "neither");

        let sharp = generate_sharp_system(1, 1, 1).unwrap();
        assert!(classify(&sharp, 1).strong);
    }

    #[test]
    fn classify_skew_only_and_self_violation() {
        let s = sys(2, &[(&[1, 2], &[]), (&[1], &[2])]);
        let rep = classify(&s, 0);
        assert!(rep.skew && !rep.strong);
        assert_eq!(rep.witnesses, vec![Witness { i: 2, j: 1, observed: 0 }]);

        let s = sys(1, &[(&[1], &[1])]);
        let rep = classify(&s, 0);
        assert!(!rep.self_ok && !rep.skew && !rep.strong);
        assert_eq!(rep.witnesses, vec![Witness { i: 1, j: 1, observed: 1 }]);
        assert!(classify(&s, 1).strong);
    }

    #[test]
    fn furedi_examples() {
        assert_eq!(furedi_sum(&generate_sharp_system(1, 1, 0).unwrap(), 0).unwrap(), r(1, 1));
        assert_eq!(furedi_sum(&sys(5, &[(&[1, 2], &[2, 3, 4])]), 1).unwrap(), r(1, 3));
        assert_eq!(furedi_sum(&generate_sharp_system(2, 1, 1).unwrap(), 1).unwrap(), r(1, 1));
        let err = furedi_sum(&sys(3, &[(&[1, 2], &[2]), (&[1], &[])]), 1).unwrap_err();
        assert!(matches!(err, Error::DegeneratePair { index: 2, .. }));
    }

    #[test]
    fn zhu_examples() {
        assert_eq!(zhu_sum(&sys(3, &[(&[1, 2], &[2, 3])]), 1).unwrap(), r(1, 3));
        assert_eq!(zhu_sum(&generate_sharp_system(1, 1, 1).unwrap(), 1).unwrap(), r(2, 3));
        assert_eq!(zhu_sum(&sys(3, &[]), 1).unwrap(), Rational::zero());
        assert!(matches!(
            zhu_sum(&sys(3, &[(&[1, 2], &[])]), 1),
            Err(Error::DegeneratePair { index: 1, .. })
        ));
    }

    #[test]
    fn sharp_examples() {
        let s = generate_sharp_system(1, 1, 0).unwrap();
        assert_eq!(s, sys(2, &[(&[1], &[2]), (&[2], &[1])]));
        let s = generate_sharp_system(1, 1, 1).unwrap();
        assert_eq!(s, sys(3, &[(&[1, 3], &[2, 3]), (&[2, 3], &[1, 3])]));
        let s = generate_sharp_system(2, 2, 0).unwrap();
        assert_eq!(s.m(), 6);
        assert_eq!(furedi_sum(&s, 0).unwrap(), r(1, 1));
        assert!(matches!(
            generate_sharp_system_with_cap(3, 3, 2, 7),
            Err(Error::CapExceeded { requested: 8, cap: 7 })
        ));
        assert!(generate_sharp_system(0, 2, 0).is_err());
    }

    #[test]
    fn k_subsets_counts() {
        assert_eq!(k_subsets(4, 2).len(), 6);
        assert_eq!(k_subsets(3, 0), vec![Vec::<usize>::new()]);
        assert!(k_subsets(2, 3).is_empty());
        assert_eq!(k_subsets(3, 2), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn antichain_bridge() {
        let s = antichain_to_system(&[set(&[1]), set(&[2])], 2).unwrap();
        assert_eq!(s, sys(2, &[(&[1], &[2]), (&[2], &[1])]));
        let s = antichain_to_system(&[set(&[1]), set(&[1, 2])], 2).unwrap();
        assert!(!classify(&s, 0).strong);
        let level: Vec<ElementSet> = k_subsets(4, 2).into_iter().map(|v| set(&v)).collect();
        let s = antichain_to_system(&level, 4).unwrap();
        assert_eq!(furedi_sum(&s, 0).unwrap(), r(1, 1));
        assert!(matches!(
            antichain_to_system(&[set(&[3])], 2),
            Err(Error::OutsideGroundSet { element: 3, ground_size: 2 })
        ));
    }

    #[test]
    fn lym_examples() {
        assert_eq!(lym_sum(&[set(&[1])], 3).unwrap(), r(1, 3));
        for n in 1..6 {
            let level: Vec<ElementSet> = (1..=n).map(|i| set(&[i])).collect();
            assert_eq!(lym_sum(&level, n).unwrap(), r(1, 1));
        }
        assert_eq!(lym_sum(&[set(&[1]), set(&[2, 3])], 3).unwrap(), r(2, 3));
        assert!(is_antichain(&[set(&[1]), set(&[2, 3])]));
        assert!(!is_antichain(&[set(&[1]), set(&[1])]));
    }

    #[test]
    fn family_json() {
        let text = "{\n  \"ground_size\": 3,\n  \"family\": [[1], [2, 3]]\n}\n";
        let fam = SetFamily::from_json_with_cap(text, 64).unwrap();
        assert_eq!(fam.members, vec![set(&[1]), set(&[2, 3])]);
        assert_eq!(fam.to_json(), text);
        assert!(SetFamily::from_json_with_cap("{\"ground_size\": 2, \"family\": [[3]]}", 64).is_err());
    }

    #[test]
    fn uniform_bound_examples() {
        for (a, b, t) in [(1, 1, 0), (2, 1, 1), (2, 2, 1)] {
            let s = generate_sharp_system(a, b, t).unwrap();
            let v = check_uniform_bound(&s, t).unwrap();
            assert!(v.uniform);
            assert_eq!((v.r, v.s), (Some(a + t), Some(b + t)));
            assert_eq!(v.bound, Some(binomial_u((a + b) as u64, a as i64)));
            assert_eq!(BigUint::from(v.m), v.bound.clone().unwrap());
            assert_eq!(v.holds, Some(true));
        }
        let v = check_uniform_bound(&sys(3, &[(&[1, 2], &[3])]), 0).unwrap();
        assert_eq!((v.r, v.s, v.m, v.holds), (Some(2), Some(1), 1, Some(true)));
        assert_eq!(v.bound, Some(BigUint::from(3u32)));

        let v = check_uniform_bound(&sys(2, &[(&[1, 2], &[]), (&[1], &[2])]), 0).unwrap();
        assert!(!v.uniform && v.bound.is_none() && v.holds.is_none());
        let json = serde_json::to_string(&v).unwrap();
        assert!(!json.contains("bound"));

        let dup = sys(2, &[(&[1], &[2]), (&[1], &[2])]);
        assert!(matches!(check_uniform_bound(&dup, 0), Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn monotone_examples() {
        assert!(is_monotone_ordered(&sys(3, &[(&[1], &[2, 3]), (&[2, 3], &[1])])));
        assert!(!is_monotone_ordered(&sys(2, &[(&[1, 2], &[]), (&[1], &[2])])));
        assert!(is_monotone_ordered(&sys(2, &[(&[1], &[2])])));
    }

    #[test]
    fn max_b_sum_pads_second_sizes() {
        // b = 2: 1/C(1+2,1) + 1/C(2+2,2) = 1/3 + 1/6
        let s = sys(3, &[(&[1], &[2, 3]), (&[2, 3], &[1])]);
        assert_eq!(max_b_sum(&s, 0).unwrap(), r(1, 2));
    }

    #[test]
    fn json_format_and_errors() {
        let s = generate_sharp_system(1, 1, 1).unwrap();
        let text = s.to_json();
        assert_eq!(
            text,
            "{\n  \"ground_size\": 3,\n  \"pairs\": [\n    {\"A\": [1, 3], \"B\": [2, 3]},\n    {\"A\": [2, 3], \"B\": [1, 3]}\n  ]\n}\n"
        );
        let back = SetPairSystem::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);

        let empty = SetPairSystem::new(2, vec![]).unwrap();
        assert_eq!(SetPairSystem::from_json(&empty.to_json()).unwrap(), empty);

        assert!(SetPairSystem::from_json("{\"ground_size\": 2, \"pairs\": [{\"A\": [2, 1], \"B\": []}]}").is_err());
        assert!(SetPairSystem::from_json("{\"ground_size\": 2, \"pairs\": [{\"A\": [3], \"B\": []}]}").is_err());
        assert!(SetPairSystem::from_json("{\"ground_size\": 2, \"pairs\": [{\"A\": [0], \"B\": []}]}").is_err());
        assert!(SetPairSystem::from_json("{\"ground_size\": 0, \"pairs\": []}").is_err());
        assert!(SetPairSystem::from_json("not json").is_err());
        assert!(matches!(
            SetPairSystem::from_json_with_cap("{\"ground_size\": 70, \"pairs\": []}", 64),
            Err(Error::CapExceeded { .. })
        ));
        assert!(SetPairSystem::from_json_with_cap("{\"ground_size\": 70, \"pairs\": [{\"A\": [70], \"B\": [1]}]}", 128).is_ok());
    }
}
