//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library's arithmetic, bitsets or elimination code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Set = BTreeSet<usize>;

/// Binomial coefficient from Pascal's triangle.
pub fn pascal(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = vec![BigUint::one(); row.len() + 1];
        for j in 1..row.len() {
            next[j] = &row[j - 1] + &row[j];
        }
        row = next;
    }
    row[k].clone()
}

pub fn inv(c: BigUint) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(c))
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// `1 / C(a + b - 2t, a - t)`, or `None` when undefined.
pub fn furedi_term(a: usize, b: usize, t: usize) -> Option<BigRational> {
    (a >= t && b >= t).then(|| inv(pascal(a + b - 2 * t, a - t)))
}

pub fn zhu_term(a: usize, b: usize, t: usize) -> Option<BigRational> {
    (b >= t).then(|| inv(pascal(a + b - t, b - t)))
}

pub fn meet(a: &Set, b: &Set) -> usize {
    a.intersection(b).count()
}

pub fn subsets(n: usize) -> Vec<Set> {
    (0u32..(1 << n))
        .map(|mask| (1..=n).filter(|e| mask & (1 << (e - 1)) != 0).collect())
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    Strong,
    Skew,
    SkewMonotone,
}

#[derive(Default, Clone)]
pub struct Filters {
    pub uniform_n: Option<usize>,
    pub uniform_rs: Option<(usize, usize)>,
    pub exact_self: bool,
    pub max_pairs: Option<usize>,
}

pub type Pair = (Set, Set);

/// Every nonempty t-system over `[n]` of the given kind, by plain
/// recursion over all candidate pairs with pairwise checks.
pub fn naive_systems(n: usize, t: usize, kind: Kind, f: &Filters, visit: &mut dyn FnMut(&[Pair])) {
    let all = subsets(n);
    let mut cands = Vec::new();
    for a in &all {
        for b in &all {
            let s = meet(a, b);
            if s > t || (f.exact_self && s != t) {
                continue;
            }
            if f.uniform_n.is_some_and(|big| a.len() + b.len() != big) {
                continue;
            }
            if f.uniform_rs.is_some_and(|rs| (a.len(), b.len()) != rs) {
                continue;
            }
            cands.push((a.clone(), b.clone()));
        }
    }
    let cap = f.max_pairs.unwrap_or(usize::MAX);
    let mut chosen: Vec<usize> = Vec::new();
    walk(&cands, t, kind, cap, &mut chosen, visit);
}

fn fits(cands: &[Pair], t: usize, kind: Kind, chosen: &[usize], c: usize) -> bool {
    if chosen.contains(&c) {
        return false;
    }
    let (ac, bc) = &cands[c];
    chosen.iter().all(|&i| {
        let (ai, bi) = &cands[i];
        let earlier_ok = meet(ai, bc) > t;
        match kind {
            Kind::Strong => earlier_ok && meet(ac, bi) > t,
            Kind::Skew => earlier_ok,
            Kind::SkewMonotone => earlier_ok && ai.len() <= ac.len() && bi.len() >= bc.len(),
        }
    })
}

fn walk(cands: &[Pair], t: usize, kind: Kind, cap: usize, chosen: &mut Vec<usize>, visit: &mut dyn FnMut(&[Pair])) {
    if !chosen.is_empty() {
        let system: Vec<Pair> = chosen.iter().map(|&i| cands[i].clone()).collect();
        visit(&system);
    }
    if chosen.len() >= cap {
        return;
    }
    let start = match kind {
        Kind::Strong => chosen.last().map_or(0, |l| l + 1),
        _ => 0,
    };
    for c in start..cands.len() {
        if fits(cands, t, kind, chosen, c) {
            chosen.push(c);
            walk(cands, t, kind, cap, chosen, visit);
            chosen.pop();
        }
    }
}

/// Füredi sum of a list of pairs; `None` if any term is undefined.
pub fn naive_furedi(system: &[Pair], t: usize) -> Option<BigRational> {
    system
        .iter()
        .map(|(a, b)| furedi_term(a.len(), b.len(), t))
        .sum()
}

pub fn naive_zhu(system: &[Pair], t: usize) -> Option<BigRational> {
    system.iter().map(|(a, b)| zhu_term(a.len(), b.len(), t)).sum()
}

/// Rank by textbook Gaussian elimination over the rationals.
pub fn naive_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                let pivot = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `dim(U ∩ V) = dim U + dim V - dim(U + V)` from bases given as rows.
pub fn naive_meet_dim(u: &[Vec<BigRational>], v: &[Vec<BigRational>]) -> usize {
    let stacked: Vec<Vec<BigRational>> = u.iter().chain(v.iter()).cloned().collect();
    naive_rank(u) + naive_rank(v) - naive_rank(&stacked)
}
