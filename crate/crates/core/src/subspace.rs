//! Subspace-pair systems: classification, sums, the codimension-`t`
//! reduction to a 0-system, the coordinate embedding of set systems, skew
//! ordering and the uniform-`v` extension.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::linalg::{
    derive_seed, general_position_subspace, intersection_basis, intersection_dim, random_int_matrix, rank,
    sum_subspace, RationalMatrix, Subspace, MAX_ATTEMPTS,
};
use crate::setpair::{classify_by, furedi_sum_of_sizes, ClassificationReport, SetPairSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspacePair {
    #[serde(rename = "U")]
    pub u_space: Subspace,
    #[serde(rename = "V")]
    pub v_space: Subspace,
}

impl SubspacePair {
    pub fn new(u_space: Subspace, v_space: Subspace) -> Result<Self> {
        if u_space.ambient_dim() != v_space.ambient_dim() {
            return Err(Error::AmbientMismatch { left: u_space.ambient_dim(), right: v_space.ambient_dim() });
        }
        Ok(SubspacePair { u_space, v_space })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.u_space.dim(), self.v_space.dim())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubspacePairSystem {
    ambient_dim: usize,
    pairs: Vec<SubspacePair>,
}

impl SubspacePairSystem {
    pub fn new(ambient_dim: usize, pairs: Vec<SubspacePair>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::Domain("ambient dimension must be positive".into()));
        }
        for pair in &pairs {
            for s in [&pair.u_space, &pair.v_space] {
                if s.ambient_dim() != ambient_dim {
                    return Err(Error::AmbientMismatch { left: ambient_dim, right: s.ambient_dim() });
                }
            }
        }
        Ok(SubspacePairSystem { ambient_dim, pairs })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn pairs(&self) -> &[SubspacePair] {
        &self.pairs
    }

    pub fn m(&self) -> usize {
        self.pairs.len()
    }

    pub fn dims(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().map(SubspacePair::dims).collect()
    }

    /// Embeds everything into `Q^(n + extra)`; no intersection dimension changes.
    pub fn pad(&self, extra: usize) -> SubspacePairSystem {
        SubspacePairSystem {
            ambient_dim: self.ambient_dim + extra,
            pairs: self
                .pairs
                .iter()
                .map(|p| SubspacePair { u_space: p.u_space.pad(extra), v_space: p.v_space.pad(extra) })
                .collect(),
        }
    }

    /// Applies the change of basis `x ↦ x · g` to every subspace.
    pub fn transform(&self, g: &RationalMatrix) -> Result<SubspacePairSystem> {
        let pairs = self
            .pairs
            .iter()
            .map(|p| Ok(SubspacePair { u_space: p.u_space.transform(g)?, v_space: p.v_space.transform(g)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(SubspacePairSystem { ambient_dim: self.ambient_dim, pairs })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Deserialize)]
struct RawSubspaceSystem {
    ambient_dim: usize,
    pairs: Vec<SubspacePair>,
}

impl<'de> Deserialize<'de> for SubspacePairSystem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSubspaceSystem::deserialize(deserializer)?;
        SubspacePairSystem::new(raw.ambient_dim, raw.pairs).map_err(serde::de::Error::custom)
    }
}

/// A random invertible integer matrix, for change-of-basis checks.
pub fn random_invertible(n: usize, seed: u64) -> RationalMatrix {
    for attempt in 0.. {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, attempt));
        let g = random_int_matrix(n, n, 9, &mut rng);
        if rank(&g) == n {
            return g;
        }
    }
    unreachable!()
}

fn meet_table(system: &SubspacePairSystem) -> Result<Vec<Vec<usize>>> {
    system
        .pairs
        .iter()
        .map(|p| {
            system
                .pairs
                .iter()
                .map(|q| intersection_dim(&p.u_space, &q.v_space))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// Strong/skew classification with `dim(U_i ∩ V_j)` as the measure.
pub fn classify_subspace(system: &SubspacePairSystem, t: usize) -> ClassificationReport {
    let table = meet_table(system).expect("pairs share the ambient dimension");
    classify_by(system.m(), t, |i, j| table[i][j])
}

/// `Σ 1 / C(u_i + v_i - 2t, u_i - t)`.
pub fn subspace_furedi_sum(system: &SubspacePairSystem, t: usize) -> Result<Rational> {
    furedi_sum_of_sizes(system.pairs.iter().map(SubspacePair::dims), t)
}

/// `Σ 1 / C(u_i + v - 2t, u_i - t)` with `v = max_i dim V_i`.
pub fn uniform_v_sum(system: &SubspacePairSystem, t: usize) -> Result<Rational> {
    let v = system.pairs.iter().map(|p| p.v_space.dim()).max().unwrap_or(0);
    furedi_sum_of_sizes(system.pairs.iter().map(|p| (p.u_space.dim(), v)), t)
}

/// `(A, B) ↦ (V(A), V(B))` where `V(I) = span{e_i : i ∈ I}`.
pub fn embed_sets_as_coordinate_subspaces(system: &SetPairSystem) -> SubspacePairSystem {
    let n = system.ground_size();
    let pairs = system
        .pairs()
        .iter()
        .map(|p| SubspacePair {
            u_space: Subspace::coordinate(n, &p.a_set).expect("sets lie in the ground set"),
            v_space: Subspace::coordinate(n, &p.b_set).expect("sets lie in the ground set"),
        })
        .collect();
    SubspacePairSystem { ambient_dim: n, pairs }
}

/// Result of intersecting a t-system with a general-position `W_0`.
#[derive(Clone, Debug)]
pub struct Reduction {
    /// `{(U_i ∩ W_0, V_i ∩ W_0)}` in the (possibly padded) ambient space.
    pub system: SubspacePairSystem,
    pub w0: Subspace,
    /// Zero coordinates appended so every obstacle is proper.
    pub padded_by: usize,
    pub attempts: u32,
}

fn check_dims_at_least(system: &SubspacePairSystem, t: usize) -> Result<()> {
    for (k, (u, v)) in system.dims().into_iter().enumerate() {
        if u < t || v < t {
            return Err(Error::DegeneratePair {
                index: k + 1,
                detail: format!("dimensions ({u}, {v}) below t = {t}"),
            });
        }
    }
    Ok(())
}

/// Intersects a skew subspace t-system with a codimension-`t` subspace in
/// general position to all `U_i`, `V_i` and `U_i ∩ V_i`, producing a skew
/// (or strong) 0-system whose dimensions are each lowered by `t`.
///
/// The ambient space is padded first if some obstacle is not proper. All
/// of the following are re-verified before returning: the new dimensions,
/// `dim(U'_i ∩ V'_i) = 0`, `dim(U'_i ∩ V'_j) > 0` for `i < j` (all `i ≠ j`
/// for strong input), and equality of the sums term by term.
pub fn reduce_to_zero_system(system: &SubspacePairSystem, t: usize, seed: u64) -> Result<Reduction> {
    let report = classify_subspace(system, t);
    if !report.skew {
        return Err(Error::Hypothesis { reason: format!("not a skew subspace {t}-system"), witnesses: report.witnesses });
    }
    check_dims_at_least(system, t)?;
    if t == 0 {
        return Ok(Reduction {
            system: system.clone(),
            w0: Subspace::full(system.ambient_dim),
            padded_by: 0,
            attempts: 0,
        });
    }

    let mut obstacles = Vec::with_capacity(3 * system.m());
    for p in &system.pairs {
        obstacles.push(p.u_space.clone());
        obstacles.push(p.v_space.clone());
        obstacles.push(intersection_basis(&p.u_space, &p.v_space)?);
    }
    let n = system.ambient_dim;
    let largest = obstacles.iter().map(Subspace::dim).max().unwrap_or(0);
    let padded_by = (largest + 1).saturating_sub(n);
    let working = system.pad(padded_by);
    let obstacles: Vec<Subspace> = obstacles.iter().map(|w| w.pad(padded_by)).collect();
    let n = n + padded_by;

    let gp = general_position_subspace(&obstacles, t, n, seed)?;
    let w0 = gp.subspace;
    let pairs = working
        .pairs
        .iter()
        .map(|p| {
            Ok(SubspacePair {
                u_space: intersection_basis(&p.u_space, &w0)?,
                v_space: intersection_basis(&p.v_space, &w0)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let reduced = SubspacePairSystem { ambient_dim: n, pairs };

    let fail = |reason: String| Error::ConstructionFailed { attempts: gp.attempts, reason };
    for (k, ((u, v), (u2, v2))) in system.dims().into_iter().zip(reduced.dims()).enumerate() {
        if u2 != u - t || v2 != v - t {
            return Err(fail(format!("pair {}: dimensions ({u}, {v}) became ({u2}, {v2})", k + 1)));
        }
    }
    let after = classify_subspace(&reduced, 0);
    if !after.skew || (report.strong && !after.strong) {
        return Err(fail(format!("reduced system is {}", after.verdict())));
    }
    for (k, (before, now)) in system.dims().into_iter().zip(reduced.dims()).enumerate() {
        let lhs = furedi_sum_of_sizes(std::iter::once(before), t)?;
        let rhs = furedi_sum_of_sizes(std::iter::once(now), 0)?;
        if lhs != rhs {
            return Err(fail(format!("pair {}: term {lhs} became {rhs}", k + 1)));
        }
    }
    Ok(Reduction { system: reduced, w0, padded_by, attempts: gp.attempts })
}

/// Reorders pairs so `dim U_i` is nondecreasing, ties broken by `dim V_i`
/// nonincreasing, then by original position.
pub fn sort_for_skew(system: &SubspacePairSystem) -> SubspacePairSystem {
    let mut indexed: Vec<(usize, &SubspacePair)> = system.pairs.iter().enumerate().collect();
    indexed.sort_by(|(i, p), (j, q)| {
        let (pu, pv) = p.dims();
        let (qu, qv) = q.dims();
        pu.cmp(&qu).then(qv.cmp(&pv)).then(i.cmp(j))
    });
    SubspacePairSystem {
        ambient_dim: system.ambient_dim,
        pairs: indexed.into_iter().map(|(_, p)| p.clone()).collect(),
    }
}

/// `dim U_i` nondecreasing and `dim V_i` nonincreasing.
pub fn is_monotone_ordered_subspace(system: &SubspacePairSystem) -> bool {
    system.dims().windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 >= w[1].1)
}

#[derive(Clone, Debug)]
pub struct Extension {
    pub system: SubspacePairSystem,
    pub padded_by: usize,
    pub attempts: u32,
}

/// Replaces each `V_i` by `W_i ⊇ V_i` of dimension `v = max_j dim V_j` with
/// `U_i ∩ W_i = U_i ∩ V_i`, using generic integer vectors outside
/// `U_i + V_i`. Pads the ambient space when there is not enough room.
pub fn extend_to_uniform_v(system: &SubspacePairSystem, t: usize, seed: u64) -> Result<Extension> {
    let report = classify_subspace(system, t);
    if !report.strong {
        return Err(Error::Hypothesis { reason: format!("not a strong subspace {t}-system"), witnesses: report.witnesses });
    }
    let v = system.pairs.iter().map(|p| p.v_space.dim()).max().unwrap_or(0);
    let mut needed = system.ambient_dim;
    for p in &system.pairs {
        let joint = sum_subspace(&p.u_space, &p.v_space)?.dim();
        needed = needed.max(joint + v - p.v_space.dim());
    }
    let padded_by = needed - system.ambient_dim;
    let working = system.pad(padded_by);
    let n = working.ambient_dim;
    let bound = 1000 * (system.m() as i64 + 1);

    let mut total_attempts = 0;
    let mut pairs = Vec::with_capacity(system.m());
    for (k, p) in working.pairs.iter().enumerate() {
        let missing = v - p.v_space.dim();
        if missing == 0 {
            pairs.push(p.clone());
            continue;
        }
        let base_meet = intersection_dim(&p.u_space, &p.v_space)?;
        let mut found = None;
        for attempt in 1..=MAX_ATTEMPTS {
            total_attempts += 1;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, ((k as u64) << 8) | attempt as u64));
            let extra = random_int_matrix(missing, n, bound, &mut rng);
            let w = Subspace::span(n, &p.v_space.basis().stack(&extra)?)?;
            if w.dim() == v && intersection_dim(&p.u_space, &w)? == base_meet {
                found = Some(w);
                break;
            }
        }
        let w = found.ok_or_else(|| Error::ConstructionFailed {
            attempts: MAX_ATTEMPTS,
            reason: format!("no extension of V_{} to dimension {v}", k + 1),
        })?;
        pairs.push(SubspacePair { u_space: p.u_space.clone(), v_space: w });
    }
    let extended = SubspacePairSystem { ambient_dim: n, pairs };
    let after = classify_subspace(&extended, t);
    if !after.strong {
        return Err(Error::ConstructionFailed {
            attempts: total_attempts,
            reason: format!("extended system is {}", after.verdict()),
        });
    }
    Ok(Extension { system: extended, padded_by, attempts: total_attempts })
}
