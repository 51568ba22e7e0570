//! Exact linear algebra over the rationals: matrices, subspaces given by
//! row bases, intersections and sums, and randomized general-position
//! subspaces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::ElementSet;
use crate::error::{Error, Result};
use crate::exact::Rational;

/// Retry budget for every randomized construction.
pub const MAX_ATTEMPTS: u32 = 32;

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Domain(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(RationalMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    /// Builds from explicit rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let count = rows.len();
        let mut entries = Vec::with_capacity(count * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Domain(format!("row of length {} in a {cols}-column matrix", row.len())));
            }
            entries.extend(row);
        }
        Ok(RationalMatrix { rows: count, cols, entries })
    }

    pub fn from_int_rows(cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        RationalMatrix::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.cols {
            return Err(Error::AmbientMismatch { left: self.cols, right: other.cols });
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(RationalMatrix { rows: self.rows + other.rows, cols: self.cols, entries })
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::Domain(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RationalMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c).clone());
            }
        }
        RationalMatrix { rows: self.cols, cols: self.rows, entries }
    }

    /// Appends `extra` zero columns.
    pub fn pad_cols(&self, extra: usize) -> RationalMatrix {
        let cols = self.cols + extra;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            entries.extend(self.row(r).iter().cloned());
            entries.extend(std::iter::repeat_n(Rational::zero(), extra));
        }
        RationalMatrix { rows: self.rows, cols, entries }
    }

    /// Each row scaled by the lcm of its denominators, giving an integer
    /// matrix with the same row space and rank.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
            })
            .collect()
    }

    /// Reduced row echelon form over the rationals, with pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut rows = self.row_vecs();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..self.cols {
            let Some(p) = (lead..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
                continue;
            };
            rows.swap(lead, p);
            let inv = rows[lead][c].recip().expect("pivot is nonzero");
            for x in rows[lead].iter_mut() {
                *x = &*x * &inv;
            }
            let pivot_row = rows[lead].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == lead || row[c].is_zero() {
                    continue;
                }
                let factor = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x = &*x - &(&factor * p);
                    }
                }
            }
            pivots.push(c);
            lead += 1;
            if lead == rows.len() {
                break;
            }
        }
        let m = RationalMatrix::from_rows(self.cols, rows).expect("shape preserved");
        (m, pivots)
    }

    /// Basis of `{x : x · self = 0}` (the left null space), one vector per row.
    pub fn left_kernel(&self) -> RationalMatrix {
        let (reduced, pivots) = self.transpose().rref();
        // reduced has `self.rows` columns; free columns index kernel vectors.
        let n = self.rows;
        let mut basis = Vec::new();
        for free in (0..n).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Rational::zero(); n];
            v[free] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -reduced.get(r, free).clone();
            }
            basis.push(v);
        }
        RationalMatrix::from_rows(n, basis).expect("kernel rows have the right length")
    }
}

/// Exact rank by fraction-free (Bareiss) elimination on integer-scaled rows.
pub fn rank(m: &RationalMatrix) -> usize {
    let mut a = m.integer_rows();
    let rows = m.rows;
    let cols = m.cols;
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let v = &pivot_row[c] * &row[j] - &factor * &pivot_row[j];
                // Every intermediate entry is a minor of the input, so the
                // division is exact.
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// A subspace of `Q^n` given by linearly independent basis rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: RationalMatrix,
}

impl Subspace {
    /// Wraps `basis`, which must have independent rows and `ambient_dim` columns.
    pub fn new(ambient_dim: usize, basis: RationalMatrix) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::Domain("ambient dimension must be positive".into()));
        }
        if basis.cols() != ambient_dim {
            return Err(Error::AmbientMismatch { left: ambient_dim, right: basis.cols() });
        }
        if rank(&basis) != basis.rows() {
            return Err(Error::Domain(format!(
                "basis rows are dependent (rank {} < {} rows)",
                rank(&basis),
                basis.rows()
            )));
        }
        Ok(Subspace { ambient_dim, basis })
    }

    /// The span of arbitrary (possibly dependent) rows, in reduced form.
    pub fn span(ambient_dim: usize, generators: &RationalMatrix) -> Result<Self> {
        if generators.cols() != ambient_dim {
            return Err(Error::AmbientMismatch { left: ambient_dim, right: generators.cols() });
        }
        let (reduced, pivots) = generators.rref();
        let rows = (0..pivots.len()).map(|r| reduced.row(r).to_vec()).collect();
        Subspace::new(ambient_dim, RationalMatrix::from_rows(ambient_dim, rows)?)
    }

    pub fn from_int_rows(ambient_dim: usize, rows: &[Vec<i64>]) -> Result<Self> {
        Subspace::new(ambient_dim, RationalMatrix::from_int_rows(ambient_dim, rows)?)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: RationalMatrix::zeros(0, ambient_dim) }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: RationalMatrix::identity(ambient_dim) }
    }

    /// `span{e_i : i ∈ set}`.
    pub fn coordinate(ambient_dim: usize, set: &ElementSet) -> Result<Self> {
        if let Some(e) = set.max_element().filter(|&e| e > ambient_dim) {
            return Err(Error::OutsideGroundSet { element: e, ground_size: ambient_dim });
        }
        let rows = set
            .iter()
            .map(|e| {
                let mut v = vec![Rational::zero(); ambient_dim];
                v[e - 1] = Rational::one();
                v
            })
            .collect();
        Ok(Subspace { ambient_dim, basis: RationalMatrix::from_rows(ambient_dim, rows)? })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    /// Canonical reduced basis; equal subspaces give equal results.
    pub fn canonical(&self) -> Subspace {
        Subspace::span(self.ambient_dim, &self.basis).expect("same ambient")
    }

    pub fn same_space(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim && self.canonical().basis == other.canonical().basis
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        same_ambient(self, other)?;
        Ok(rank(&self.basis.stack(&other.basis)?) == self.dim())
    }

    /// Image under `x ↦ x · g` for an invertible `n × n` matrix `g`.
    pub fn transform(&self, g: &RationalMatrix) -> Result<Subspace> {
        if g.rows() != self.ambient_dim || g.cols() != self.ambient_dim {
            return Err(Error::AmbientMismatch { left: self.ambient_dim, right: g.rows() });
        }
        Subspace::new(self.ambient_dim, self.basis.mul(g)?)
    }

    /// The same subspace inside `Q^(n + extra)` (zero-padded coordinates).
    pub fn pad(&self, extra: usize) -> Subspace {
        Subspace { ambient_dim: self.ambient_dim + extra, basis: self.basis.pad_cols(extra) }
    }
}

fn same_ambient(u: &Subspace, v: &Subspace) -> Result<()> {
    if u.ambient_dim != v.ambient_dim {
        return Err(Error::AmbientMismatch { left: u.ambient_dim, right: v.ambient_dim });
    }
    Ok(())
}

/// `dim U + dim V - rank[U; V]`.
pub fn intersection_dim(u: &Subspace, v: &Subspace) -> Result<usize> {
    same_ambient(u, v)?;
    let r = rank(&u.basis.stack(&v.basis)?);
    Ok(u.dim() + v.dim() - r)
}

/// An explicit basis of `U ∩ V`, computed from the left kernel of the
/// stacked bases: `(c, d)` with `c·U + d·V = 0` gives `c·U ∈ U ∩ V`.
pub fn intersection_basis(u: &Subspace, v: &Subspace) -> Result<Subspace> {
    same_ambient(u, v)?;
    let stacked = u.basis.stack(&v.basis)?;
    let kernel = stacked.left_kernel();
    let du = u.dim();
    let coeffs: Vec<Vec<Rational>> = (0..kernel.rows())
        .map(|r| kernel.row(r)[..du].to_vec())
        .collect();
    let coeffs = RationalMatrix::from_rows(du, coeffs)?;
    let vectors = coeffs.mul(&u.basis)?;
    Subspace::span(u.ambient_dim, &vectors)
}

/// `U + V` with an independent basis.
pub fn sum_subspace(u: &Subspace, v: &Subspace) -> Result<Subspace> {
    same_ambient(u, v)?;
    Subspace::span(u.ambient_dim, &u.basis.stack(&v.basis)?)
}

/// A general-position subspace together with how many samples it took.
#[derive(Clone, Debug)]
pub struct GeneralPosition {
    pub subspace: Subspace,
    pub attempts: u32,
}

/// Seed for the `attempt`-th retry, derived with a splitmix64 step.
pub fn derive_seed(seed: u64, attempt: u64) -> u64 {
    let mut z = seed ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform integer matrix with entries in `[-bound, bound]`.
pub fn random_int_matrix(rows: usize, cols: usize, bound: i64, rng: &mut impl Rng) -> RationalMatrix {
    let entries = (0..rows * cols)
        .map(|_| Rational::from_integer(rng.gen_range(-bound..=bound)))
        .collect();
    RationalMatrix::new(rows, cols, entries).expect("entry count matches")
}

/// True iff `candidate` meets every obstacle `W` in dimension `max(dim W - t, 0)`.
pub fn is_general_position(candidate: &Subspace, obstacles: &[Subspace], t: usize) -> Result<bool> {
    for w in obstacles {
        if intersection_dim(w, candidate)? != w.dim().saturating_sub(t) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A codimension-`t` subspace `V'` of `Q^n` with
/// `dim(W ∩ V') = max(dim W - t, 0)` for every obstacle `W`.
///
/// Rows are sampled uniformly from `[-M, M]` with
/// `M = 1000 · (obstacles + 1)`, verified exactly, and resampled with a
/// derived seed up to [`MAX_ATTEMPTS`] times.
pub fn general_position_subspace(
    obstacles: &[Subspace],
    t: usize,
    n: usize,
    seed: u64,
) -> Result<GeneralPosition> {
    if n == 0 {
        return Err(Error::Precondition("ambient dimension must be positive".into()));
    }
    if t > n {
        return Err(Error::Precondition(format!("codimension {t} exceeds dimension {n}")));
    }
    for (i, w) in obstacles.iter().enumerate() {
        if w.ambient_dim() != n {
            return Err(Error::AmbientMismatch { left: n, right: w.ambient_dim() });
        }
        if w.dim() >= n {
            return Err(Error::Precondition(format!(
                "obstacle {} has full dimension {n}",
                i + 1
            )));
        }
    }
    if t == 0 {
        return Ok(GeneralPosition { subspace: Subspace::full(n), attempts: 1 });
    }
    let k = n - t;
    let bound = 1000 * (obstacles.len() as i64 + 1);
    for attempt in 1..=MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, attempt as u64));
        let sample = random_int_matrix(k, n, bound, &mut rng);
        if rank(&sample) != k {
            continue;
        }
        let candidate = Subspace { ambient_dim: n, basis: sample };
        if is_general_position(&candidate, obstacles, t)? {
            return Ok(GeneralPosition { subspace: candidate, attempts: attempt });
        }
    }
    Err(Error::ConstructionFailed {
        attempts: MAX_ATTEMPTS,
        reason: format!("no general-position subspace of codimension {t} found"),
    })
}

#[derive(Serialize, Deserialize)]
struct RawSubspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rational>>,
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawSubspace { ambient_dim: self.ambient_dim, basis: self.basis.row_vecs() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSubspace::deserialize(deserializer)?;
        RationalMatrix::from_rows(raw.ambient_dim, raw.basis)
            .and_then(|m| Subspace::new(raw.ambient_dim, m))
            .map_err(serde::de::Error::custom)
    }
}
