//! The full subspace lattice of F_q^n, materialized and densely indexed.
//!
//! Subspaces are stored as their RREF bases in the one-word-per-row packing
//! of [`RowPacking`]. Indices run dimension by dimension (ascending) and,
//! within a dimension, in lexicographic order of the packed RREF rows.
//!
//! Index lookup never hashes: every RREF basis is determined by its pivot
//! columns plus its free entries, so the pair (pivot mask, free digits) is
//! turned into a generation number and mapped to the sorted index.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{is_prime, AlgebraError, FieldContext, Matrix, RowPacking};

/// Default bound on the number of subspaces a lattice may hold.
pub const DEFAULT_LATTICE_CAP: u64 = 1 << 23;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice of F_{q}^{n} needs {needed} subspaces, cap is {cap}")]
    CapExceeded { q: u32, n: usize, needed: u128, cap: u64 },
    #[error("base field order {0} is not prime")]
    NotPrime(u32),
    #[error("lattice mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Dense index of a subspace within its lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpaceId(pub u32);

impl SpaceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Which summand of F^{n1} (+) F^{n2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Integrity tag for artifacts computed over a lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeFingerprint {
    pub q: u32,
    pub n: usize,
    pub count: u64,
}

/// Number of k-dimensional subspaces of F_q^n, or `None` on overflow.
pub fn gauss_binom(n: u32, k: u32, q: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num = num.checked_mul(q.checked_pow(n - i)? - 1)?;
        den = den.checked_mul(q.checked_pow(k - i)? - 1)?;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    Some(num / den)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Total number of subspaces of F_q^n.
pub fn lattice_size(n: u32, q: u64) -> Option<u128> {
    (0..=n).try_fold(0u128, |acc, k| acc.checked_add(gauss_binom(n, k, q)?))
}

/// A canonical subspace basis outside of any materialized lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowSpace {
    pub q: u32,
    pub n: usize,
    /// RREF rows, packed.
    pub rows: Vec<u64>,
}

impl RowSpace {
    pub fn new(packing: &RowPacking, mut rows: Vec<u64>) -> Self {
        packing.rref(&mut rows);
        RowSpace {
            q: packing.p(),
            n: packing.len(),
            rows,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn to_text(&self) -> String {
        RowPacking::new(self.q, self.n)
            .expect("packing was valid on construction")
            .rows_text(&self.rows)
    }
}

/// Materialized subspace lattice L(F_q^n).
pub struct Lattice {
    q: u32,
    n: usize,
    packing: RowPacking,
    /// First index of each dimension; `dim_start[n + 1]` is the total.
    dim_start: Vec<u32>,
    /// Offset into `rows` of the first subspace of each dimension.
    row_start: Vec<usize>,
    rows: Vec<u64>,
    profile_base: Vec<u64>,
    gen_to_index: Vec<u32>,
    pow_q: Vec<u64>,
    perp: OnceLock<Vec<u32>>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(F_{}^{}, {} subspaces)", self.q, self.n, self.len())
    }
}

impl Lattice {
    pub fn build(q: u32, n: usize) -> Result<Arc<Lattice>, LatticeError> {
        Self::build_with_cap(q, n, DEFAULT_LATTICE_CAP)
    }

    pub fn build_with_cap(q: u32, n: usize, cap: u64) -> Result<Arc<Lattice>, LatticeError> {
        if !is_prime(q) {
            return Err(LatticeError::NotPrime(q));
        }
        let too_big = |needed| LatticeError::CapExceeded { q, n, needed, cap };
        let total = lattice_size(n as u32, q as u64).ok_or(too_big(u128::MAX))?;
        if total > cap as u128 || n > 30 {
            return Err(too_big(total));
        }
        let packing = RowPacking::new(q, n)?;
        let pow_q: Vec<u64> = (0..=n * n).map(|e| (q as u64).saturating_pow(e as u32)).collect();

        // Generation order: pivot masks ascending, free digits as an odometer.
        let mut profile_base = vec![0u64; 1 << n];
        let mut per_dim: Vec<(Vec<u64>, Vec<u64>)> = vec![(Vec::new(), Vec::new()); n + 1];
        let mut generation = 0u64;
        for (mask, base) in profile_base.iter_mut().enumerate() {
            *base = generation;
            let pivots: Vec<usize> = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
            let free = free_slots(&pivots, n);
            let count = pow_q[free.len()];
            let (rows, gens) = &mut per_dim[pivots.len()];
            for local in 0..count {
                let mut digits = vec![vec![0u32; n]; pivots.len()];
                for (i, &pc) in pivots.iter().enumerate() {
                    digits[i][pc] = 1;
                }
                let mut rest = local;
                for &(i, j) in &free {
                    digits[i][j] = (rest % q as u64) as u32;
                    rest /= q as u64;
                }
                rows.extend(digits.iter().map(|d| packing.pack(d)));
                gens.push(generation + local);
            }
            generation += count;
        }
        debug_assert_eq!(generation as u128, total);

        let mut dim_start = Vec::with_capacity(n + 2);
        let mut row_start = Vec::with_capacity(n + 2);
        let mut sorted_rows = Vec::new();
        let mut gen_to_index = vec![0u32; total as usize];
        let mut next = 0u32;
        for (d, (rows, gens)) in per_dim.iter().enumerate() {
            dim_start.push(next);
            row_start.push(sorted_rows.len());
            let mut order: Vec<usize> = (0..gens.len()).collect();
            if d > 0 {
                order.sort_unstable_by(|&a, &b| rows[a * d..(a + 1) * d].cmp(&rows[b * d..(b + 1) * d]));
            }
            for &o in &order {
                sorted_rows.extend_from_slice(&rows[o * d..(o + 1) * d]);
                gen_to_index[gens[o] as usize] = next;
                next += 1;
            }
        }
        dim_start.push(next);
        row_start.push(sorted_rows.len());

        Ok(Arc::new(Lattice {
            q,
            n,
            packing,
            dim_start,
            row_start,
            rows: sorted_rows,
            profile_base,
            gen_to_index,
            pow_q,
            perp: OnceLock::new(),
        }))
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.dim_start[self.n + 1] as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn packing(&self) -> &RowPacking {
        &self.packing
    }

    pub fn fingerprint(&self) -> LatticeFingerprint {
        LatticeFingerprint {
            q: self.q,
            n: self.n,
            count: self.len() as u64,
        }
    }

    pub fn same_as(&self, other: &Lattice) -> bool {
        self.q == other.q && self.n == other.n
    }

    pub fn ids(&self) -> impl DoubleEndedIterator<Item = SpaceId> + ExactSizeIterator {
        (0..self.len() as u32).map(SpaceId)
    }

    pub fn ids_of_dim(&self, d: usize) -> impl DoubleEndedIterator<Item = SpaceId> + ExactSizeIterator {
        (self.dim_start[d]..self.dim_start[d + 1]).map(SpaceId)
    }

    /// Index range of dimension `d`.
    pub fn dim_range(&self, d: usize) -> std::ops::Range<usize> {
        self.dim_start[d] as usize..self.dim_start[d + 1] as usize
    }

    pub fn count_of_dim(&self, d: usize) -> usize {
        self.dim_range(d).len()
    }

    pub fn dim(&self, id: SpaceId) -> usize {
        // dimension-major; at most n + 1 ranges
        self.dim_start[1..].partition_point(|&s| s <= id.0)
    }

    pub fn rows(&self, id: SpaceId) -> &[u64] {
        let d = self.dim(id);
        let start = self.row_start[d] + (id.0 - self.dim_start[d]) as usize * d;
        &self.rows[start..start + d]
    }

    pub fn zero(&self) -> SpaceId {
        SpaceId(0)
    }

    pub fn full(&self) -> SpaceId {
        SpaceId(self.len() as u32 - 1)
    }

    pub fn space_text(&self, id: SpaceId) -> String {
        self.packing.rows_text(self.rows(id))
    }

    pub fn row_space(&self, id: SpaceId) -> RowSpace {
        RowSpace {
            q: self.q,
            n: self.n,
            rows: self.rows(id).to_vec(),
        }
    }

    /// The basis of a subspace as a matrix over GF(q).
    pub fn basis_matrix(&self, id: SpaceId, field: &Arc<FieldContext>) -> Matrix {
        let rows: Vec<Vec<u32>> = self.rows(id).iter().map(|&r| self.packing.unpack(r)).collect();
        if rows.is_empty() {
            return Matrix::zeros(field.clone(), 0, self.n);
        }
        Matrix::from_rows(field.clone(), &rows).expect("digits are valid prime-field codes")
    }

    /// Index of a basis already in RREF (nonzero rows only).
    pub fn index_of_rref(&self, rows: &[u64]) -> SpaceId {
        let mut mask = 0usize;
        let mut pivots = [0usize; 64];
        for (i, &r) in rows.iter().enumerate() {
            let c = self.packing.leading(r).expect("RREF rows are nonzero");
            pivots[i] = c;
            mask |= 1 << c;
        }
        let q = self.q as u64;
        let mut local = 0u64;
        let mut place = 1u64;
        for (i, &r) in rows.iter().enumerate() {
            for j in pivots[i] + 1..self.n {
                if mask >> j & 1 == 0 {
                    local += self.packing.digit(r, j) as u64 * place;
                    place *= q;
                }
            }
        }
        SpaceId(self.gen_to_index[(self.profile_base[mask] + local) as usize])
    }

    /// Index of the row space of arbitrary packed rows.
    pub fn canonicalize_rows(&self, mut rows: Vec<u64>) -> SpaceId {
        self.packing.rref(&mut rows);
        self.index_of_rref(&rows)
    }

    pub fn index_of_space(&self, space: &RowSpace) -> Result<SpaceId, LatticeError> {
        if space.q != self.q || space.n != self.n {
            return Err(LatticeError::Mismatch(format!(
                "subspace of F_{}^{} in lattice of F_{}^{}",
                space.q, space.n, self.q, self.n
            )));
        }
        Ok(self.index_of_rref(&space.rows))
    }

    /// Index of the row space of a matrix over GF(q).
    pub fn canonicalize(&self, m: &Matrix) -> Result<SpaceId, LatticeError> {
        let f = m.field();
        if f.degree() != 1 || f.characteristic() != self.q || m.cols() != self.n {
            return Err(LatticeError::Mismatch(format!(
                "{}x{} matrix over {} for F_{}^{}",
                m.rows(),
                m.cols(),
                f.id(),
                self.q,
                self.n
            )));
        }
        let rows = m.row_vecs().iter().map(|r| self.packing.pack(r)).collect();
        Ok(self.canonicalize_rows(rows))
    }

    /// Parses a subspace given by spanning rows in matrix text form.
    pub fn parse_space(&self, text: &str) -> Result<SpaceId, LatticeError> {
        let f = Arc::new(FieldContext::prime(self.q)?);
        let m = Matrix::parse(f, text)?;
        if m.rows() == 0 {
            return Ok(self.zero());
        }
        self.canonicalize(&m)
    }

    /// V + W.
    pub fn sum(&self, v: SpaceId, w: SpaceId) -> SpaceId {
        let mut rows = self.rows(v).to_vec();
        rows.extend_from_slice(self.rows(w));
        self.canonicalize_rows(rows)
    }

    /// Join of an arbitrary collection.
    pub fn sum_all(&self, spaces: impl IntoIterator<Item = SpaceId>) -> SpaceId {
        let mut rows: Vec<u64> = Vec::new();
        for s in spaces {
            rows.extend_from_slice(self.rows(s));
            if rows.len() > self.n {
                self.packing.rref(&mut rows);
            }
        }
        self.canonicalize_rows(rows)
    }

    /// V ∩ W, computed as (V^⊥ + W^⊥)^⊥.
    pub fn intersect(&self, v: SpaceId, w: SpaceId) -> SpaceId {
        let perp = self.perp_table();
        let s = self.sum(SpaceId(perp[v.index()]), SpaceId(perp[w.index()]));
        SpaceId(perp[s.index()])
    }

    /// Whether W ≤ V.
    pub fn contains(&self, v: SpaceId, w: SpaceId) -> bool {
        let basis = self.rows(v);
        if self.dim(w) > basis.len() {
            return false;
        }
        let pivots = self.packing.pivots_of(basis);
        self.rows(w)
            .iter()
            .all(|&r| self.packing.reduce(r, basis, &pivots) == 0)
    }

    /// Orthogonal complement under the standard bilinear form.
    pub fn perp(&self, v: SpaceId) -> SpaceId {
        SpaceId(self.perp_table()[v.index()])
    }

    fn perp_table(&self) -> &[u32] {
        self.perp.get_or_init(|| {
            use rayon::prelude::*;
            (0..self.len() as u32)
                .into_par_iter()
                .map(|i| self.compute_perp(SpaceId(i)).0)
                .collect()
        })
    }

    fn compute_perp(&self, v: SpaceId) -> SpaceId {
        let basis = self.rows(v);
        let pivots = self.packing.pivots_of(basis);
        let q = self.q;
        let mut kernel = Vec::with_capacity(self.n - basis.len());
        for free in (0..self.n).filter(|c| !pivots.contains(c)) {
            let mut digits = vec![0u32; self.n];
            digits[free] = 1;
            for (&row, &pc) in basis.iter().zip(&pivots) {
                digits[pc] = (q - self.packing.digit(row, free)) % q;
            }
            kernel.push(self.packing.pack(&digits));
        }
        self.canonicalize_rows(kernel)
    }

    /// Calls `f` on every hyperplane (codimension-1 subspace) of V.
    ///
    /// Hyperplanes correspond to nonzero functionals on V's coordinates up to
    /// scaling; with the functional normalized to have first nonzero entry 1
    /// at position t, the kernel is spanned by b_i - f_i b_t for i != t.
    pub fn for_each_hyperplane(&self, v: SpaceId, mut f: impl FnMut(SpaceId)) {
        let basis = self.rows(v);
        let d = basis.len();
        let q = self.q;
        let mut rows = Vec::with_capacity(d);
        for t in 0..d {
            let tail = d - 1 - t;
            for code in 0..self.pow_q[tail] {
                rows.clear();
                let mut rest = code;
                for i in 0..d {
                    if i == t {
                        continue;
                    }
                    let coeff = if i < t {
                        0
                    } else {
                        let c = (rest % q as u64) as u32;
                        rest /= q as u64;
                        c
                    };
                    rows.push(self.packing.add_scaled(basis[i], basis[t], (q - coeff) % q));
                }
                f(self.canonicalize_rows(rows.clone()));
            }
        }
    }

    /// All hyperplanes of V, (q^dim - 1)/(q - 1) of them.
    pub fn covers_below(&self, v: SpaceId) -> Vec<SpaceId> {
        let mut out = Vec::new();
        self.for_each_hyperplane(v, |h| out.push(h));
        out
    }

    /// All spaces covering V, via duality with hyperplanes of V^⊥.
    pub fn covers_above(&self, v: SpaceId) -> Vec<SpaceId> {
        let mut out = Vec::new();
        self.for_each_hyperplane(self.perp(v), |h| out.push(self.perp(h)));
        out
    }

    fn check_split(&self, left: &Lattice, right: &Lattice) -> Result<(), LatticeError> {
        if left.q != self.q || right.q != self.q || left.n + right.n != self.n {
            return Err(LatticeError::Mismatch(format!(
                "split F_{}^{} + F_{}^{} of F_{}^{}",
                left.q, left.n, right.q, right.n, self.q, self.n
            )));
        }
        Ok(())
    }

    /// π_side(V) where self = F^{n1} (+) F^{n2} and `target` is F^{n_side}.
    pub fn project(&self, v: SpaceId, n1: usize, side: Side, target: &Lattice) -> Result<SpaceId, LatticeError> {
        let n2 = self.n.checked_sub(n1).ok_or_else(|| LatticeError::Mismatch("n1 > n".into()))?;
        let expected = if side == Side::Left { n1 } else { n2 };
        if target.q != self.q || target.n != expected {
            return Err(LatticeError::Mismatch(format!(
                "projection target F_{}^{}, expected F_{}^{}",
                target.q, target.n, self.q, expected
            )));
        }
        Ok(self.project_unchecked(v, n2, side, target))
    }

    pub(crate) fn project_unchecked(&self, v: SpaceId, n2: usize, side: Side, target: &Lattice) -> SpaceId {
        let split = self.pow_q[n2];
        let rows = self
            .rows(v)
            .iter()
            .map(|&r| match side {
                Side::Left => r / split,
                Side::Right => r % split,
            })
            .collect();
        target.canonicalize_rows(rows)
    }

    /// V1 (+) V2 inside self = F^{n1} (+) F^{n2}.
    pub fn embed(&self, left: &Lattice, v1: SpaceId, right: &Lattice, v2: SpaceId) -> Result<SpaceId, LatticeError> {
        self.check_split(left, right)?;
        let split = self.pow_q[right.n];
        let mut rows: Vec<u64> = left.rows(v1).iter().map(|&r| r * split).collect();
        rows.extend_from_slice(right.rows(v2));
        Ok(self.index_of_rref(&rows))
    }
}

/// (row, column) slots of the free entries of an RREF with these pivots.
pub(crate) fn free_slots(pivots: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &pc) in pivots.iter().enumerate() {
        for j in pc + 1..n {
            if !pivots.contains(&j) {
                out.push((i, j));
            }
        }
    }
    out
}
