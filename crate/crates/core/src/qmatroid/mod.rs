//! q-matroids as materialized rank tables over a subspace lattice.

mod axioms;
mod structure;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::algebra::{AlgebraError, FieldContext, Matrix, RowPacking};
use crate::lattice::{Lattice, LatticeError, LatticeFingerprint, SpaceId};

pub use axioms::{check_axioms, AxiomOptions, Violation};
pub use structure::StructureReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QMatroidError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("rank table has {found} entries, lattice has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("rank {k} out of range for ground dimension {n}")]
    RankOutOfRange { k: usize, n: usize },
    #[error("paving family member {space} has dimension {dim}, expected {k}")]
    PavingDimension { space: String, dim: usize, k: usize },
    #[error("paving family members {a} and {b} meet in dimension {dim} > {max}")]
    PavingIntersection { a: String, b: String, dim: usize, max: usize },
    #[error("rank table violates the axioms ({} violations, first: {})", .0.len(), .0[0])]
    Axioms(Vec<Violation>),
    #[error("q-matroids live on different lattices ({left:?} vs {right:?})")]
    LatticeMismatch {
        left: LatticeFingerprint,
        right: LatticeFingerprint,
    },
}

/// A q-matroid with ground space F_q^n: a rank value for every subspace.
#[derive(Clone)]
pub struct QMatroid {
    lattice: Arc<Lattice>,
    ranks: Vec<u32>,
}

impl fmt::Debug for QMatroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "QMatroid(F_{}^{}, rank {}, {})",
            self.lattice.q(),
            self.lattice.n(),
            self.rank(),
            &self.digest()[..12]
        )
    }
}

/// First subspace (lowest index) on which two rank functions differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub space: SpaceId,
    pub dim: usize,
    pub left: u32,
    pub right: u32,
}

/// Fingerprint of a q-matroid for certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QMatroidFingerprint {
    pub lattice: LatticeFingerprint,
    pub rank: u32,
    /// SHA-256 of the rank table.
    pub digest: String,
}

impl QMatroid {
    /// Validates an arbitrary rank table against the axioms.
    pub fn from_table(lattice: Arc<Lattice>, ranks: Vec<u32>) -> Result<Self, QMatroidError> {
        let violations = check_axioms(&lattice, &ranks, &AxiomOptions::default())?;
        if !violations.is_empty() {
            return Err(QMatroidError::Axioms(violations));
        }
        Ok(QMatroid { lattice, ranks })
    }

    /// For tables that satisfy the axioms by construction.
    pub(crate) fn from_trusted_table(lattice: Arc<Lattice>, ranks: Vec<u32>) -> Self {
        debug_assert_eq!(ranks.len(), lattice.len());
        QMatroid { lattice, ranks }
    }

    /// The q-matroid represented by `g`: rank of V is rk(G Y^T) where
    /// rs(Y) = V.
    pub fn from_matrix(g: &Matrix, lattice: Arc<Lattice>) -> Result<Self, QMatroidError> {
        let ranker = MatrixRanker::new(g, &lattice)?;
        let ranks = lattice
            .ids()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|id| ranker.rank_of(lattice.rows(id)))
            .collect();
        Ok(QMatroid { lattice, ranks })
    }

    /// U_{k,n}(q): rank min{k, dim V}.
    pub fn uniform(k: usize, lattice: Arc<Lattice>) -> Result<Self, QMatroidError> {
        let n = lattice.n();
        if k > n {
            return Err(QMatroidError::RankOutOfRange { k, n });
        }
        let ranks = (0..=n)
            .flat_map(|d| std::iter::repeat_n(d.min(k) as u32, lattice.count_of_dim(d)))
            .collect();
        Ok(QMatroid { lattice, ranks })
    }

    /// Paving q-matroid of rank k from a family of k-spaces pairwise meeting
    /// in dimension at most k - 2: members get rank k - 1, everything else
    /// min{k, dim}.
    pub fn paving_from_family(family: &[SpaceId], k: usize, lattice: Arc<Lattice>) -> Result<Self, QMatroidError> {
        let n = lattice.n();
        if k < 1 || k >= n {
            return Err(QMatroidError::RankOutOfRange { k, n });
        }
        for &s in family {
            if lattice.dim(s) != k {
                return Err(QMatroidError::PavingDimension {
                    space: lattice.space_text(s),
                    dim: lattice.dim(s),
                    k,
                });
            }
        }
        for (i, &a) in family.iter().enumerate() {
            for &b in &family[i + 1..] {
                let dim = lattice.dim(lattice.intersect(a, b));
                if a != b && dim + 2 > k {
                    return Err(QMatroidError::PavingIntersection {
                        a: lattice.space_text(a),
                        b: lattice.space_text(b),
                        dim,
                        max: k.saturating_sub(2),
                    });
                }
            }
        }
        let mut m = Self::uniform(k, lattice)?;
        for &s in family {
            m.ranks[s.index()] = k as u32 - 1;
        }
        Ok(m)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn rank_of(&self, v: SpaceId) -> u32 {
        self.ranks[v.index()]
    }

    /// ρ(M) = ρ(E).
    pub fn rank(&self) -> u32 {
        self.ranks[self.lattice.full().index()]
    }

    pub fn ground_dim(&self) -> usize {
        self.lattice.n()
    }

    pub fn is_independent(&self, v: SpaceId) -> bool {
        self.rank_of(v) as usize == self.lattice.dim(v)
    }

    pub fn check_axioms(&self, options: &AxiomOptions) -> Vec<Violation> {
        check_axioms(&self.lattice, &self.ranks, options).expect("table length matches lattice")
    }

    fn check_same_lattice(&self, other: &QMatroid) -> Result<(), QMatroidError> {
        if !self.lattice.same_as(&other.lattice) {
            return Err(QMatroidError::LatticeMismatch {
                left: self.lattice.fingerprint(),
                right: other.lattice.fingerprint(),
            });
        }
        Ok(())
    }

    /// `None` when the rank tables agree, otherwise the first disagreement.
    pub fn compare(&self, other: &QMatroid) -> Result<Option<Disagreement>, QMatroidError> {
        self.check_same_lattice(other)?;
        Ok(self
            .ranks
            .iter()
            .zip(&other.ranks)
            .position(|(a, b)| a != b)
            .map(|i| {
                let space = SpaceId(i as u32);
                Disagreement {
                    space,
                    dim: self.lattice.dim(space),
                    left: self.ranks[i],
                    right: other.ranks[i],
                }
            }))
    }

    pub fn equals(&self, other: &QMatroid) -> Result<bool, QMatroidError> {
        Ok(self.compare(other)?.is_none())
    }

    /// Hex SHA-256 of the rank table (little-endian u32 per entry).
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.lattice.q() as u64).to_le_bytes());
        h.update((self.lattice.n() as u64).to_le_bytes());
        for r in &self.ranks {
            h.update(r.to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn fingerprint(&self) -> QMatroidFingerprint {
        QMatroidFingerprint {
            lattice: self.lattice.fingerprint(),
            rank: self.rank(),
            digest: self.digest(),
        }
    }
}

/// Evaluates rk(G Y^T) for packed GF(q) bases Y.
pub(crate) struct MatrixRanker {
    field: Arc<FieldContext>,
    packing: RowPacking,
    /// Columns of G, each of length k.
    columns: Vec<Vec<u32>>,
    k: usize,
}

impl MatrixRanker {
    pub(crate) fn new(g: &Matrix, lattice: &Lattice) -> Result<Self, QMatroidError> {
        let field = g.field().clone();
        if field.characteristic() != lattice.q() {
            return Err(AlgebraError::CharacteristicMismatch {
                from: lattice.q(),
                to: field.characteristic(),
            }
            .into());
        }
        if g.cols() != lattice.n() {
            return Err(AlgebraError::Shape(format!(
                "matrix has {} columns, ground space has dimension {}",
                g.cols(),
                lattice.n()
            ))
            .into());
        }
        Ok(MatrixRanker {
            columns: (0..g.cols()).map(|c| g.column(c)).collect(),
            k: g.rows(),
            field,
            packing: lattice.packing().clone(),
        })
    }

    /// Rank of G Y^T where the rows of Y are `rows`.
    pub(crate) fn rank_of(&self, rows: &[u64]) -> u32 {
        let f = &*self.field;
        let k = self.k;
        if k == 0 || rows.is_empty() {
            return 0;
        }
        // columns of G Y^T, i.e. G y for each row y
        let mut vecs: Vec<u32> = vec![0; rows.len() * k];
        for (r, &row) in rows.iter().enumerate() {
            let out = &mut vecs[r * k..(r + 1) * k];
            for (j, col) in self.columns.iter().enumerate() {
                let s = self.packing.digit(row, j);
                if s == 0 {
                    continue;
                }
                for (o, &g) in out.iter_mut().zip(col) {
                    *o = f.add(*o, f.scale_prime(s, g));
                }
            }
        }
        rank_flat(f, &mut vecs, rows.len(), k) as u32
    }
}

/// Rank of `count` vectors of length `k` stored contiguously.
pub(crate) fn rank_flat(f: &FieldContext, buf: &mut [u32], count: usize, k: usize) -> usize {
    let mut rank = 0;
    for c in 0..k {
        let Some(pr) = (rank..count).find(|&r| buf[r * k + c] != 0) else {
            continue;
        };
        for j in 0..k {
            buf.swap(pr * k + j, rank * k + j);
        }
        let inv = f.inv(buf[rank * k + c]).expect("pivot is nonzero");
        for r in rank + 1..count {
            let factor = buf[r * k + c];
            if factor == 0 {
                continue;
            }
            let scale = f.mul(factor, inv);
            for j in c..k {
                let v = f.sub(buf[r * k + j], f.mul(scale, buf[rank * k + j]));
                buf[r * k + j] = v;
            }
        }
        rank += 1;
        if rank == count {
            break;
        }
    }
    rank
}
