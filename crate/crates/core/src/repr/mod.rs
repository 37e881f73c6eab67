//! Representability: supports, Moore matrices, exhaustive searches over
//! RREF generators and the block-diagonal and kernel-support tests.

mod blockdiag;
mod candidates;
mod certificate;
mod kernel;

use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraError, FieldContext, Matrix, RowPacking};
use crate::directsum::DirectSumError;
use crate::lattice::{LatticeError, RowSpace, SpaceId};
use crate::qmatroid::{Disagreement, MatrixRanker, QMatroid, QMatroidError};

pub use blockdiag::{block_diag_test, block_diag_test_against, BlockDiagOutcome};
pub use candidates::{enumerate_candidates, search_representations, CandidateSpace, SearchOutcome};
pub use certificate::{BlockFailure, Certificate, Verdict, Witness, TOOL_VERSION};
pub use kernel::{kernel_support_witness, obstruction_space, KernelWitness};

pub const DEFAULT_CANDIDATE_CAP: u64 = 100_000_000;
pub const DEFAULT_KERNEL_CAP: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum ReprError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    QMatroid(#[from] QMatroidError),
    #[error(transparent)]
    DirectSum(#[from] DirectSumError),
    #[error("{what}: {needed} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, needed: u128, cap: u64 },
    #[error("need m >= n for an MRD generator (m = {m}, n = {n})")]
    DegreeTooSmall { m: u32, n: usize },
    #[error("evaluation points are linearly dependent over the prime field")]
    DependentPoints,
    #[error("k = {k} out of range for n = {n}")]
    BadRank { k: usize, n: usize },
    #[error("certificate does not revalidate: {0}")]
    Revalidation(String),
}

/// Limits and seeds shared by the search routines.
#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub candidate_cap: u64,
    pub kernel_cap: u64,
    /// Seed for the resampling done during revalidation.
    pub seed: u64,
    /// Per-candidate witnesses are kept in certificates up to this count.
    pub witness_limit: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            kernel_cap: DEFAULT_KERNEL_CAP,
            seed: 0xC0FFEE,
            witness_limit: 1_000_000,
        }
    }
}

/// GF(q^m) with the default modulus.
pub fn extension_field(q: u32, m: u32) -> Result<Arc<FieldContext>, ReprError> {
    Ok(Arc::new(FieldContext::new(q, m, None)?))
}

/// The GF(p)-span of the coordinates of the entries of `v`, as a subspace
/// of GF(p)^d.
pub fn support(field: &FieldContext, v: &[u32]) -> RowSpace {
    let packing = RowPacking::new(field.characteristic(), field.degree() as usize).expect("field order fits a word");
    let rows = v
        .iter()
        .filter(|&&x| x != 0)
        .map(|&x| packing.pack(&field.coords(x)))
        .collect();
    RowSpace::new(&packing, rows)
}

pub fn rank_weight(field: &FieldContext, v: &[u32]) -> usize {
    support(field, v).dim()
}

/// The RREF basis of a support as field elements.
pub fn support_basis(field: &FieldContext, support: &RowSpace) -> Vec<u32> {
    let packing = RowPacking::new(support.q, support.n).expect("support fits a word");
    support.rows.iter().map(|&r| field.from_coords(&packing.unpack(r))).collect()
}

/// k x n matrix with entries α_j^(q^i).
pub fn moore_matrix(field: &Arc<FieldContext>, points: &[u32], k: usize) -> Result<Matrix, ReprError> {
    let n = points.len();
    if k > n {
        return Err(ReprError::BadRank { k, n });
    }
    if (field.degree() as usize) < n {
        return Err(ReprError::DegreeTooSmall { m: field.degree(), n });
    }
    if points.iter().any(|&a| !field.is_valid(a)) || rank_weight(field, points) != n {
        return Err(ReprError::DependentPoints);
    }
    let mut data = Vec::with_capacity(k * n);
    let mut row = points.to_vec();
    for _ in 0..k {
        data.extend_from_slice(&row);
        row.iter_mut().for_each(|a| *a = field.frobenius(*a));
    }
    Ok(Matrix::from_vec(field.clone(), k, n, data)?)
}

/// `None` if G represents M, otherwise the first subspace (dimension
/// ascending) where rk(G Y^T) differs from the rank in M. `left` is the
/// matrix rank, `right` the rank in M.
pub fn is_representation(g: &Matrix, m: &QMatroid) -> Result<Option<Disagreement>, ReprError> {
    let lattice = m.lattice();
    let ranker = MatrixRanker::new(g, lattice)?;
    Ok(first_disagreement(&ranker, m))
}

pub(crate) fn first_disagreement(ranker: &MatrixRanker, m: &QMatroid) -> Option<Disagreement> {
    let lattice = m.lattice();
    lattice.ids().find_map(|v: SpaceId| {
        let r = ranker.rank_of(lattice.rows(v));
        let want = m.rank_of(v);
        (r != want).then_some(Disagreement {
            space: v,
            dim: lattice.dim(v),
            left: r,
            right: want,
        })
    })
}
