//! Direct sums of q-matroids on F^{n1} (+) F^{n2}.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{Lattice, LatticeError, LatticeFingerprint, Side, SpaceId, DEFAULT_LATTICE_CAP};
use crate::qmatroid::QMatroid;

#[derive(Debug, Error)]
pub enum DirectSumError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("{side:?} summand lives on {found:?}, expected {expected:?}")]
    WrongLattice {
        side: Side,
        expected: LatticeFingerprint,
        found: LatticeFingerprint,
    },
}

/// The three lattices of a split together with both projection tables.
pub struct SplitContext {
    left: Arc<Lattice>,
    right: Arc<Lattice>,
    total: Arc<Lattice>,
    proj_left: Vec<SpaceId>,
    proj_right: Vec<SpaceId>,
}

impl std::fmt::Debug for SplitContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SplitContext(q={}, {}+{})", self.total.q(), self.left.n(), self.right.n())
    }
}

impl SplitContext {
    pub fn new(q: u32, n1: usize, n2: usize) -> Result<Self, DirectSumError> {
        Self::with_cap(q, n1, n2, DEFAULT_LATTICE_CAP)
    }

    pub fn with_cap(q: u32, n1: usize, n2: usize, cap: u64) -> Result<Self, DirectSumError> {
        let total = Lattice::build_with_cap(q, n1 + n2, cap)?;
        let left = Lattice::build_with_cap(q, n1, cap)?;
        let right = Lattice::build_with_cap(q, n2, cap)?;
        Self::from_lattices(left, right, total)
    }

    pub fn from_lattices(left: Arc<Lattice>, right: Arc<Lattice>, total: Arc<Lattice>) -> Result<Self, DirectSumError> {
        if left.q() != total.q() || right.q() != total.q() || left.n() + right.n() != total.n() {
            return Err(LatticeError::Mismatch(format!(
                "F_{}^{} + F_{}^{} is not F_{}^{}",
                left.q(),
                left.n(),
                right.q(),
                right.n(),
                total.q(),
                total.n()
            ))
            .into());
        }
        let n2 = right.n();
        let ids: Vec<SpaceId> = total.ids().collect();
        let (proj_left, proj_right) = ids
            .par_iter()
            .map(|&v| {
                (
                    total.project_unchecked(v, n2, Side::Left, &left),
                    total.project_unchecked(v, n2, Side::Right, &right),
                )
            })
            .unzip();
        Ok(SplitContext {
            left,
            right,
            total,
            proj_left,
            proj_right,
        })
    }

    pub fn left(&self) -> &Arc<Lattice> {
        &self.left
    }

    pub fn right(&self) -> &Arc<Lattice> {
        &self.right
    }

    pub fn total(&self) -> &Arc<Lattice> {
        &self.total
    }

    pub fn side(&self, side: Side) -> &Arc<Lattice> {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// π_side(V).
    pub fn project(&self, v: SpaceId, side: Side) -> SpaceId {
        match side {
            Side::Left => self.proj_left[v.index()],
            Side::Right => self.proj_right[v.index()],
        }
    }

    /// V1 (+) V2.
    pub fn embed(&self, v1: SpaceId, v2: SpaceId) -> SpaceId {
        self.total
            .embed(&self.left, v1, &self.right, v2)
            .expect("context lattices form a split")
    }

    /// The summand subspace as it sits inside the total space.
    pub fn embed_side(&self, v: SpaceId, side: Side) -> SpaceId {
        match side {
            Side::Left => self.embed(v, self.right.zero()),
            Side::Right => self.embed(self.left.zero(), v),
        }
    }

    fn check(&self, m: &QMatroid, side: Side) -> Result<(), DirectSumError> {
        let expected = self.side(side);
        if !m.lattice().same_as(expected) {
            return Err(DirectSumError::WrongLattice {
                side,
                expected: expected.fingerprint(),
                found: m.lattice().fingerprint(),
            });
        }
        Ok(())
    }
}

/// M extended to the total space by V ↦ ρ(π_side V); the other summand
/// becomes a loop space.
pub fn lift_with_loops(m: &QMatroid, side: Side, ctx: &SplitContext) -> Result<QMatroid, DirectSumError> {
    ctx.check(m, side)?;
    let ranks = lifted_table(m, side, ctx);
    Ok(QMatroid::from_trusted_table(ctx.total.clone(), ranks))
}

fn lifted_table(m: &QMatroid, side: Side, ctx: &SplitContext) -> Vec<u32> {
    let proj = match side {
        Side::Left => &ctx.proj_left,
        Side::Right => &ctx.proj_right,
    };
    proj.par_iter().map(|&p| m.rank_of(p)).collect()
}

/// The direct sum with its intermediate tables.
///
/// `tau(X) = ρ'1(X) + ρ'2(X) - dim X` and `mu(V) = min(0, min_{X <= V} tau(X))`,
/// so that the sum has rank `dim V + mu(V)`.
#[derive(Debug, Clone)]
pub struct DirectSum {
    tau: Vec<i32>,
    mu: Vec<i32>,
    matroid: QMatroid,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectSumSummary {
    pub lattice: LatticeFingerprint,
    pub rank: u32,
    pub x_set_size: usize,
    pub circuit_count: usize,
    pub rank_additive: bool,
    pub digest: String,
}

pub fn direct_sum(m1: &QMatroid, m2: &QMatroid, ctx: &SplitContext) -> Result<DirectSum, DirectSumError> {
    ctx.check(m1, Side::Left)?;
    ctx.check(m2, Side::Right)?;
    let total = &ctx.total;
    let ids: Vec<SpaceId> = total.ids().collect();
    let tau: Vec<i32> = ids
        .par_iter()
        .map(|&v| {
            m1.rank_of(ctx.proj_left[v.index()]) as i32 + m2.rank_of(ctx.proj_right[v.index()]) as i32
                - total.dim(v) as i32
        })
        .collect();

    // every proper subspace of V lies in a hyperplane of V, so one level of
    // covers suffices once lower levels are final
    let mut mu = vec![0i32; total.len()];
    for d in 1..=total.n() {
        let range = total.dim_range(d);
        let level: Vec<i32> = range
            .clone()
            .into_par_iter()
            .map(|i| {
                let v = SpaceId(i as u32);
                let mut best = tau[i].min(0);
                total.for_each_hyperplane(v, |h| best = best.min(mu[h.index()]));
                best
            })
            .collect();
        mu[range].copy_from_slice(&level);
    }

    let ranks = ids
        .iter()
        .map(|&v| (total.dim(v) as i32 + mu[v.index()]) as u32)
        .collect();
    Ok(DirectSum {
        tau,
        mu,
        matroid: QMatroid::from_trusted_table(total.clone(), ranks),
    })
}

impl DirectSum {
    pub fn matroid(&self) -> &QMatroid {
        &self.matroid
    }

    pub fn into_matroid(self) -> QMatroid {
        self.matroid
    }

    pub fn tau(&self) -> &[i32] {
        &self.tau
    }

    pub fn mu(&self) -> &[i32] {
        &self.mu
    }

    /// {X : ρ'1(X) + ρ'2(X) < dim X}.
    pub fn x_set(&self) -> Vec<SpaceId> {
        (0..self.tau.len())
            .filter(|&i| self.tau[i] < 0)
            .map(|i| SpaceId(i as u32))
            .collect()
    }

    /// Inclusion-minimal elements of the X set, i.e. the circuits of the sum.
    pub fn circuits(&self) -> Vec<SpaceId> {
        let total = self.matroid.lattice();
        let candidates = self.x_set();
        candidates
            .into_par_iter()
            .filter(|&x| {
                let mut minimal = true;
                total.for_each_hyperplane(x, |h| minimal &= self.mu[h.index()] == 0);
                minimal
            })
            .collect()
    }

    pub fn summary(&self, m1: &QMatroid, m2: &QMatroid) -> DirectSumSummary {
        DirectSumSummary {
            lattice: self.matroid.lattice().fingerprint(),
            rank: self.matroid.rank(),
            x_set_size: self.tau.iter().filter(|&&t| t < 0).count(),
            circuit_count: self.circuits().len(),
            rank_additive: self.matroid.rank() == m1.rank() + m2.rank(),
            digest: self.matroid.digest(),
        }
    }
}

pub fn x_set(ctx: &SplitContext, m1: &QMatroid, m2: &QMatroid) -> Result<Vec<SpaceId>, DirectSumError> {
    Ok(direct_sum(m1, m2, ctx)?.x_set())
}

pub fn ds_circuits(m1: &QMatroid, m2: &QMatroid, ctx: &SplitContext) -> Result<Vec<SpaceId>, DirectSumError> {
    Ok(direct_sum(m1, m2, ctx)?.circuits())
}
