use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::QMatroidError;
use crate::lattice::{Lattice, SpaceId};

/// Controls how much of the submodularity check is exhaustive.
#[derive(Debug, Clone)]
pub struct AxiomOptions {
    /// Lattices with at most this many subspaces check every pair.
    pub exhaustive_limit: usize,
    /// Number of random pairs checked above the limit.
    pub samples: usize,
    pub seed: u64,
    /// Stop collecting after this many violations.
    pub max_violations: usize,
}

impl Default for AxiomOptions {
    fn default() -> Self {
        AxiomOptions {
            exhaustive_limit: 10_000,
            samples: 1_000_000,
            seed: 0xC0FFEE,
            max_violations: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "axiom")]
pub enum Violation {
    /// 0 <= rank <= dim fails (rank > dim; ranks are unsigned).
    DimensionBound { space: SpaceId, rank: u32, dim: usize },
    /// A covering pair lower < upper with rank(lower) > rank(upper).
    Monotonicity {
        lower: SpaceId,
        upper: SpaceId,
        lower_rank: u32,
        upper_rank: u32,
    },
    /// rank(V + W) + rank(V ∩ W) > rank(V) + rank(W).
    Submodularity {
        v: SpaceId,
        w: SpaceId,
        join: SpaceId,
        meet: SpaceId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionBound { space, rank, dim } => {
                write!(f, "(R1) rank {rank} of {space} exceeds its dimension {dim}")
            }
            Violation::Monotonicity {
                lower,
                upper,
                lower_rank,
                upper_rank,
            } => write!(f, "(R2) {lower} (rank {lower_rank}) < {upper} (rank {upper_rank})"),
            Violation::Submodularity { v, w, join, meet } => {
                write!(f, "(R3) fails for {v}, {w} (join {join}, meet {meet})")
            }
        }
    }
}

/// Checks (R1) everywhere, (R2) on covering pairs and (R3) on all pairs, or
/// on a seeded sample of pairs when the lattice exceeds the exhaustive limit.
/// An empty result means no violation was found.
pub fn check_axioms(lattice: &Lattice, ranks: &[u32], options: &AxiomOptions) -> Result<Vec<Violation>, QMatroidError> {
    if ranks.len() != lattice.len() {
        return Err(QMatroidError::LengthMismatch {
            expected: lattice.len(),
            found: ranks.len(),
        });
    }
    let cap = options.max_violations;
    let rank = |v: SpaceId| ranks[v.index()];
    let ids: Vec<SpaceId> = lattice.ids().collect();

    let mut violations: Vec<Violation> = ids
        .iter()
        .filter(|&&v| rank(v) as usize > lattice.dim(v))
        .take(cap)
        .map(|&v| Violation::DimensionBound {
            space: v,
            rank: rank(v),
            dim: lattice.dim(v),
        })
        .collect();

    let monotone: Vec<Violation> = ids
        .par_iter()
        .flat_map_iter(|&upper| {
            let mut out = Vec::new();
            if lattice.dim(upper) > 0 {
                lattice.for_each_hyperplane(upper, |lower| {
                    if rank(lower) > rank(upper) && out.len() < cap {
                        out.push(Violation::Monotonicity {
                            lower,
                            upper,
                            lower_rank: rank(lower),
                            upper_rank: rank(upper),
                        });
                    }
                });
            }
            out
        })
        .collect();
    violations.extend(monotone.into_iter().take(cap));

    let submodular = |v: SpaceId, w: SpaceId| -> Option<Violation> {
        let join = lattice.sum(v, w);
        let meet = lattice.intersect(v, w);
        (rank(join) + rank(meet) > rank(v) + rank(w)).then_some(Violation::Submodularity { v, w, join, meet })
    };
    let pairs: Vec<Violation> = if lattice.len() <= options.exhaustive_limit {
        ids.par_iter()
            .flat_map_iter(|&v| {
                ids[v.index() + 1..]
                    .iter()
                    .filter_map(|&w| submodular(v, w))
                    .take(cap)
                    .collect::<Vec<_>>()
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let n = lattice.len() as u32;
        let sample: Vec<(SpaceId, SpaceId)> = (0..options.samples)
            .map(|_| (SpaceId(rng.gen_range(0..n)), SpaceId(rng.gen_range(0..n))))
            .collect();
        sample.par_iter().filter_map(|&(v, w)| submodular(v, w)).collect()
    };
    violations.extend(pairs.into_iter().take(cap));
    violations.truncate(cap);
    Ok(violations)
}
