use std::sync::Arc;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::certificate::{Certificate, Verdict, Witness, MATCH};
use super::{first_disagreement, ReprError, SearchOptions};
use crate::algebra::{FieldContext, Matrix};
use crate::lattice::{free_slots, gauss_binom};
use crate::qmatroid::{MatrixRanker, QMatroid};

struct Profile {
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    start: u64,
}

/// All full-rank k x n matrices in RREF over a field, one per row space.
///
/// Ordered by pivot columns (lexicographic), then by the free entries read
/// row by row as a base-|F| number. For k = 0 the single candidate is the
/// 1 x n zero matrix.
pub struct CandidateSpace {
    field: Arc<FieldContext>,
    k: usize,
    n: usize,
    profiles: Vec<Profile>,
    total: u64,
}

impl std::fmt::Debug for CandidateSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CandidateSpace({}x{} over {}, {} candidates)", self.k, self.n, self.field.id(), self.total)
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

pub fn enumerate_candidates(
    k: usize,
    n: usize,
    field: &Arc<FieldContext>,
    cap: u64,
) -> Result<CandidateSpace, ReprError> {
    if k > n {
        return Err(ReprError::BadRank { k, n });
    }
    let needed = gauss_binom(n as u32, k as u32, field.order()).unwrap_or(u128::MAX);
    if needed > cap as u128 {
        return Err(ReprError::CapExceeded {
            what: "candidate matrices",
            needed,
            cap,
        });
    }
    let mut profiles = Vec::new();
    let mut start = 0u64;
    for pivots in k_subsets(n, k) {
        let free = free_slots(&pivots, n);
        let count = field.order().pow(free.len() as u32);
        profiles.push(Profile { pivots, free, start });
        start += count;
    }
    debug_assert_eq!(start as u128, needed);
    Ok(CandidateSpace {
        field: field.clone(),
        k,
        n,
        profiles,
        total: start,
    })
}

impl CandidateSpace {
    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.k, self.n)
    }

    pub fn field(&self) -> &Arc<FieldContext> {
        &self.field
    }

    /// The candidate with the given index.
    pub fn unrank(&self, index: u64) -> Matrix {
        assert!(index < self.total, "candidate {index} out of range");
        if self.k == 0 {
            return Matrix::zeros(self.field.clone(), 1, self.n);
        }
        let p = self.profiles.partition_point(|pr| pr.start <= index) - 1;
        let profile = &self.profiles[p];
        let q = self.field.order();
        let mut m = Matrix::zeros(self.field.clone(), self.k, self.n);
        for (i, &c) in profile.pivots.iter().enumerate() {
            m.set(i, c, 1);
        }
        let mut rest = index - profile.start;
        for &(i, j) in profile.free.iter().rev() {
            m.set(i, j, (rest % q) as u32);
            rest /= q;
        }
        m
    }

    pub fn iter(&self) -> impl Iterator<Item = Matrix> + '_ {
        (0..self.total).map(|i| self.unrank(i))
    }
}

/// Result of an exhaustive search at one extension degree.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub representations: Vec<Matrix>,
    pub indices: Vec<u64>,
    pub certificate: Certificate,
}

const CHUNK: u64 = 1 << 20;

/// Every RREF candidate of shape rank(M) x n over `field` that represents M.
///
/// Each candidate is rejected at the first subspace (dimension ascending)
/// where its rank disagrees with M. A cap overflow yields an inconclusive
/// certificate rather than an error.
pub fn search_representations(
    m: &QMatroid,
    field: &Arc<FieldContext>,
    options: &SearchOptions,
) -> Result<SearchOutcome, ReprError> {
    let k = m.rank() as usize;
    let n = m.ground_dim();
    let space = match enumerate_candidates(k, n, field, options.candidate_cap) {
        Ok(s) => s,
        Err(e @ ReprError::CapExceeded { .. }) => {
            return Ok(SearchOutcome {
                representations: Vec::new(),
                indices: Vec::new(),
                certificate: Certificate::new(
                    Verdict::Inconclusive,
                    field,
                    vec![m.fingerprint()],
                    Witness::Inconclusive { reason: e.to_string() },
                ),
            })
        }
        Err(e) => return Err(e),
    };
    // fail fast on characteristic or shape problems
    MatrixRanker::new(&space.unrank(0), m.lattice())?;

    let keep = space.len() <= options.witness_limit;
    let mut witnesses = Vec::new();
    let mut hasher = Sha256::new();
    let mut indices = Vec::new();
    let mut start = 0;
    while start < space.len() {
        let end = (start + CHUNK).min(space.len());
        let chunk: Vec<u32> = (start..end)
            .into_par_iter()
            .map(|i| {
                let g = space.unrank(i);
                let ranker = MatrixRanker::new(&g, m.lattice()).expect("checked above");
                first_disagreement(&ranker, m).map_or(MATCH, |d| d.space.0)
            })
            .collect();
        for (off, &w) in chunk.iter().enumerate() {
            hasher.update(w.to_le_bytes());
            if w == MATCH {
                indices.push(start + off as u64);
            }
        }
        if keep {
            witnesses.extend_from_slice(&chunk);
        }
        start = end;
    }
    let representations: Vec<Matrix> = indices.iter().map(|&i| space.unrank(i)).collect();
    let verdict = if representations.is_empty() {
        Verdict::NotRepresentableAtDegree
    } else {
        Verdict::Representable
    };
    let witness = Witness::Exhaustion {
        shape: [k, n],
        candidate_count: space.len(),
        expected_count: gauss_binom(n as u32, k as u32, field.order()).expect("within cap") as u64,
        digest: hex::encode(hasher.finalize()),
        witnesses: keep.then_some(witnesses),
        representations: representations.iter().map(|g| g.to_string()).collect(),
        representation_indices: indices.clone(),
    };
    Ok(SearchOutcome {
        representations,
        indices,
        certificate: Certificate::new(verdict, field, vec![m.fingerprint()], witness),
    })
}
