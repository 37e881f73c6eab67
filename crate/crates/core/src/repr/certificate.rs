use std::collections::HashSet;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{enumerate_candidates, is_representation, support, ReprError, SearchOptions};
use crate::algebra::{FieldContext, Matrix};
use crate::lattice::gauss_binom;
use crate::qmatroid::{MatrixRanker, QMatroid, QMatroidFingerprint};

pub const TOOL_VERSION: &str = concat!("qmatroid ", env!("CARGO_PKG_VERSION"));

/// Witness code for a candidate that represents the target.
pub(crate) const MATCH: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Representable,
    NotRepresentableAtDegree,
    ObstructionFound,
    Inconclusive,
}

/// A diagonal pair that failed, with the first subspace of disagreement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockFailure {
    pub left: usize,
    pub right: usize,
    pub space: String,
    pub dim: usize,
    pub matrix_rank: u32,
    pub target_rank: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Matrix {
        matrix: String,
    },
    /// Transcript of an exhaustive search. `witnesses[i]` is the lattice
    /// index of the first disagreement of candidate i (or u32::MAX for a
    /// match); `digest` hashes that sequence.
    Exhaustion {
        shape: [usize; 2],
        candidate_count: u64,
        expected_count: u64,
        digest: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witnesses: Option<Vec<u32>>,
        representations: Vec<String>,
        representation_indices: Vec<u64>,
    },
    /// Diagonal pairs drawn from the representations of each summand.
    BlockPairs {
        left: Vec<String>,
        right: Vec<String>,
        failures: Vec<BlockFailure>,
        success: Option<[usize; 2]>,
    },
    Obstruction {
        g1: String,
        g2: String,
        k: usize,
        v1: Vec<u32>,
        v2: Vec<u32>,
        support: String,
        weight: usize,
    },
    Inconclusive {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub field: String,
    pub degree: u32,
    pub targets: Vec<QMatroidFingerprint>,
    pub witness: Witness,
    pub note: String,
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

fn fail(msg: impl Into<String>) -> ReprError {
    ReprError::Revalidation(msg.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), ReprError> {
    if cond {
        Ok(())
    } else {
        Err(fail(msg()))
    }
}

fn default_note(verdict: Verdict) -> &'static str {
    match verdict {
        Verdict::Representable => "a representing matrix over this field was found",
        Verdict::NotRepresentableAtDegree => {
            "no representation exists over this field; other extension degrees are not covered"
        }
        Verdict::ObstructionFound => {
            "kernel vectors with a common support of rank weight k; when both summands are paving of rank k \
             the block-diagonal matrix does not represent the direct sum"
        }
        Verdict::Inconclusive => "the search did not complete",
    }
}

impl Certificate {
    pub fn new(verdict: Verdict, field: &FieldContext, targets: Vec<QMatroidFingerprint>, witness: Witness) -> Self {
        Certificate {
            verdict,
            field: field.spec_string(),
            degree: field.degree(),
            targets,
            witness,
            note: default_note(verdict).to_string(),
            tool_version: TOOL_VERSION.to_string(),
            elapsed_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    fn check_targets(&self, targets: &[&QMatroid]) -> Result<(), ReprError> {
        let given: Vec<QMatroidFingerprint> = targets.iter().map(|m| m.fingerprint()).collect();
        ensure(given == self.targets, || "target q-matroids do not match the certificate".into())
    }

    /// Re-checks the certificate from scratch against the q-matroids it was
    /// issued for (in the same order as `targets`).
    pub fn revalidate(&self, targets: &[&QMatroid], options: &SearchOptions) -> Result<(), ReprError> {
        self.check_targets(targets)?;
        let field = Arc::new(FieldContext::parse(&self.field)?);
        ensure(field.degree() == self.degree, || "degree does not match field".into())?;
        match &self.witness {
            Witness::Matrix { matrix } => {
                ensure(self.verdict == Verdict::Representable, || "matrix witness needs a positive verdict".into())?;
                let g = Matrix::parse(field, matrix)?;
                let d = is_representation(&g, targets[0])?;
                ensure(d.is_none(), || format!("matrix disagrees at {:?}", d))
            }
            Witness::Exhaustion {
                shape,
                candidate_count,
                expected_count,
                digest,
                witnesses,
                representations,
                representation_indices,
            } => {
                let m = targets[0];
                let [k, n] = *shape;
                ensure(k == m.rank() as usize && n == m.ground_dim(), || "shape does not match target".into())?;
                let predicted = gauss_binom(n as u32, k as u32, field.order()).ok_or_else(|| fail("overflow"))?;
                ensure(
                    predicted == *expected_count as u128 && *candidate_count == *expected_count,
                    || format!("candidate count {candidate_count} but [{n},{k}] = {predicted}"),
                )?;
                let expected_verdict = if representations.is_empty() {
                    Verdict::NotRepresentableAtDegree
                } else {
                    Verdict::Representable
                };
                ensure(self.verdict == expected_verdict, || "verdict does not match transcript".into())?;
                ensure(representations.len() == representation_indices.len(), || "ragged transcript".into())?;
                let space = enumerate_candidates(k, n, &field, u64::MAX)?;
                ensure(space.len() == *candidate_count, || "candidate space size differs".into())?;
                for (text, &i) in representations.iter().zip(representation_indices) {
                    let g = Matrix::parse(field.clone(), text)?;
                    ensure(i < space.len() && space.unrank(i) == g, || format!("candidate {i} is not {text}"))?;
                    ensure(is_representation(&g, m)?.is_none(), || format!("{text} does not represent"))?;
                }
                let matched: HashSet<u64> = representation_indices.iter().copied().collect();
                if let Some(w) = witnesses {
                    ensure(w.len() as u64 == *candidate_count, || "witness list length".into())?;
                    let mut h = Sha256::new();
                    w.iter().for_each(|x| h.update(x.to_le_bytes()));
                    ensure(hex::encode(h.finalize()) == *digest, || "witness digest mismatch".into())?;
                    let listed: Vec<u64> = (0..w.len() as u64).filter(|&i| w[i as usize] == MATCH).collect();
                    ensure(listed == *representation_indices, || "matches disagree with witness list".into())?;
                }
                // seeded resample of about 1% of the rejected candidates
                let rejected = candidate_count - matched.len() as u64;
                let amount = rejected.div_ceil(100).min(rejected) as usize;
                let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
                let picks = sample(&mut rng, *candidate_count as usize, amount.min(*candidate_count as usize));
                for i in picks.into_iter().map(|i| i as u64).filter(|i| !matched.contains(i)) {
                    let g = space.unrank(i);
                    match witnesses {
                        Some(w) => {
                            let v = crate::lattice::SpaceId(w[i as usize]);
                            ensure(v.index() < m.lattice().len(), || format!("bad witness for {i}"))?;
                            let ranker = MatrixRanker::new(&g, m.lattice())?;
                            ensure(ranker.rank_of(m.lattice().rows(v)) != m.rank_of(v), || {
                                format!("candidate {i} agrees with the target on its recorded witness")
                            })?;
                        }
                        None => ensure(is_representation(&g, m)?.is_some(), || {
                            format!("rejected candidate {i} represents the target")
                        })?,
                    }
                }
                Ok(())
            }
            Witness::BlockPairs {
                left,
                right,
                failures,
                success,
            } => {
                ensure(targets.len() == 3, || "block certificates need both summands and the sum".into())?;
                let (m1, m2, sum) = (targets[0], targets[1], targets[2]);
                let parse = |t: &String| Matrix::parse(field.clone(), t);
                let lefts = left.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
                let rights = right.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
                for g in &lefts {
                    ensure(is_representation(g, m1)?.is_none(), || format!("{g} does not represent the left summand"))?;
                }
                for g in &rights {
                    ensure(is_representation(g, m2)?.is_none(), || format!("{g} does not represent the right summand"))?;
                }
                let lattice = sum.lattice();
                for f in failures {
                    let (a, b) = (
                        lefts.get(f.left).ok_or_else(|| fail("bad pair index"))?,
                        rights.get(f.right).ok_or_else(|| fail("bad pair index"))?,
                    );
                    let g = a.block_diag(b)?;
                    let v = lattice.parse_space(&f.space)?;
                    let ranker = MatrixRanker::new(&g, lattice)?;
                    let r = ranker.rank_of(lattice.rows(v));
                    ensure(r == f.matrix_rank && sum.rank_of(v) == f.target_rank && r != sum.rank_of(v), || {
                        format!("pair ({}, {}) does not fail on {}", f.left, f.right, f.space)
                    })?;
                }
                match success {
                    Some([i, j]) => {
                        ensure(self.verdict == Verdict::Representable, || "success needs a positive verdict".into())?;
                        let g = lefts
                            .get(*i)
                            .zip(rights.get(*j))
                            .ok_or_else(|| fail("bad success index"))?;
                        let g = g.0.block_diag(g.1)?;
                        ensure(is_representation(&g, sum)?.is_none(), || "successful pair does not represent".into())
                    }
                    None => {
                        ensure(self.verdict == Verdict::NotRepresentableAtDegree, || "verdict mismatch".into())?;
                        ensure(failures.len() == lefts.len() * rights.len(), || "not every pair failed".into())
                    }
                }
            }
            Witness::Obstruction {
                g1,
                g2,
                k,
                v1,
                v2,
                support: text,
                weight,
            } => {
                ensure(self.verdict == Verdict::ObstructionFound, || "verdict mismatch".into())?;
                let g1 = Matrix::parse(field.clone(), g1)?;
                let g2 = Matrix::parse(field.clone(), g2)?;
                ensure(g1.apply(v1).iter().all(|&x| x == 0), || "v1 is not in the kernel of G1".into())?;
                ensure(g2.apply(v2).iter().all(|&x| x == 0), || "v2 is not in the kernel of G2".into())?;
                let (s1, s2) = (support(&field, v1), support(&field, v2));
                ensure(s1 == s2, || "supports differ".into())?;
                ensure(s1.dim() == *k && *weight == *k, || "rank weight is not k".into())?;
                ensure(s1.to_text() == *text, || "recorded support differs".into())
            }
            Witness::Inconclusive { .. } => {
                ensure(self.verdict == Verdict::Inconclusive, || "verdict mismatch".into())
            }
        }
    }
}
