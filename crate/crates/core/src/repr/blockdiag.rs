use std::sync::Arc;

use rayon::prelude::*;

use super::candidates::{search_representations, SearchOutcome};
use super::certificate::{BlockFailure, Certificate, Verdict, Witness};
use super::{is_representation, ReprError, SearchOptions};
use crate::algebra::{FieldContext, Matrix};
use crate::directsum::{direct_sum, SplitContext};
use crate::qmatroid::QMatroid;

#[derive(Debug, Clone)]
pub struct BlockDiagOutcome {
    pub certificate: Certificate,
    pub representation: Option<Matrix>,
    pub left: SearchOutcome,
    pub right: SearchOutcome,
    pub pairs_tested: usize,
}

/// Decides whether M1 (+) M2 is representable over `field` by testing
/// diag(A, B) for every pair of representations A of M1 and B of M2.
///
/// Pairs are visited left-major; the first success wins.
pub fn block_diag_test(
    m1: &QMatroid,
    m2: &QMatroid,
    ctx: &SplitContext,
    field: &Arc<FieldContext>,
    options: &SearchOptions,
) -> Result<BlockDiagOutcome, ReprError> {
    let sum = direct_sum(m1, m2, ctx)?.into_matroid();
    block_diag_test_against(m1, m2, &sum, field, options)
}

/// As [`block_diag_test`] with the direct sum already computed.
pub fn block_diag_test_against(
    m1: &QMatroid,
    m2: &QMatroid,
    sum: &QMatroid,
    field: &Arc<FieldContext>,
    options: &SearchOptions,
) -> Result<BlockDiagOutcome, ReprError> {
    let left = search_representations(m1, field, options)?;
    let right = search_representations(m2, field, options)?;
    let targets = vec![m1.fingerprint(), m2.fingerprint(), sum.fingerprint()];
    let texts = |s: &SearchOutcome| s.representations.iter().map(|g| g.to_string()).collect::<Vec<_>>();

    if [&left, &right].iter().any(|s| s.certificate.verdict == Verdict::Inconclusive) {
        let certificate = Certificate::new(
            Verdict::Inconclusive,
            field,
            targets,
            Witness::Inconclusive {
                reason: "a summand search did not complete".into(),
            },
        );
        return Ok(BlockDiagOutcome {
            certificate,
            representation: None,
            left,
            right,
            pairs_tested: 0,
        });
    }

    let pairs: Vec<(usize, usize)> = (0..left.representations.len())
        .flat_map(|i| (0..right.representations.len()).map(move |j| (i, j)))
        .collect();
    let lattice = sum.lattice();
    let results = pairs
        .par_iter()
        .map(|&(i, j)| {
            let g = left.representations[i].block_diag(&right.representations[j])?;
            Ok(is_representation(&g, sum)?.map(|d| BlockFailure {
                left: i,
                right: j,
                space: lattice.space_text(d.space),
                dim: d.dim,
                matrix_rank: d.left,
                target_rank: d.right,
            }))
        })
        .collect::<Result<Vec<_>, ReprError>>()?;

    let first_success = results.iter().position(|r| r.is_none());
    let tested = first_success.map_or(results.len(), |s| s + 1);
    let failures: Vec<BlockFailure> = results.into_iter().take(tested).flatten().collect();
    let success = first_success.map(|s| pairs[s]);
    let representation = success
        .map(|(i, j)| left.representations[i].block_diag(&right.representations[j]))
        .transpose()?;
    let verdict = if success.is_some() {
        Verdict::Representable
    } else {
        Verdict::NotRepresentableAtDegree
    };
    let mut certificate = Certificate::new(
        verdict,
        field,
        targets,
        Witness::BlockPairs {
            left: texts(&left),
            right: texts(&right),
            failures,
            success: success.map(|(i, j)| [i, j]),
        },
    );
    if pairs.is_empty() {
        certificate.note = "a summand has no representation over this field, so neither has the sum".into();
    }
    Ok(BlockDiagOutcome {
        certificate,
        representation,
        left,
        right,
        pairs_tested: tested,
    })
}
