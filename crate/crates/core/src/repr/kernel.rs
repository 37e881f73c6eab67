use std::sync::Arc;

use super::certificate::{Certificate, Verdict, Witness};
use super::{support, ReprError};
use crate::algebra::{AlgebraError, FieldContext, Matrix, RowPacking};
use crate::lattice::{Lattice, LatticeError, RowSpace, SpaceId};

/// Kernel vectors of two generator matrices with a common support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelWitness {
    pub v1: Vec<u32>,
    pub v2: Vec<u32>,
    pub support: RowSpace,
}

fn scale(f: &FieldContext, v: &mut [u32], s: u32) {
    v.iter_mut().for_each(|x| *x = f.mul(*x, s));
}

/// Projective points of the kernel, each scaled so that its first nonzero
/// entry is 1, sorted by Hamming weight (largest first) and then by entries.
fn kernel_points(g: &Matrix, cap: u64) -> Result<Vec<Vec<u32>>, ReprError> {
    let f = g.field();
    let basis = g.kernel();
    let r = basis.len() as u32;
    let q = f.order() as u128;
    let count = (q.pow(r) - 1) / (q - 1);
    if count > cap as u128 {
        return Err(ReprError::CapExceeded {
            what: "kernel points",
            needed: count,
            cap,
        });
    }
    let mut points = Vec::with_capacity(count as usize);
    // coefficient vectors whose first nonzero entry is 1, one per point
    for lead in 0..basis.len() {
        let tail = basis.len() - lead - 1;
        for code in 0..(q as u64).pow(tail as u32) {
            let mut v = basis[lead].clone();
            let mut rest = code;
            for b in &basis[lead + 1..] {
                let c = (rest % q as u64) as u32;
                rest /= q as u64;
                if c != 0 {
                    for (x, &y) in v.iter_mut().zip(b) {
                        *x = f.add(*x, f.mul(c, y));
                    }
                }
            }
            let first = *v.iter().find(|&&x| x != 0).expect("kernel basis is independent");
            scale(f, &mut v, f.inv(first).expect("nonzero"));
            points.push(v);
        }
    }
    let weight = |v: &Vec<u32>| v.iter().filter(|&&x| x != 0).count();
    points.sort_by(|a, b| weight(b).cmp(&weight(a)).then_with(|| a.cmp(b)));
    debug_assert_eq!(points.len() as u128, count);
    Ok(points)
}

/// Looks for v1 in ker G1 and v2 in ker G2 with rank weight k and equal
/// supports. Scans the normalized points of ker G1 in order (heaviest
/// first) and pairs each with the first matching point of ker G2.
///
/// The certificate is `ObstructionFound` with a witness, `Inconclusive`
/// otherwise (exhausted without a pair, or over the cap).
pub fn kernel_support_witness(
    g1: &Matrix,
    g2: &Matrix,
    k: usize,
    cap: u64,
) -> Result<(Option<KernelWitness>, Certificate), ReprError> {
    let field = g1.field().clone();
    if field.id() != g2.field().id() {
        return Err(AlgebraError::FieldMismatch {
            left: field.id(),
            right: g2.field().id(),
        }
        .into());
    }
    let inconclusive = |reason: String| {
        Certificate::new(Verdict::Inconclusive, &field, Vec::new(), Witness::Inconclusive { reason })
    };
    let (p1, p2) = match (kernel_points(g1, cap), kernel_points(g2, cap)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e @ ReprError::CapExceeded { .. }), _) | (_, Err(e @ ReprError::CapExceeded { .. })) => {
            return Ok((None, inconclusive(e.to_string())))
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let with_support = |pts: Vec<Vec<u32>>| -> Vec<(Vec<u32>, RowSpace)> {
        pts.into_iter()
            .map(|v| {
                let s = support(&field, &v);
                (v, s)
            })
            .filter(|(_, s)| s.dim() == k)
            .collect()
    };
    let (s1, s2) = (with_support(p1), with_support(p2));
    for (v1, sup) in &s1 {
        if let Some((v2, _)) = s2.iter().find(|(_, s)| s == sup) {
            let w = KernelWitness {
                v1: v1.clone(),
                v2: v2.clone(),
                support: sup.clone(),
            };
            let cert = Certificate::new(
                Verdict::ObstructionFound,
                &field,
                Vec::new(),
                Witness::Obstruction {
                    g1: g1.to_string(),
                    g2: g2.to_string(),
                    k,
                    v1: w.v1.clone(),
                    v2: w.v2.clone(),
                    support: sup.to_text(),
                    weight: k,
                },
            );
            return Ok((Some(w), cert));
        }
    }
    Ok((None, inconclusive(format!("no kernel pair of rank weight {k} with equal supports"))))
}

/// The space rs(Y1 | Y2) of `total` = F^{n1} (+) F^{n2}, where column j of
/// Y_i holds the coordinates of the j-th entry of v_i in the RREF basis of
/// the common support. It has dimension k and is dependent for diag(G1, G2).
pub fn obstruction_space(
    witness: &KernelWitness,
    field: &Arc<FieldContext>,
    total: &Lattice,
) -> Result<SpaceId, ReprError> {
    let (n1, n2) = (witness.v1.len(), witness.v2.len());
    if n1 + n2 != total.n() || total.q() != field.characteristic() {
        return Err(LatticeError::Mismatch(format!("witness of length {}+{} for F_{}^{}", n1, n2, total.q(), total.n())).into());
    }
    let sup = &witness.support;
    let packing = RowPacking::new(field.characteristic(), field.degree() as usize)?;
    let pivots = packing.pivots_of(&sup.rows);
    let entries: Vec<u32> = witness.v1.iter().chain(&witness.v2).copied().collect();
    let mut rows = vec![vec![0u32; n1 + n2]; sup.dim()];
    for (j, &x) in entries.iter().enumerate() {
        let c = field.coords(x);
        for (l, &pc) in pivots.iter().enumerate() {
            rows[l][j] = c[pc];
        }
        // the entry must be the combination just read off
        let mut back = 0u64;
        for (l, &b) in sup.rows.iter().enumerate() {
            back = packing.add_scaled(back, b, c[pivots[l]]);
        }
        if back != packing.pack(&c) {
            return Err(ReprError::Revalidation(format!("entry {x} lies outside the support")));
        }
    }
    let packed = rows.iter().map(|r| total.packing().pack(r)).collect();
    Ok(total.canonicalize_rows(packed))
}
