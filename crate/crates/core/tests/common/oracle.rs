//! Reference implementations that share no code paths with the production
//! direct sum: subspaces are enumerated explicitly and projections are
//! taken digit by digit.

use qmatroid::lattice::{Lattice, SpaceId};
use qmatroid::QMatroid;

/// Every subspace of `v`, as ids of `l`, by pushing each subspace of
/// F^{dim v} through the basis of v.
pub fn subspaces_of(l: &Lattice, small: &Lattice, v: SpaceId) -> Vec<SpaceId> {
    let basis = l.rows(v);
    let d = basis.len();
    assert_eq!(small.n(), d);
    let pk = l.packing();
    let spk = small.packing();
    small
        .ids()
        .map(|x| {
            let rows: Vec<u64> = small
                .rows(x)
                .iter()
                .map(|&r| {
                    let coeffs = spk.unpack(r);
                    let mut acc = vec![0u32; l.n()];
                    for (c, &b) in coeffs.iter().zip(basis) {
                        for (a, digit) in acc.iter_mut().zip(pk.unpack(b)) {
                            *a = (*a + c * digit) % l.q();
                        }
                    }
                    pk.pack(&acc)
                })
                .collect();
            l.canonicalize_rows(rows)
        })
        .collect()
}

/// The columns `range` of every basis row, as a space of `target`.
pub fn project(l: &Lattice, v: SpaceId, range: std::ops::Range<usize>, target: &Lattice) -> SpaceId {
    let rows = l
        .rows(v)
        .iter()
        .map(|&r| target.packing().pack(&l.packing().unpack(r)[range.clone()]))
        .collect();
    target.canonicalize_rows(rows)
}

/// rank(V) = dim V + min(0, min over all X <= V of ρ1(π1 X) + ρ2(π2 X) - dim X).
pub fn direct_sum_rank(m1: &QMatroid, m2: &QMatroid, total: &Lattice, small: &[std::sync::Arc<Lattice>], v: SpaceId) -> u32 {
    let n1 = m1.ground_dim();
    let n = total.n();
    let d = total.dim(v);
    let mut best = 0i64;
    for x in subspaces_of(total, &small[d], v) {
        let r1 = m1.rank_of(project(total, x, 0..n1, m1.lattice())) as i64;
        let r2 = m2.rank_of(project(total, x, n1..n, m2.lattice())) as i64;
        best = best.min(r1 + r2 - total.dim(x) as i64);
    }
    (d as i64 + best) as u32
}

/// Lattices F_q^0 .. F_q^n for use with [`direct_sum_rank`].
pub fn small_lattices(q: u32, n: usize) -> Vec<std::sync::Arc<Lattice>> {
    (0..=n).map(|d| Lattice::build(q, d).unwrap()).collect()
}

/// Gaussian binomial by the q-Pascal recursion.
pub fn gauss_pascal(n: u32, k: u32, q: u128) -> u128 {
    if k == 0 || k == n {
        return 1;
    }
    if k > n {
        return 0;
    }
    gauss_pascal(n - 1, k - 1, q) + q.pow(k) * gauss_pascal(n - 1, k, q)
}
