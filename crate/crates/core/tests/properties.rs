mod common;

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use common::gf;
use qmatroid::algebra::{FieldContext, Matrix};
use qmatroid::directsum::SplitContext;
use qmatroid::lattice::{Lattice, Side, SpaceId};
use qmatroid::qmatroid::QMatroid;

fn fields() -> &'static [Arc<FieldContext>] {
    static F: OnceLock<Vec<Arc<FieldContext>>> = OnceLock::new();
    F.get_or_init(|| [(2, 1), (3, 1), (5, 1), (2, 2), (2, 3), (3, 2), (2, 4), (7, 1)].iter().map(|&(p, d)| gf(p, d)).collect())
}

fn field_and_elems(k: usize) -> impl Strategy<Value = (Arc<FieldContext>, Vec<u32>)> {
    (0..fields().len()).prop_flat_map(move |i| {
        let f = fields()[i].clone();
        let order = f.order() as u32;
        (Just(f), proptest::collection::vec(0..order, k))
    })
}

fn matrix_over(f: Arc<FieldContext>, max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix> {
    let order = f.order() as u32;
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(r, c)| {
        let f = f.clone();
        proptest::collection::vec(0..order, r * c).prop_map(move |data| Matrix::from_vec(f.clone(), r, c, data).unwrap())
    })
}

fn any_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix> {
    (0..fields().len()).prop_flat_map(move |i| matrix_over(fields()[i].clone(), max_rows, max_cols))
}

fn lattices() -> &'static [Arc<Lattice>] {
    static L: OnceLock<Vec<Arc<Lattice>>> = OnceLock::new();
    L.get_or_init(|| [(2, 3), (2, 4), (3, 3), (2, 5), (5, 2)].iter().map(|&(q, n)| Lattice::build(q, n).unwrap()).collect())
}

fn lattice_and_spaces(k: usize) -> impl Strategy<Value = (Arc<Lattice>, Vec<SpaceId>)> {
    (0..lattices().len()).prop_flat_map(move |i| {
        let l = lattices()[i].clone();
        let len = l.len() as u32;
        (Just(l), proptest::collection::vec((0..len).prop_map(SpaceId), k))
    })
}

fn gf4_matroid() -> impl Strategy<Value = QMatroid> {
    static L: OnceLock<(Arc<Lattice>, Arc<Lattice>)> = OnceLock::new();
    let (l3, l4) = L.get_or_init(|| (Lattice::build(2, 3).unwrap(), Lattice::build(2, 4).unwrap())).clone();
    (prop::bool::ANY, 1..=3usize).prop_flat_map(move |(wide, rows)| {
        let l = if wide { l4.clone() } else { l3.clone() };
        let n = l.n();
        proptest::collection::vec(0..4u32, rows * n).prop_map(move |data| {
            let g = Matrix::from_vec(gf(2, 2), rows, n, data).unwrap();
            QMatroid::from_matrix(&g, l.clone()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms((f, e) in field_and_elems(3)) {
        let (a, b, c) = (e[0], e[1], e[2]);
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            prop_assert_eq!(f.pow(a, f.order() - 1), 1);
        } else {
            prop_assert!(f.inv(a).is_none());
        }
    }

    #[test]
    fn frobenius_is_a_field_automorphism((f, e) in field_and_elems(2)) {
        let (a, b) = (e[0], e[1]);
        prop_assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
        prop_assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
        let mut x = a;
        for _ in 0..f.degree() {
            x = f.frobenius(x);
        }
        prop_assert_eq!(x, a);
        prop_assert_eq!(f.in_prime_field(a), f.frobenius(a) == a);
    }

    #[test]
    fn rref_is_idempotent(m in any_matrix(4, 5)) {
        let (r, pivots) = m.rref();
        prop_assert!(r.is_rref());
        prop_assert_eq!(r.rref().0, r.clone());
        prop_assert_eq!(pivots.len(), m.rank());
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn kernel_vectors_are_killed(m in any_matrix(4, 5)) {
        let k = m.kernel();
        prop_assert_eq!(k.len(), m.cols() - m.rank());
        for v in &k {
            let col = Matrix::from_vec(m.field().clone(), v.len(), 1, v.clone()).unwrap();
            prop_assert!(m.mul(&col).unwrap().is_zero());
        }
    }

    #[test]
    fn canonical_form_ignores_row_mixing(
        (r, data, mix) in (1..=3usize).prop_flat_map(|r| (Just(r), proptest::collection::vec(0..3u32, r * 4), proptest::collection::vec(0..3u32, r * r)))
    ) {
        static L: OnceLock<Arc<Lattice>> = OnceLock::new();
        let l = L.get_or_init(|| Lattice::build(3, 4).unwrap());
        let f = gf(3, 1);
        let m = Matrix::from_vec(f.clone(), r, 4, data).unwrap();
        let u = Matrix::from_vec(f, r, r, mix).unwrap();
        prop_assume!(u.rank() == r);
        prop_assert_eq!(l.canonicalize(&u.mul(&m).unwrap()).unwrap(), l.canonicalize(&m).unwrap());
    }

    #[test]
    fn modularity((l, s) in lattice_and_spaces(2)) {
        let (v, w) = (s[0], s[1]);
        let sum = l.sum(v, w);
        let meet = l.intersect(v, w);
        prop_assert_eq!(l.dim(sum) + l.dim(meet), l.dim(v) + l.dim(w));
        prop_assert!(l.contains(sum, v) && l.contains(sum, w));
        prop_assert!(l.contains(v, meet) && l.contains(w, meet));
    }

    #[test]
    fn hyperplane_counts((l, s) in lattice_and_spaces(1)) {
        let v = s[0];
        let d = l.dim(v) as u32;
        let mut seen = Vec::new();
        l.for_each_hyperplane(v, |h| seen.push(h));
        let q = l.q() as usize;
        let expected = if d == 0 { 0 } else { (q.pow(d) - 1) / (q - 1) };
        seen.sort();
        seen.dedup();
        prop_assert_eq!(seen.len(), expected);
        prop_assert!(seen.iter().all(|&h| l.dim(h) + 1 == d as usize && l.contains(v, h)));
        prop_assert_eq!(l.covers_below(v).len(), expected);
    }

    #[test]
    fn perp_is_an_involution((l, s) in lattice_and_spaces(2)) {
        let (v, w) = (s[0], s[1]);
        prop_assert_eq!(l.perp(l.perp(v)), v);
        prop_assert_eq!(l.dim(l.perp(v)), l.n() - l.dim(v));
        prop_assert_eq!(l.contains(w, v), l.contains(l.perp(v), l.perp(w)));
    }

    #[test]
    fn project_undoes_embed(i in 0..67u32, j in 0..16u32) {
        static CTX: OnceLock<SplitContext> = OnceLock::new();
        let ctx = CTX.get_or_init(|| SplitContext::new(2, 4, 3).unwrap());
        let (v1, v2) = (SpaceId(i), SpaceId(j));
        let v = ctx.embed(v1, v2);
        prop_assert_eq!(ctx.project(v, Side::Left), v1);
        prop_assert_eq!(ctx.project(v, Side::Right), v2);
        prop_assert_eq!(ctx.total().dim(v), ctx.left().dim(v1) + ctx.right().dim(v2));
        prop_assert_eq!(ctx.embed_side(v1, Side::Left), ctx.embed(v1, ctx.right().zero()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circuits_are_minimal_dependent(m in gf4_matroid()) {
        let l = m.lattice();
        for c in m.circuits() {
            prop_assert!(!m.is_independent(c));
            l.for_each_hyperplane(c, |h| assert!(m.is_independent(h)));
        }
        // every dependent space contains a circuit
        let circuits = m.circuits();
        for v in m.dependent_spaces() {
            prop_assert!(circuits.iter().any(|&c| l.contains(v, c)));
        }
    }

    #[test]
    fn unit_rank_steps(m in gf4_matroid()) {
        let l = m.lattice();
        for v in l.ids() {
            for w in l.covers_above(v) {
                let step = m.rank_of(w) - m.rank_of(v);
                prop_assert!(step <= 1);
            }
        }
    }

    #[test]
    fn open_spaces_are_closed_under_sums(m in gf4_matroid()) {
        let l = m.lattice();
        let open = m.open_spaces();
        prop_assert!(open.contains(&l.zero()));
        for &a in &open {
            for &b in &open {
                prop_assert!(open.contains(&l.sum(a, b)));
            }
        }
        let flats = m.flats();
        for &a in &flats {
            for &b in &flats {
                prop_assert!(flats.contains(&l.intersect(a, b)));
            }
        }
    }

    #[test]
    fn paving_round_trip(m in gf4_matroid()) {
        let k = m.rank() as usize;
        prop_assume!(k >= 1 && k < m.ground_dim() && m.is_paving());
        let l = m.lattice();
        let family: Vec<SpaceId> = l.ids_of_dim(k).filter(|&v| !m.is_independent(v)).collect();
        // the constructor only takes families meeting in dimension <= k - 2
        if let Ok(rebuilt) = QMatroid::paving_from_family(&family, k, l.clone()) {
            prop_assert!(rebuilt.equals(&m).unwrap());
        }
    }

    #[test]
    fn rank_table_io_round_trip(m in gf4_matroid()) {
        let text = qmatroid::io::rank_table_string(&m);
        let back = qmatroid::io::read_rank_table(m.lattice().clone(), text.as_bytes()).unwrap();
        prop_assert!(back.equals(&m).unwrap());
    }
}
