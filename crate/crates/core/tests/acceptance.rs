//! Acceptance gate: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::oracle;
use common::*;
use qmatroid::algebra::{FieldContext, Matrix};
use qmatroid::directsum::{direct_sum, DirectSum, SplitContext};
use qmatroid::lattice::{Lattice, Side, SpaceId};
use qmatroid::qmatroid::AxiomOptions;
use qmatroid::repr::{
    block_diag_test, block_diag_test_against, enumerate_candidates, is_representation, kernel_support_witness,
    obstruction_space, search_representations, support_basis, SearchOptions, Verdict,
};
use qmatroid::QMatroid;

/// M1 (+) M1 on F_2^8, shared by several criteria.
struct Big {
    ctx: SplitContext,
    m1: QMatroid,
    m2: QMatroid,
    sum: DirectSum,
}

fn big() -> &'static Big {
    static BIG: OnceLock<Big> = OnceLock::new();
    BIG.get_or_init(|| {
        let ctx = SplitContext::new(2, 4, 4).unwrap();
        let m1 = QMatroid::from_matrix(&g1(), ctx.left().clone()).unwrap();
        let m2 = QMatroid::from_matrix(&g1(), ctx.right().clone()).unwrap();
        let sum = direct_sum(&m1, &m2, &ctx).unwrap();
        Big { ctx, m1, m2, sum }
    })
}

fn exhaustive_axioms(m: &QMatroid, what: &str) {
    let opts = AxiomOptions {
        exhaustive_limit: usize::MAX,
        ..AxiomOptions::default()
    };
    let v = m.check_axioms(&opts);
    assert!(v.is_empty(), "{what}: {}", v[0]);
}

fn u12_sum() -> (SplitContext, QMatroid, QMatroid, DirectSum) {
    let ctx = SplitContext::new(2, 2, 2).unwrap();
    let a = QMatroid::uniform(1, ctx.left().clone()).unwrap();
    let b = QMatroid::uniform(1, ctx.right().clone()).unwrap();
    let s = direct_sum(&a, &b, &ctx).unwrap();
    (ctx, a, b, s)
}

fn free_sum() -> (SplitContext, QMatroid, QMatroid, DirectSum) {
    let ctx = SplitContext::new(2, 1, 4).unwrap();
    let a = QMatroid::uniform(1, ctx.left().clone()).unwrap();
    let b = QMatroid::from_matrix(&g1(), ctx.right().clone()).unwrap();
    let s = direct_sum(&a, &b, &ctx).unwrap();
    (ctx, a, b, s)
}

fn criterion_1() {
    let l = Lattice::build(2, 4).unwrap();
    assert_eq!(l.len(), 67);
    let m = QMatroid::from_matrix(&g1(), l.clone()).unwrap();
    let planes = paving_planes(&l);
    for v in l.ids() {
        let expected = if planes.contains(&v) { 1 } else { l.dim(v).min(2) as u32 };
        assert_eq!(m.rank_of(v), expected, "rank of {}", l.space_text(v));
    }
    assert!(m.is_paving());
    assert_eq!(m.rank(), 2);
    let family = QMatroid::paving_from_family(&planes, 2, l).unwrap();
    assert!(m.equals(&family).unwrap());
}

fn criterion_2() {
    let l = Lattice::build(2, 4).unwrap();
    exhaustive_axioms(&QMatroid::from_matrix(&g1(), l.clone()).unwrap(), "M_G1");
    exhaustive_axioms(&QMatroid::from_matrix(&g1_hat(), l).unwrap(), "M_G1hat");
    for n in 0..=4 {
        let l = Lattice::build(2, n).unwrap();
        for k in 0..=n {
            exhaustive_axioms(&QMatroid::uniform(k, l.clone()).unwrap(), &format!("U_{k},{n}"));
        }
    }
    // the direct sums of criteria 3, 5 and 6; the one on F_2^8 is sampled in 4
    exhaustive_axioms(u12_sum().3.matroid(), "U12+U12");
    exhaustive_axioms(free_sum().3.matroid(), "U11+M_G1");
}

fn criterion_3() {
    let (ctx, a, b, sum) = u12_sum();
    let t = ctx.total();
    let m = sum.matroid();
    let e12 = t.parse_space("1,0,0,0;0,1,0,0").unwrap();
    let e34 = t.parse_space("0,0,1,0;0,0,0,1").unwrap();
    for v in t.ids() {
        let expected = if v == e12 || v == e34 { 1 } else { t.dim(v).min(2) as u32 };
        assert_eq!(m.rank_of(v), expected, "rank of {}", t.space_text(v));
    }
    let x: BTreeSet<SpaceId> = sum.x_set().into_iter().collect();
    let want: BTreeSet<SpaceId> = t.ids().filter(|&v| t.dim(v) >= 3 || v == e12 || v == e34).collect();
    assert_eq!(x, want);
    let mut nonzero_pairs = 0;
    for v1 in ctx.left().ids() {
        for v2 in ctx.right().ids() {
            let v = ctx.embed(v1, v2);
            assert_eq!(m.rank_of(v), a.rank_of(v1) + b.rank_of(v2));
            if v1 != ctx.left().zero() && v2 != ctx.right().zero() {
                nonzero_pairs += 1;
            }
        }
    }
    assert_eq!(nonzero_pairs, 16);
    let small = oracle::small_lattices(2, 4);
    for v in t.ids() {
        assert_eq!(m.rank_of(v), oracle::direct_sum_rank(&a, &b, t, &small, v));
    }
}

fn criterion_4() {
    let opts = SearchOptions::default();
    let l = Lattice::build(2, 4).unwrap();
    let m1 = QMatroid::from_matrix(&g1(), l).unwrap();
    let expected_counts = [35u64, 357, 4745, 70161];
    for (m, &count) in (1..=4).zip(&expected_counts) {
        let f = gf(2, m);
        assert_eq!(enumerate_candidates(2, 4, &f, u64::MAX).unwrap().len(), count);
        let out = search_representations(&m1, &f, &opts).unwrap();
        out.certificate.revalidate(&[&m1], &opts).unwrap();
        let found: BTreeSet<String> = out.representations.iter().map(|g| g.to_string()).collect();
        let want: BTreeSet<String> = match m {
            2 => [G1, G1_HAT].iter().map(|s| s.to_string()).collect(),
            4 => {
                let w = cube_roots_of_unity(&f)[0];
                [g1(), g1_hat()].iter().map(|g| embed_gf4(g, &f, w).to_string()).collect()
            }
            _ => BTreeSet::new(),
        };
        assert_eq!(found, want, "representations at m = {m}");
        let verdict = if want.is_empty() {
            Verdict::NotRepresentableAtDegree
        } else {
            Verdict::Representable
        };
        assert_eq!(out.certificate.verdict, verdict);
    }

    let b = big();
    let total = b.ctx.total();
    assert_eq!(total.len(), 417_199);
    let sampled = b.sum.matroid().check_axioms(&AxiomOptions::default());
    assert!(sampled.is_empty(), "sampled axioms: {}", sampled[0]);
    for m in [2, 4] {
        let f = gf(2, m);
        let out = block_diag_test_against(&b.m1, &b.m2, b.sum.matroid(), &f, &opts).unwrap();
        assert_eq!(out.certificate.verdict, Verdict::NotRepresentableAtDegree, "m = {m}");
        assert_eq!(out.pairs_tested, 4);
        out.certificate
            .revalidate(&[&b.m1, &b.m2, b.sum.matroid()], &opts)
            .unwrap();
    }

    let f4 = gf4();
    let (w, cert) = kernel_support_witness(&g1(), &g1_hat(), 2, 1_000_000).unwrap();
    let w = w.expect("kernel-support witness");
    assert_eq!(w.v1, vec![1, 1, 2, 1]);
    assert_eq!(w.v2, vec![1, 1, 3, 1]);
    assert_eq!(support_basis(&f4, &w.support), vec![1, 2]);
    assert_eq!(cert.verdict, Verdict::ObstructionFound);
    cert.revalidate(&[], &opts).unwrap();

    // every diagonal pair of {G1, Ĝ1} has an obstruction and fails, and the
    // constructed space is dependent for the matrix but not in the sum
    for a in [g1(), g1_hat()] {
        for c in [g1(), g1_hat()] {
            let (w, _) = kernel_support_witness(&a, &c, 2, 1_000_000).unwrap();
            let w = w.expect("obstruction for every pair");
            let g = a.block_diag(&c).unwrap();
            assert!(is_representation(&g, b.sum.matroid()).unwrap().is_some());
            let space = obstruction_space(&w, &f4, total).unwrap();
            assert_eq!(total.dim(space), 2);
            let y = total.basis_matrix(space, &f4);
            assert!(g.mul(&y.transpose()).unwrap().rank() < 2);
            assert_eq!(b.sum.matroid().rank_of(space), 2);
        }
    }
}

fn u12_case_spaces(f: &Arc<FieldContext>, l: &Lattice, beta: u32, gamma: u32) -> Vec<SpaceId> {
    // coordinates over F_2 in the basis 1, β, β²
    let basis = [1, beta, f.mul(beta, beta)];
    let coords = |x: u32| -> [u32; 3] {
        (0..8u32)
            .map(|c| [c & 1, c >> 1 & 1, c >> 2 & 1])
            .find(|c| {
                let v = (0..3).fold(0, |acc, i| if c[i] == 1 { f.add(acc, basis[i]) } else { acc });
                v == x
            })
            .expect("1, β, β² span GF(8)")
    };
    let [c0, c1, c2] = coords(gamma);
    let [b0, b1, b2] = coords(f.mul(basis[2], beta));
    let s = (c1 + c2 * b2) % 2;
    let text = if c2 == 0 {
        format!("{c0},{c1},0,1;1,0,1,0")
    } else if s == 0 {
        format!("{},{},0,1;0,1,1,0", c2 * b0 % 2, (c0 + c2 * b1) % 2)
    } else {
        let lhs = f.add(f.mul(s, gamma), f.mul(c2, f.mul(beta, gamma)));
        let [f0, f1, f2] = coords(lhs);
        assert_eq!(f2, 0);
        format!("{f0},{f1},0,1;{s},{c2},1,0")
    };
    vec![l.parse_space(&text).unwrap()]
}

fn criterion_5() {
    let opts = SearchOptions::default();
    let (ctx, a, b, sum) = u12_sum();
    for (m, pairs) in [(2u32, 4usize), (3, 36)] {
        let f = gf(2, m);
        let out = block_diag_test(&a, &b, &ctx, &f, &opts).unwrap();
        assert_eq!(out.certificate.verdict, Verdict::NotRepresentableAtDegree, "m = {m}");
        assert_eq!(out.pairs_tested, pairs);
        out.certificate.revalidate(&[&a, &b, sum.matroid()], &opts).unwrap();
    }
    let f16 = gf(2, 4);
    let out = block_diag_test(&a, &b, &ctx, &f16, &opts).unwrap();
    assert_eq!(out.certificate.verdict, Verdict::Representable);
    let z = 2;
    assert_eq!(f16.pow(z, 4), f16.add(z, 1));
    assert!(f16.element_degree(z) >= 4);
    let want = Matrix::parse(f16.clone(), &format!("1,{z},0,0;0,0,1,{}", f16.mul(z, z))).unwrap();
    assert_eq!(out.representation.unwrap(), want);
    out.certificate.revalidate(&[&a, &b, sum.matroid()], &opts).unwrap();

    // the three cases at m = 3 each produce a plane of rank 2 in the sum
    // that the diagonal matrix makes dependent
    let f8 = gf(2, 3);
    let t = ctx.total();
    let outside: Vec<u32> = f8.elements().filter(|&x| x > 1).collect();
    let mut cases = BTreeSet::new();
    for &beta in &outside {
        for &gamma in &outside {
            let g = Matrix::parse(f8.clone(), &format!("1,{beta},0,0;0,0,1,{gamma}")).unwrap();
            for v in u12_case_spaces(&f8, t, beta, gamma) {
                assert_eq!(t.dim(v), 2);
                let y = t.basis_matrix(v, &f8);
                assert_eq!(g.mul(&y.transpose()).unwrap().rank(), 1, "β={beta} γ={gamma}");
                assert_eq!(sum.matroid().rank_of(v), 2);
                let d = is_representation(&g, sum.matroid()).unwrap().expect("disagreement");
                assert!(d.dim <= 2);
            }
            cases.insert(case_of(&f8, beta, gamma));
        }
    }
    assert_eq!(cases.len(), 3, "all three cases occur");
}

fn case_of(f: &FieldContext, beta: u32, gamma: u32) -> u8 {
    let b2 = f.mul(beta, beta);
    let find = |x: u32| (0..8u32).find(|c| {
        let parts = [1, beta, b2];
        (0..3).fold(0, |acc, i| if c >> i & 1 == 1 { f.add(acc, parts[i]) } else { acc }) == x
    }).unwrap();
    let c = find(gamma);
    let b = find(f.mul(b2, beta));
    let (c1, c2, bb2) = (c >> 1 & 1, c >> 2 & 1, b >> 2 & 1);
    match (c2, (c1 + c2 * bb2) % 2) {
        (0, _) => 1,
        (_, 0) => 2,
        _ => 3,
    }
}

fn criterion_6() {
    let (ctx, _, _, sum) = free_sum();
    assert_eq!(ctx.total().len(), 374);
    let f4 = gf4();
    let g = Matrix::identity(f4, 1).block_diag(&g1()).unwrap();
    let m = QMatroid::from_matrix(&g, ctx.total().clone()).unwrap();
    assert!(m.equals(sum.matroid()).unwrap());
}

fn criterion_7() {
    let b = big();
    let total = b.ctx.total();
    let circuits = b.sum.circuits();
    assert!(circuits.iter().all(|&c| total.dim(c) >= 2));
    let planes: BTreeSet<SpaceId> = circuits.iter().copied().filter(|&c| total.dim(c) == 2).collect();
    let mut want = BTreeSet::new();
    for c in b.m1.circuits() {
        assert_eq!(b.ctx.left().dim(c), 2);
        want.insert(b.ctx.embed_side(c, Side::Left));
    }
    for c in b.m2.circuits() {
        want.insert(b.ctx.embed_side(c, Side::Right));
    }
    assert_eq!(want.len(), 10);
    assert_eq!(planes, want);
    let from_matroid: BTreeSet<SpaceId> = b.sum.matroid().circuits().into_iter().collect();
    assert_eq!(from_matroid, circuits.into_iter().collect());
}

fn cyclic_flats_identity(ctx: &SplitContext, m1: &QMatroid, m2: &QMatroid, sum: &QMatroid) {
    let mut want = BTreeSet::new();
    for z1 in m1.cyclic_flats() {
        for z2 in m2.cyclic_flats() {
            want.insert(ctx.embed(z1, z2));
        }
    }
    let got: BTreeSet<SpaceId> = sum.cyclic_flats().into_iter().collect();
    assert_eq!(got, want);
}

fn criterion_8() {
    let (ctx, a, b, sum) = u12_sum();
    cyclic_flats_identity(&ctx, &a, &b, sum.matroid());
    let big = big();
    cyclic_flats_identity(&big.ctx, &big.m1, &big.m2, big.sum.matroid());
}

fn random_matrix(rng: &mut ChaCha8Rng, f: &Arc<FieldContext>, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(0..f.order() as u32)).collect();
    Matrix::from_vec(f.clone(), rows, cols, data).unwrap()
}

fn random_invertible(rng: &mut ChaCha8Rng, f: &Arc<FieldContext>, n: usize) -> Matrix {
    loop {
        let u = random_matrix(rng, f, n, n);
        if u.rank() == n {
            return u;
        }
    }
}

fn criterion_9() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    for (d, n) in [(2u32, 4usize), (3, 3)] {
        let f = gf(2, d);
        let l = Lattice::build(2, n).unwrap();
        for _ in 0..100 {
            let g = random_matrix(&mut rng, &f, 2, n);
            let m = QMatroid::from_matrix(&g, l.clone()).unwrap();
            exhaustive_axioms(&m, &format!("random {g}"));
            let u = random_invertible(&mut rng, &f, 2);
            let ug = QMatroid::from_matrix(&u.mul(&g).unwrap(), l.clone()).unwrap();
            assert!(m.equals(&ug).unwrap(), "M_G != M_UG for G = {g}");
        }
    }
    let f4 = gf4();
    let small = oracle::small_lattices(2, 6);
    let mut sums = 0;
    for n1 in 1..=3usize {
        for n2 in 1..=(6 - n1).min(3) {
            let ctx = SplitContext::new(2, n1, n2).unwrap();
            for _ in 0..3 {
                let k1 = rng.gen_range(1..=n1);
                let k2 = rng.gen_range(1..=n2);
                let a = QMatroid::from_matrix(&random_matrix(&mut rng, &f4, k1, n1), ctx.left().clone()).unwrap();
                let b = QMatroid::from_matrix(&random_matrix(&mut rng, &f4, k2, n2), ctx.right().clone()).unwrap();
                let s = direct_sum(&a, &b, &ctx).unwrap();
                let t = ctx.total();
                for v in t.ids() {
                    assert_eq!(s.matroid().rank_of(v), oracle::direct_sum_rank(&a, &b, t, &small, v));
                }
                sums += 1;
            }
        }
    }
    assert!(sums >= 20);
}

fn main() {
    let criteria: [(&str, fn()); 9] = [
        ("paving example reproduction", criterion_1),
        ("axiom suite", criterion_2),
        ("direct-sum ground truths", criterion_3),
        ("non-representability of M1+M1 at fixed degrees", criterion_4),
        ("uniform direct-sum degrees", criterion_5),
        ("free-summand positive case", criterion_6),
        ("paving direct-sum circuits", criterion_7),
        ("cyclic-flats identity", criterion_8),
        ("seeded property suites", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let ok = panic::catch_unwind(AssertUnwindSafe(run)).is_ok();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "criterion {}: {} - {name} ({secs:.2}s)",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
        failed += usize::from(!ok);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
