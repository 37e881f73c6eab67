#![allow(dead_code)]

pub mod oracle;

use std::sync::Arc;

use qmatroid::algebra::{FieldContext, Matrix};
use qmatroid::lattice::{Lattice, SpaceId};

pub const G1: &str = "1,2,0,3;0,0,1,2";
pub const G1_HAT: &str = "1,3,0,2;0,0,1,3";

/// Bases of the five rank-deficient planes of the paving example.
pub const PAVING_PLANES: [&str; 5] = [
    "1,0,0,0;0,1,0,0",
    "1,0,1,1;0,1,0,1",
    "1,0,0,1;0,0,1,1",
    "0,1,1,0;0,0,0,1",
    "1,1,0,1;0,0,1,0",
];

pub fn gf(p: u32, d: u32) -> Arc<FieldContext> {
    Arc::new(FieldContext::new(p, d, None).unwrap())
}

pub fn gf4() -> Arc<FieldContext> {
    gf(2, 2)
}

pub fn g1() -> Matrix {
    Matrix::parse(gf4(), G1).unwrap()
}

pub fn g1_hat() -> Matrix {
    Matrix::parse(gf4(), G1_HAT).unwrap()
}

pub fn paving_planes(l: &Lattice) -> Vec<SpaceId> {
    PAVING_PLANES.iter().map(|t| l.parse_space(t).unwrap()).collect()
}

/// Image of a GF(4) matrix in a larger field of even degree, sending ω to
/// the root `w` of x^2 + x + 1 given.
pub fn embed_gf4(m: &Matrix, target: &Arc<FieldContext>, w: u32) -> Matrix {
    let image = [0, 1, w, target.add(w, 1)];
    let rows: Vec<Vec<u32>> = (0..m.rows())
        .map(|r| m.row(r).iter().map(|&x| image[x as usize]).collect())
        .collect();
    Matrix::from_rows(target.clone(), &rows).unwrap()
}

/// Roots of x^2 + x + 1 in a field of characteristic 2.
pub fn cube_roots_of_unity(f: &FieldContext) -> Vec<u32> {
    f.elements()
        .filter(|&x| f.add(f.add(f.mul(x, x), x), 1) == 0)
        .collect()
}
