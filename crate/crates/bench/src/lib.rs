//! Fixtures shared by the benchmarks in benches/.

use std::sync::Arc;

use qmatroid::algebra::{FieldContext, Matrix};
use qmatroid::lattice::Lattice;
use qmatroid::qmatroid::QMatroid;
use qmatroid::repr::extension_field;

pub const G1: &str = "1,2,0,3;0,0,1,2";

pub fn gf4() -> Arc<FieldContext> {
    extension_field(2, 2).expect("GF(4)")
}

pub fn g1() -> Matrix {
    Matrix::parse(gf4(), G1).expect("valid matrix")
}

/// M_G1 on the given lattice of F_2^4.
pub fn m_g1(lattice: Arc<Lattice>) -> QMatroid {
    QMatroid::from_matrix(&g1(), lattice).expect("valid q-matroid")
}
