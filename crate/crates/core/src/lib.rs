//! q-matroids on the subspace lattice of F_q^n: rank tables, derived
//! structures, direct sums and representability searches.

pub mod algebra;
pub mod directsum;
pub mod io;
pub mod lattice;
pub mod qmatroid;
pub mod repr;
pub mod scenarios;
pub mod spec;

pub use algebra::{AlgebraError, FieldContext, FieldSpec, Matrix};
pub use lattice::{Lattice, LatticeError, Side, SpaceId};
pub use qmatroid::{QMatroid, QMatroidError, StructureReport};
