//! Cryptomorphic structures read off a rank table.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::QMatroid;
use crate::lattice::{LatticeFingerprint, SpaceId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub lattice: LatticeFingerprint,
    pub loops: Vec<SpaceId>,
    pub independent: Vec<SpaceId>,
    pub dependent: Vec<SpaceId>,
    pub circuits: Vec<SpaceId>,
    pub flats: Vec<SpaceId>,
    pub open: Vec<SpaceId>,
    pub cyclic_flats: Vec<SpaceId>,
}

fn sorted_intersection(a: &[SpaceId], b: &[SpaceId]) -> Vec<SpaceId> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl QMatroid {
    fn filter_ids(&self, pred: impl Fn(SpaceId) -> bool + Sync) -> Vec<SpaceId> {
        let ids: Vec<SpaceId> = self.lattice.ids().collect();
        ids.into_par_iter().filter(|&v| pred(v)).collect()
    }

    /// 1-dimensional spaces of rank 0.
    pub fn loops(&self) -> Vec<SpaceId> {
        self.lattice
            .ids_of_dim(1)
            .filter(|&v| self.rank_of(v) == 0)
            .collect()
    }

    pub fn independent_spaces(&self) -> Vec<SpaceId> {
        self.filter_ids(|v| self.is_independent(v))
    }

    pub fn dependent_spaces(&self) -> Vec<SpaceId> {
        self.filter_ids(|v| !self.is_independent(v))
    }

    fn is_circuit(&self, v: SpaceId) -> bool {
        if self.is_independent(v) {
            return false;
        }
        // every proper subspace lies in a hyperplane and independence is
        // inherited downwards
        let mut minimal = true;
        self.lattice.for_each_hyperplane(v, |h| minimal &= self.is_independent(h));
        minimal
    }

    /// Dependent spaces all of whose proper subspaces are independent.
    pub fn circuits(&self) -> Vec<SpaceId> {
        self.filter_ids(|v| self.is_circuit(v))
    }

    /// Spaces whose every cover has strictly larger rank.
    pub fn flats(&self) -> Vec<SpaceId> {
        let l = &self.lattice;
        self.filter_ids(|v| l.covers_above(v).into_iter().all(|w| self.rank_of(w) > self.rank_of(v)))
    }

    /// For every space, the join of the circuits it contains.
    ///
    /// Computed level by level: a circuit is its own join, otherwise the
    /// join is the sum of the joins of its hyperplanes.
    pub fn circuit_joins(&self) -> Vec<SpaceId> {
        let l = &self.lattice;
        let mut joins = vec![SpaceId(0); l.len()];
        for d in 1..=l.n() {
            let range = l.dim_range(d);
            let level: Vec<SpaceId> = range
                .clone()
                .into_par_iter()
                .map(|i| {
                    let v = SpaceId(i as u32);
                    if self.is_circuit(v) {
                        return v;
                    }
                    let mut rows: Vec<u64> = Vec::new();
                    let mut full = false;
                    l.for_each_hyperplane(v, |h| {
                        if full {
                            return;
                        }
                        rows.extend_from_slice(l.rows(joins[h.index()]));
                        l.packing().rref(&mut rows);
                        full = rows.len() == d;
                    });
                    l.index_of_rref(&rows)
                })
                .collect();
            joins[range].copy_from_slice(&level);
        }
        joins
    }

    /// Sums of circuits; the zero space counts as the empty sum.
    pub fn open_spaces(&self) -> Vec<SpaceId> {
        let joins = self.circuit_joins();
        self.lattice.ids().filter(|v| joins[v.index()] == *v).collect()
    }

    pub fn cyclic_flats(&self) -> Vec<SpaceId> {
        sorted_intersection(&self.flats(), &self.open_spaces())
    }

    /// Every circuit has dimension at least the rank of the q-matroid.
    pub fn is_paving(&self) -> bool {
        let rank = self.rank() as usize;
        self.circuits().iter().all(|&c| self.lattice.dim(c) >= rank)
    }

    pub fn structure_report(&self) -> StructureReport {
        let flats = self.flats();
        let open = self.open_spaces();
        StructureReport {
            lattice: self.lattice.fingerprint(),
            loops: self.loops(),
            independent: self.independent_spaces(),
            dependent: self.dependent_spaces(),
            circuits: self.circuits(),
            cyclic_flats: sorted_intersection(&flats, &open),
            flats,
            open,
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::lattice::Lattice;
    use crate::qmatroid::QMatroid;

    #[test]
    fn u12_has_the_plane_as_only_circuit() {
        let l = Lattice::build(2, 2).unwrap();
        let m = QMatroid::uniform(1, l.clone()).unwrap();
        assert_eq!(m.circuits(), vec![l.full()]);
        assert!(m.is_paving());
        assert!(m.loops().is_empty());
    }

    #[test]
    fn uniform_cyclic_flats() {
        let l = Lattice::build(2, 3).unwrap();
        let trivial = QMatroid::uniform(0, l.clone()).unwrap();
        assert_eq!(trivial.cyclic_flats(), vec![l.full()]);
        assert_eq!(trivial.loops().len(), 7);
        let free = QMatroid::uniform(3, l.clone()).unwrap();
        assert_eq!(free.cyclic_flats(), vec![l.zero()]);
        assert!(free.circuits().is_empty());
        assert_eq!(free.open_spaces(), vec![l.zero()]);
    }

    #[test]
    fn uniform_flats_are_small_spaces_and_the_whole() {
        let l = Lattice::build(2, 4).unwrap();
        for k in 0..=4 {
            let m = QMatroid::uniform(k, l.clone()).unwrap();
            let expected: Vec<_> = l.ids().filter(|&v| l.dim(v) < k || v == l.full()).collect();
            assert_eq!(m.flats(), expected, "k = {k}");
        }
    }

    #[test]
    fn report_partitions_lattice() {
        let l = Lattice::build(3, 2).unwrap();
        let m = QMatroid::uniform(1, l.clone()).unwrap();
        let r = m.structure_report();
        assert_eq!(r.independent.len() + r.dependent.len(), l.len());
        assert!(r.circuits.iter().all(|c| r.dependent.contains(c)));
    }
}
