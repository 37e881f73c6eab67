//! CSV and JSON artifacts.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{Lattice, LatticeError, SpaceId};
use crate::qmatroid::{QMatroid, QMatroidError, StructureReport};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    QMatroid(#[from] QMatroidError),
    #[error("row {row}: {reason}")]
    Table { row: usize, reason: String },
}

#[derive(Debug, Serialize, Deserialize)]
struct RankRow {
    index: u32,
    dim: usize,
    rows: String,
    rank: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpaceRow {
    index: u32,
    dim: usize,
    rows: String,
}

pub fn write_rank_table(m: &QMatroid, out: impl Write) -> Result<(), IoError> {
    let l = m.lattice();
    let mut w = csv::Writer::from_writer(out);
    for v in l.ids() {
        w.serialize(RankRow {
            index: v.0,
            dim: l.dim(v),
            rows: l.space_text(v),
            rank: m.rank_of(v),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn rank_table_string(m: &QMatroid) -> String {
    let mut buf = Vec::new();
    write_rank_table(m, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

/// Reads a rank table written by [`write_rank_table`]. Rows may come in any
/// order; each must name a subspace of `lattice` and every subspace must
/// appear once. The table is checked against the axioms.
pub fn read_rank_table(lattice: Arc<Lattice>, input: impl Read) -> Result<QMatroid, IoError> {
    let mut ranks: Vec<Option<u32>> = vec![None; lattice.len()];
    let mut r = csv::Reader::from_reader(input);
    for (i, rec) in r.deserialize::<RankRow>().enumerate() {
        let rec = rec?;
        let v = lattice.parse_space(&rec.rows)?;
        let slot = &mut ranks[v.index()];
        if slot.is_some() {
            return Err(IoError::Table {
                row: i + 1,
                reason: format!("subspace {} listed twice", rec.rows),
            });
        }
        *slot = Some(rec.rank);
    }
    let ranks = ranks
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.ok_or_else(|| IoError::Table {
                row: 0,
                reason: format!("missing subspace {}", lattice.space_text(SpaceId(i as u32))),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QMatroid::from_table(lattice, ranks)?)
}

#[derive(Serialize)]
struct RankTableJson {
    q: u32,
    n: usize,
    rank: u32,
    spaces: Vec<RankRow>,
}

/// The rank table as one JSON document.
pub fn rank_table_json(m: &QMatroid) -> String {
    let l = m.lattice();
    let doc = RankTableJson {
        q: l.q(),
        n: l.n(),
        rank: m.rank(),
        spaces: l
            .ids()
            .map(|v| RankRow {
                index: v.0,
                dim: l.dim(v),
                rows: l.space_text(v),
                rank: m.rank_of(v),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("rank tables always serialize")
}

pub fn write_lattice(l: &Lattice, out: impl Write) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    for v in l.ids() {
        w.serialize(SpaceRow {
            index: v.0,
            dim: l.dim(v),
            rows: l.space_text(v),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn structure_json(report: &StructureReport) -> String {
    serde_json::to_string_pretty(report).expect("reports always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_table_round_trip() {
        let l = Lattice::build(3, 2).unwrap();
        let m = QMatroid::uniform(1, l.clone()).unwrap();
        let text = rank_table_string(&m);
        assert!(text.starts_with("index,dim,rows,rank\n0,0,,0\n"));
        let back = read_rank_table(l, text.as_bytes()).unwrap();
        assert!(back.equals(&m).unwrap());
    }

    #[test]
    fn incomplete_table_is_rejected() {
        let l = Lattice::build(2, 2).unwrap();
        let m = QMatroid::uniform(1, l.clone()).unwrap();
        let text = rank_table_string(&m);
        let short: String = text.lines().take(3).map(|s| format!("{s}\n")).collect();
        assert!(matches!(read_rank_table(l, short.as_bytes()), Err(IoError::Table { .. })));
    }

    #[test]
    fn json_table_lists_every_space() {
        let l = Lattice::build(2, 2).unwrap();
        let m = QMatroid::uniform(1, l).unwrap();
        let v: serde_json::Value = serde_json::from_str(&rank_table_json(&m)).unwrap();
        assert_eq!(v["spaces"].as_array().unwrap().len(), 5);
        assert_eq!(v["rank"], 1);
    }

    #[test]
    fn lattice_dump_has_a_row_per_space() {
        let l = Lattice::build(2, 3).unwrap();
        let mut buf = Vec::new();
        write_lattice(&l, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 16);
    }
}
