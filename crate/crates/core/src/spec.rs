//! Text specs for q-matroids.
//!
//! ```text
//! matrix:<field>:<n>:<matrix-text>     e.g. matrix:2^2:4:1,2,0,3;0,0,1,2
//! uniform:<q>:<n>:<k>                  e.g. uniform:2:2:1
//! paving:<q>:<n>:<k>:<spaces>          spaces separated by '|', or k rows each
//! dsum:<spec>+<spec>[+<spec>...]       folded from the left
//! ```

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraError, FieldContext, Matrix};
use crate::directsum::{direct_sum, DirectSumError, SplitContext};
use crate::lattice::{Lattice, LatticeError, DEFAULT_LATTICE_CAP};
use crate::qmatroid::{QMatroid, QMatroidError};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("bad q-matroid spec {spec:?}: {reason}")]
    Syntax { spec: String, reason: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    QMatroid(#[from] QMatroidError),
    #[error(transparent)]
    DirectSum(#[from] DirectSumError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QSpec {
    Matrix { field: String, n: usize, matrix: String },
    Uniform { q: u32, n: usize, k: usize },
    Paving { q: u32, n: usize, k: usize, spaces: Vec<String> },
    DirectSum(Vec<QSpec>),
}

fn syntax(spec: &str, reason: impl Into<String>) -> SpecError {
    SpecError::Syntax {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

fn number<T: FromStr>(spec: &str, what: &str, text: &str) -> Result<T, SpecError> {
    text.trim()
        .parse()
        .map_err(|_| syntax(spec, format!("{what} {text:?} is not a number")))
}

impl FromStr for QSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').ok_or_else(|| syntax(s, "missing ':'"))?;
        match kind {
            "matrix" => {
                let parts: Vec<&str> = rest.splitn(3, ':').collect();
                let [field, n, matrix] = parts[..] else {
                    return Err(syntax(s, "expected matrix:<field>:<n>:<matrix>"));
                };
                Ok(QSpec::Matrix {
                    field: field.to_string(),
                    n: number(s, "n", n)?,
                    matrix: matrix.to_string(),
                })
            }
            "uniform" => {
                let parts: Vec<&str> = rest.split(':').collect();
                let [q, n, k] = parts[..] else {
                    return Err(syntax(s, "expected uniform:<q>:<n>:<k>"));
                };
                Ok(QSpec::Uniform {
                    q: number(s, "q", q)?,
                    n: number(s, "n", n)?,
                    k: number(s, "k", k)?,
                })
            }
            "paving" => {
                let parts: Vec<&str> = rest.splitn(4, ':').collect();
                let [q, n, k, family] = parts[..] else {
                    return Err(syntax(s, "expected paving:<q>:<n>:<k>:<spaces>"));
                };
                let k: usize = number(s, "k", k)?;
                let spaces = if family.contains('|') {
                    family.split('|').map(|t| t.trim().to_string()).collect()
                } else if family.trim().is_empty() {
                    Vec::new()
                } else {
                    let rows: Vec<&str> = family.split(';').collect();
                    if k == 0 || !rows.len().is_multiple_of(k) {
                        return Err(syntax(s, format!("{} rows do not split into spaces of {k} rows", rows.len())));
                    }
                    rows.chunks(k).map(|c| c.join(";")).collect()
                };
                Ok(QSpec::Paving {
                    q: number(s, "q", q)?,
                    n: number(s, "n", n)?,
                    k,
                    spaces,
                })
            }
            "dsum" => {
                let parts = rest.split('+').map(str::parse).collect::<Result<Vec<QSpec>, _>>()?;
                if parts.len() < 2 {
                    return Err(syntax(s, "a direct sum needs at least two summands"));
                }
                Ok(QSpec::DirectSum(parts))
            }
            other => Err(syntax(s, format!("unknown kind {other:?}"))),
        }
    }
}

impl fmt::Display for QSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QSpec::Matrix { field, n, matrix } => write!(f, "matrix:{field}:{n}:{matrix}"),
            QSpec::Uniform { q, n, k } => write!(f, "uniform:{q}:{n}:{k}"),
            QSpec::Paving { q, n, k, spaces } => write!(f, "paving:{q}:{n}:{k}:{}", spaces.join("|")),
            QSpec::DirectSum(parts) => {
                write!(f, "dsum:")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

impl QSpec {
    /// (q, n) of the ground space.
    pub fn ground(&self) -> Result<(u32, usize), SpecError> {
        Ok(match self {
            QSpec::Matrix { field, n, .. } => (FieldContext::parse(field)?.characteristic(), *n),
            QSpec::Uniform { q, n, .. } | QSpec::Paving { q, n, .. } => (*q, *n),
            QSpec::DirectSum(parts) => {
                let mut q = None;
                let mut n = 0;
                for p in parts {
                    let (pq, pn) = p.ground()?;
                    if q.is_some_and(|q| q != pq) {
                        return Err(syntax(&self.to_string(), "summands over different fields"));
                    }
                    q = Some(pq);
                    n += pn;
                }
                (q.expect("at least two summands"), n)
            }
        })
    }

    pub fn build(&self) -> Result<QMatroid, SpecError> {
        self.build_with_cap(DEFAULT_LATTICE_CAP)
    }

    pub fn build_with_cap(&self, cap: u64) -> Result<QMatroid, SpecError> {
        let (q, n) = self.ground()?;
        match self {
            QSpec::Matrix { field, matrix, .. } => {
                let f = Arc::new(FieldContext::parse(field)?);
                let g = Matrix::parse(f, matrix)?;
                let l = Lattice::build_with_cap(q, n, cap)?;
                Ok(QMatroid::from_matrix(&g, l)?)
            }
            QSpec::Uniform { k, .. } => Ok(QMatroid::uniform(*k, Lattice::build_with_cap(q, n, cap)?)?),
            QSpec::Paving { k, spaces, .. } => {
                let l = Lattice::build_with_cap(q, n, cap)?;
                let family = spaces.iter().map(|t| l.parse_space(t)).collect::<Result<Vec<_>, _>>()?;
                Ok(QMatroid::paving_from_family(&family, *k, l)?)
            }
            QSpec::DirectSum(parts) => {
                let mut acc = parts[0].build_with_cap(cap)?;
                for p in &parts[1..] {
                    let next = p.build_with_cap(cap)?;
                    let ctx = SplitContext::from_lattices(
                        acc.lattice().clone(),
                        next.lattice().clone(),
                        Lattice::build_with_cap(q, acc.ground_dim() + next.ground_dim(), cap)?,
                    )?;
                    acc = direct_sum(&acc, &next, &ctx)?.into_matroid();
                }
                Ok(acc)
            }
        }
    }
}
