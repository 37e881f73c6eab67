//! Dense matrices over a [`FieldContext`].

use std::fmt;
use std::sync::Arc;

use super::{AlgebraError, FieldContext};

/// Row-major dense matrix of element codes.
#[derive(Clone)]
pub struct Matrix {
    field: Arc<FieldContext>,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.field.id() == other.field.id()
            && self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
    }
}

impl Eq for Matrix {}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[{}x{} over {}]({})", self.rows, self.cols, self.field.id(), self)
    }
}

/// Text form: rows separated by `;`, entries by `,`.
impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            if r > 0 {
                f.write_str(";")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: Arc<FieldContext>, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Arc<FieldContext>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_vec(
        field: Arc<FieldContext>,
        rows: usize,
        cols: usize,
        data: Vec<u32>,
    ) -> Result<Self, AlgebraError> {
        if data.len() != rows * cols {
            return Err(AlgebraError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(&code) = data.iter().find(|&&c| !field.is_valid(c)) {
            return Err(AlgebraError::InvalidElement {
                code,
                order: field.order(),
            });
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows<R: AsRef<[u32]>>(field: Arc<FieldContext>, rows: &[R]) -> Result<Self, AlgebraError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(AlgebraError::Shape("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::from_vec(field, rows.len(), cols, data)
    }

    /// Parses the `;`/`,` text form. An empty string is the 0x0 matrix.
    pub fn parse(field: Arc<FieldContext>, text: &str) -> Result<Self, AlgebraError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::zeros(field, 0, 0));
        }
        let err = |position: usize, reason: String| AlgebraError::Parse {
            input: text.to_string(),
            position,
            reason,
        };
        let mut rows: Vec<Vec<u32>> = Vec::new();
        let mut offset = 0;
        for row_text in text.split(';') {
            let mut row = Vec::new();
            let mut pos = offset;
            for entry in row_text.split(',') {
                let trimmed = entry.trim();
                let code: u32 = trimmed
                    .parse()
                    .map_err(|_| err(pos, format!("bad entry {trimmed:?}")))?;
                if !field.is_valid(code) {
                    return Err(err(pos, format!("code {code} not in a field of order {}", field.order())));
                }
                row.push(code);
                pos += entry.len() + 1;
            }
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(err(offset, format!("row has {} entries, expected {}", row.len(), first.len())));
                }
            }
            rows.push(row);
            offset += row_text.len() + 1;
        }
        Self::from_rows(field, &rows)
    }

    pub fn field(&self) -> &Arc<FieldContext> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(self.field.is_valid(v));
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&c| c == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field.clone(), self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, AlgebraError> {
        self.check_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(AlgebraError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f.clone(), self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, rhs.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    /// Applies `f` to every entry; the results must be valid codes.
    pub fn map(&self, f: impl Fn(u32) -> u32) -> Matrix {
        let data: Vec<u32> = self.data.iter().map(|&c| f(c)).collect();
        debug_assert!(data.iter().all(|&c| self.field.is_valid(c)));
        Matrix { data, ..self.clone() }
    }

    /// Entrywise Frobenius image.
    pub fn frobenius(&self) -> Matrix {
        let f = self.field.clone();
        self.map(|c| f.frobenius(c))
    }

    fn check_field(&self, other: &Matrix) -> Result<(), AlgebraError> {
        if self.field.id() != other.field.id() {
            return Err(AlgebraError::FieldMismatch {
                left: self.field.id(),
                right: other.field.id(),
            });
        }
        Ok(())
    }

    /// `(self | rhs)`.
    pub fn hstack(&self, rhs: &Matrix) -> Result<Matrix, AlgebraError> {
        self.check_field(rhs)?;
        if self.rows != rhs.rows {
            return Err(AlgebraError::Shape("hstack with differing row counts".into()));
        }
        let cols = self.cols + rhs.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(rhs.row(r));
        }
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols,
            data,
        })
    }

    /// `diag(self, rhs)`.
    pub fn block_diag(&self, rhs: &Matrix) -> Result<Matrix, AlgebraError> {
        self.check_field(rhs)?;
        let mut out = Matrix::zeros(self.field.clone(), self.rows + rhs.rows, self.cols + rhs.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
        }
        for r in 0..rhs.rows {
            for c in 0..rhs.cols {
                out.set(self.rows + r, self.cols + c, rhs.get(r, c));
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form and the pivot columns.
    ///
    /// The pivot is always the topmost nonzero entry of the leftmost column
    /// not yet reduced, so the output is canonical for the row space.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..self.cols {
            if lead == self.rows {
                break;
            }
            let Some(pr) = (lead..self.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            m.swap_rows(pr, lead);
            let inv = f.inv(m.get(lead, c)).expect("pivot is nonzero");
            for j in c..self.cols {
                let v = f.mul(m.get(lead, j), inv);
                m.set(lead, j, v);
            }
            for r in 0..self.rows {
                let factor = m.get(r, c);
                if r == lead || factor == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(lead, j)));
                    m.set(r, j, v);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn is_rref(&self) -> bool {
        self.rref().0 == *self
    }

    /// Basis of `{v : self * v^T = 0}`, one vector per non-pivot column.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(i, free));
            }
            basis.push(v);
        }
        basis
    }

    /// `self * v^T` for a vector `v`.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let f = &self.field;
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    /// Embeds a matrix over the prime field GF(p) into `target`.
    pub fn lift(&self, target: &Arc<FieldContext>) -> Result<Matrix, AlgebraError> {
        if self.field.characteristic() != target.characteristic() {
            return Err(AlgebraError::CharacteristicMismatch {
                from: self.field.characteristic(),
                to: target.characteristic(),
            });
        }
        if self.field.degree() != 1 {
            return Err(AlgebraError::Shape("only prime-field matrices can be lifted".into()));
        }
        Ok(Matrix {
            field: target.clone(),
            ..self.clone()
        })
    }

    /// Rows with their leading entry scaled to 1 and zero rows removed; the
    /// rows of the RREF.
    pub fn nonzero_rref_rows(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let k = pivots.len();
        Matrix {
            field: self.field.clone(),
            rows: k,
            cols: self.cols,
            data: r.data[..k * self.cols].to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32, d: u32) -> Arc<FieldContext> {
        Arc::new(FieldContext::new(p, d, None).unwrap())
    }

    #[test]
    fn g1_is_already_reduced() {
        let f = gf(2, 2);
        let g1 = Matrix::parse(f, "1,2,0,3;0,0,1,2").unwrap();
        let (r, piv) = g1.rref();
        assert_eq!(r, g1);
        assert_eq!(piv, vec![0, 2]);
    }

    #[test]
    fn identity_and_zero() {
        let f = gf(3, 1);
        let i = Matrix::identity(f.clone(), 4);
        assert_eq!(i.rref(), (i.clone(), vec![0, 1, 2, 3]));
        assert!(i.kernel().is_empty());
        let z = Matrix::zeros(f, 2, 3);
        assert_eq!(z.rref(), (z.clone(), vec![]));
        assert_eq!(z.kernel().len(), 3);
    }

    #[test]
    fn g1_y2_product_has_rank_one() {
        let f4 = gf(2, 2);
        let g1 = Matrix::parse(f4.clone(), "1,2,0,3;0,0,1,2").unwrap();
        let y2 = Matrix::parse(gf(2, 1), "1,0,1,1;0,1,0,1").unwrap();
        let prod = g1.mul(&y2.lift(&f4).unwrap().transpose()).unwrap();
        assert_eq!(prod.to_string(), "2,1;3,2");
        assert_eq!(prod.rank(), 1);
    }

    #[test]
    fn kernels_contain_obstruction_vectors() {
        let f4 = gf(2, 2);
        let g1 = Matrix::parse(f4.clone(), "1,2,0,3;0,0,1,2").unwrap();
        assert_eq!(g1.apply(&[1, 1, 2, 1]), vec![0, 0]);
        let g1_hat = Matrix::parse(f4, "1,3,0,2;0,0,1,3").unwrap();
        assert_eq!(g1_hat.apply(&[1, 1, 3, 1]), vec![0, 0]);
        for v in g1.kernel() {
            assert_eq!(g1.apply(&v), vec![0, 0]);
        }
    }

    #[test]
    fn parse_errors_report_position() {
        let f = gf(2, 2);
        match Matrix::parse(f.clone(), "1,2;0,x") {
            Err(AlgebraError::Parse { position, .. }) => assert_eq!(position, 6),
            other => panic!("{other:?}"),
        }
        assert!(Matrix::parse(f.clone(), "1,2;0").is_err());
        assert!(Matrix::parse(f, "1,4").is_err());
    }

    #[test]
    fn lift_requires_same_characteristic() {
        let y = Matrix::parse(gf(3, 1), "1,2").unwrap();
        assert!(matches!(
            y.lift(&gf(2, 2)),
            Err(AlgebraError::CharacteristicMismatch { .. })
        ));
        let z = Matrix::zeros(gf(2, 1), 2, 2);
        assert!(z.lift(&gf(2, 3)).unwrap().is_zero());
    }

    #[test]
    fn block_diag_layout() {
        let f = gf(2, 2);
        let a = Matrix::parse(f.clone(), "1,2").unwrap();
        let b = Matrix::parse(f, "1,3").unwrap();
        assert_eq!(a.block_diag(&b).unwrap().to_string(), "1,2,0,0;0,0,1,3");
        assert_eq!(a.hstack(&b).unwrap().to_string(), "1,2,1,3");
    }
}
