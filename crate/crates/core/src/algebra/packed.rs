//! One-word-per-row vectors over a prime field GF(p).
//!
//! A row of length `n` is packed as the base-p integer whose most significant
//! digit is column 0. For p = 2 this is the usual bitmask with column 0 in
//! bit `n - 1`, and row operations reduce to XOR.

use super::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowPacking {
    p: u32,
    n: usize,
    /// weight[j] = p^(n-1-j)
    weight: Vec<u64>,
}

impl RowPacking {
    /// Requires p^n < 2^63 so that sums of two rows cannot overflow.
    pub fn new(p: u32, n: usize) -> Result<Self, AlgebraError> {
        let mut weight = vec![0u64; n];
        let mut w: u64 = 1;
        for j in (0..n).rev() {
            weight[j] = w;
            w = w
                .checked_mul(p as u64)
                .filter(|&x| x < 1 << 63)
                .ok_or_else(|| AlgebraError::Shape(format!("rows of length {n} over GF({p}) do not fit a word")))?;
        }
        Ok(RowPacking { p, n, weight })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of distinct rows, p^n.
    pub fn row_count(&self) -> u64 {
        self.weight.first().map_or(1, |&w| w * self.p as u64)
    }

    pub fn pack(&self, digits: &[u32]) -> u64 {
        debug_assert_eq!(digits.len(), self.n);
        digits
            .iter()
            .zip(&self.weight)
            .map(|(&d, &w)| (d % self.p) as u64 * w)
            .sum()
    }

    pub fn unpack(&self, row: u64) -> Vec<u32> {
        (0..self.n).map(|j| self.digit(row, j)).collect()
    }

    #[inline]
    pub fn digit(&self, row: u64, j: usize) -> u32 {
        if self.p == 2 {
            ((row >> (self.n - 1 - j)) & 1) as u32
        } else {
            ((row / self.weight[j]) % self.p as u64) as u32
        }
    }

    #[inline]
    fn combine(&self, a: u64, b: u64, f: impl Fn(u64, u64) -> u64) -> u64 {
        let p = self.p as u64;
        let (mut a, mut b, mut w, mut out) = (a, b, 1u64, 0u64);
        for _ in 0..self.n {
            out += f(a % p, b % p) % p * w;
            a /= p;
            b /= p;
            w *= p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            a ^ b
        } else {
            self.combine(a, b, |x, y| x + y)
        }
    }

    /// a + s * b for a scalar s in GF(p).
    #[inline]
    pub fn add_scaled(&self, a: u64, b: u64, s: u32) -> u64 {
        match (self.p, s % self.p) {
            (_, 0) => a,
            (2, _) => a ^ b,
            (_, 1) => self.combine(a, b, |x, y| x + y),
            (_, s) => self.combine(a, b, |x, y| x + s as u64 * y),
        }
    }

    #[inline]
    pub fn scale(&self, a: u64, s: u32) -> u64 {
        match s % self.p {
            0 => 0,
            1 => a,
            s => self.combine(a, 0, |x, _| x * s as u64),
        }
    }

    /// Column of the first nonzero entry.
    #[inline]
    pub fn leading(&self, row: u64) -> Option<usize> {
        if row == 0 {
            return None;
        }
        if self.p == 2 {
            return Some(self.n - 1 - (63 - row.leading_zeros() as usize));
        }
        (0..self.n).find(|&j| self.digit(row, j) != 0)
    }

    fn inv(&self, a: u32) -> u32 {
        let p = self.p as u64;
        let (mut base, mut acc, mut e) = (a as u64 % p, 1u64, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc as u32
    }

    /// Reduces `rows` in place to reduced row echelon form, dropping zero
    /// rows. Returns the pivot columns.
    pub fn rref(&self, rows: &mut Vec<u64>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut lead = 0;
        if self.p == 2 {
            for c in 0..self.n {
                if lead == rows.len() {
                    break;
                }
                let bit = 1u64 << (self.n - 1 - c);
                let Some(pr) = (lead..rows.len()).find(|&r| rows[r] & bit != 0) else {
                    continue;
                };
                rows.swap(pr, lead);
                let pivot_row = rows[lead];
                for (r, row) in rows.iter_mut().enumerate() {
                    if r != lead && *row & bit != 0 {
                        *row ^= pivot_row;
                    }
                }
                pivots.push(c);
                lead += 1;
            }
        } else {
            let p = self.p;
            for c in 0..self.n {
                if lead == rows.len() {
                    break;
                }
                let Some(pr) = (lead..rows.len()).find(|&r| self.digit(rows[r], c) != 0) else {
                    continue;
                };
                rows.swap(pr, lead);
                let pivot_row = self.scale(rows[lead], self.inv(self.digit(rows[lead], c)));
                rows[lead] = pivot_row;
                for (r, row) in rows.iter_mut().enumerate() {
                    let d = self.digit(*row, c);
                    if r != lead && d != 0 {
                        *row = self.add_scaled(*row, pivot_row, p - d);
                    }
                }
                pivots.push(c);
                lead += 1;
            }
        }
        rows.truncate(lead);
        pivots
    }

    /// Residual of `row` after elimination against an RREF basis with the
    /// given pivots. Zero iff `row` lies in the span.
    pub fn reduce(&self, mut row: u64, basis: &[u64], pivots: &[usize]) -> u64 {
        for (&b, &c) in basis.iter().zip(pivots) {
            let d = self.digit(row, c);
            if d != 0 {
                row = self.add_scaled(row, b, self.p - d);
            }
        }
        row
    }

    /// Pivot columns of rows already in RREF.
    pub fn pivots_of(&self, rref_rows: &[u64]) -> Vec<usize> {
        rref_rows
            .iter()
            .map(|&r| self.leading(r).expect("RREF rows are nonzero"))
            .collect()
    }

    pub fn row_text(&self, row: u64) -> String {
        self.unpack(row)
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn rows_text(&self, rows: &[u64]) -> String {
        rows.iter().map(|&r| self.row_text(r)).collect::<Vec<_>>().join(";")
    }
}
