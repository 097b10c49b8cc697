use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A dense integer matrix with arbitrary-precision entries, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![vec![BigInt::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers (rows must be equal
    /// length; an empty row list yields a 0 x 0 matrix).
    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols,
            data: rows
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix { rows: rows.len(), cols, data: rows }
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = IntMatrix::zero(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i][i] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    pub fn diagonal_entries(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols)).map(|i| self.data[i][i].clone()).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.data
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().enumerate().all(|(j, v)| i == j || v.is_zero()))
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        self.data.swap(a, b);
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in &mut self.data {
                r.swap(a, b);
            }
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for v in &mut self.data[i] {
            if !v.is_zero() {
                *v = -&*v;
            }
        }
    }

    /// row[dst] += q * row[src]; skips zero entries of the source row.
    pub(crate) fn add_multiple_of_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() || dst == src {
            return;
        }
        let (a, b) = borrow_two(&mut self.data, dst, src);
        for (d, s) in a.iter_mut().zip(b.iter()) {
            if !s.is_zero() {
                *d += q * s;
            }
        }
    }

    /// col[dst] += q * col[src]; skips zero entries of the source column.
    pub(crate) fn add_multiple_of_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() || dst == src {
            return;
        }
        for r in &mut self.data {
            if !r[src].is_zero() {
                let t = q * &r[src];
                r[dst] += t;
            }
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for (k, aik) in self.data[i].iter().enumerate() {
                if aik.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] += aik * b;
                    }
                }
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = &num / &prev; // exact by Bareiss
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs() == BigInt::one()
    }
}

/// Mutable references to two distinct rows at once.
fn borrow_two<T>(data: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = data.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = data.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in &self.data {
            write!(f, "  [")?;
            for (j, v) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_against_hand_computation() {
        let a = IntMatrix::from_rows_i64(&[vec![1, 2], vec![3, 4]]);
        let b = IntMatrix::from_rows_i64(&[vec![0, 1], vec![1, 1]]);
        assert_eq!(a.mul(&b), IntMatrix::from_rows_i64(&[vec![2, 3], vec![4, 7]]));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = IntMatrix::from_rows_i64(&[vec![2, 0, 1], vec![1, 3, -1], vec![0, 4, 1]]);
        // expand along the first row: 2*(3+4) - 0 + 1*(4-0)
        assert_eq!(m.determinant(), BigInt::from(18));
        assert_eq!(IntMatrix::identity(5).determinant(), BigInt::one());
        let singular = IntMatrix::from_rows_i64(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(singular.determinant(), BigInt::zero());
        assert_eq!(IntMatrix::zero(0, 0).determinant(), BigInt::one());
    }

    #[test]
    fn determinant_sees_row_swaps() {
        let m = IntMatrix::from_rows_i64(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(m.determinant(), BigInt::from(-1));
        assert!(m.is_unimodular());
    }
}
