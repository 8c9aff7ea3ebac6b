use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::PrimeField;

use super::Subspace;

/// Dense matrix over F_p, row-major. Entries are always reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds from signed rows, reducing every entry.
    pub fn from_rows<R: AsRef<[i64]>>(field: PrimeField, cols: usize, rows: &[R]) -> Result<Self> {
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has length {}, expected {cols}",
                    r.len()
                )));
            }
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, field.reduce(x));
            }
        }
        Ok(m)
    }

    /// Builds from already-reduced row vectors.
    pub fn from_vectors(field: PrimeField, cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r.iter().map(|&x| x % field.p()));
        }
        Self {
            field,
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Coordinate-list constructor; repeated coordinates are summed.
    pub fn from_triplets(
        field: PrimeField,
        rows: usize,
        cols: usize,
        entries: &[(usize, usize, i64)],
    ) -> Result<Self> {
        let mut m = Self::zeros(field, rows, cols);
        for &(i, j, x) in entries {
            if i >= rows || j >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({i},{j}) outside {rows}x{cols}"
                )));
            }
            let v = field.add(m.get(i, j), field.reduce(x));
            m.set(i, j, v);
        }
        Ok(m)
    }

    /// Nonzero entries in row-major order.
    pub fn to_triplets(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                if x != 0 {
                    out.push((i, j, x));
                }
            }
        }
        out
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u32) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix times column vector.
    pub fn apply(&self, x: &[u32]) -> Vec<u32> {
        assert_eq!(x.len(), self.cols);
        let p = self.field.p() as u64;
        (0..self.rows)
            .map(|i| {
                let s: u64 = self
                    .row(i)
                    .iter()
                    .zip(x)
                    .map(|(&a, &b)| a as u64 * b as u64 % p)
                    .sum();
                (s % p) as u32
            })
            .collect()
    }

    /// Reduced row-echelon form of the row space.
    pub fn rref(&self) -> (Subspace, usize) {
        let s = Subspace::span(self.field, self.cols, &self.row_vectors());
        let r = s.dim();
        (s, r)
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    /// Null space `{x : M x = 0}`.
    pub fn kernel(&self) -> Subspace {
        let (echelon, _) = self.rref();
        kernel_from_rref(&echelon)
    }
}

/// Null space of the matrix whose rows are the (canonical) basis of `s`.
pub(crate) fn kernel_from_rref(s: &Subspace) -> Subspace {
    let f = s.field();
    let n = s.ambient_dim();
    let pivots = s.pivots();
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut gens = Vec::with_capacity(n - pivots.len());
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u32; n];
        v[free] = 1;
        for (row, &pc) in s.basis().iter().zip(&pivots) {
            v[pc] = f.neg(row[free]);
        }
        gens.push(v);
    }
    Subspace::span(f, n, &gens)
}

/// In-place row reduction of `rows` (each of length `ncols`) to reduced
/// echelon form. Returns the pivot columns; zero rows are dropped.
pub(crate) fn rref_rows(f: PrimeField, ncols: usize, rows: &mut Vec<Vec<u32>>) -> Vec<usize> {
    let p = f.p() as u64;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = f.inv(rows[r][c]);
        if inv != 1 {
            for x in rows[r][c..].iter_mut() {
                *x = f.mul(*x, inv);
            }
        }
        let (head, tail) = rows.split_at_mut(r);
        let (pivot_row, rest) = tail.split_first_mut().unwrap();
        for other in head.iter_mut().chain(rest.iter_mut()) {
            let a = other[c];
            if a == 0 {
                continue;
            }
            let na = p - a as u64;
            for (x, &y) in other[c..].iter_mut().zip(&pivot_row[c..]) {
                if y != 0 {
                    *x = ((*x as u64 + na * y as u64) % p) as u32;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn identity_rref() {
        let m = FpMatrix::identity(f(3), 3);
        let (s, r) = m.rref();
        assert_eq!(r, 3);
        assert_eq!(s.basis(), &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn dependent_rows() {
        let m = FpMatrix::from_rows(f(5), 2, &[[1, 2], [2, 4]]).unwrap();
        let (s, r) = m.rref();
        assert_eq!(r, 1);
        assert_eq!(s.basis(), &[vec![1, 2]]);
    }

    #[test]
    fn kernel_of_all_ones() {
        let m = FpMatrix::from_rows(f(3), 3, &[[1, 1, 1]]).unwrap();
        let k = m.kernel();
        assert_eq!(k.dim(), 2);
        for v in k.basis() {
            assert_eq!(m.apply(v), vec![0]);
        }
    }

    #[test]
    fn kernel_of_zero_is_everything() {
        let m = FpMatrix::zeros(f(7), 2, 4);
        assert_eq!(m.kernel(), Subspace::full(f(7), 4));
    }

    #[test]
    fn empty_matrix() {
        let m = FpMatrix::zeros(f(3), 0, 5);
        let (s, r) = m.rref();
        assert_eq!(r, 0);
        assert!(s.is_zero());
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = FpMatrix::from_triplets(f(3), 2, 2, &[(0, 0, 2), (0, 0, 2), (1, 1, -1)]).unwrap();
        assert_eq!(m.to_triplets(), vec![(0, 0, 1), (1, 1, 2)]);
        assert!(FpMatrix::from_triplets(f(3), 2, 2, &[(2, 0, 1)]).is_err());
    }
}
