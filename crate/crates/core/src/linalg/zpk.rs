//! Sparse matrices over Z/p^k and their elementary divisors.
//!
//! The elimination works level by level. At level `j` every pivot with a unit
//! entry is eliminated (Markowitz-style: fewest column entries first, then the
//! shortest pivot row), each contributing the divisor `p^j`. Once no unit
//! entry is left, every remaining entry is divisible by `p`, so the residual
//! block is `p * M'` with `M'` well defined modulo `p^(k-j-1)`; dividing out
//! `p` and recursing on `M'` yields the remaining divisors.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guard::Guard;

/// A sparse matrix over Z/p^k in coordinate form; entries are reduced,
/// nonzero, and sorted by (row, col) without repeats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZpkMatrix {
    p: u64,
    k: u32,
    rows: usize,
    cols: usize,
    entries: Vec<(u32, u32, u64)>,
}

fn checked_modulus(p: u64, k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidArgument("exponent k must be >= 1".into()));
    }
    let mut m: u64 = 1;
    for _ in 0..k {
        m = m
            .checked_mul(p)
            .filter(|&m| m < (1 << 31))
            .ok_or_else(|| Error::InvalidArgument(format!("modulus {p}^{k} too large")))?;
    }
    Ok(m)
}

impl ZpkMatrix {
    /// Builds a matrix from signed coordinate triplets; repeats are summed.
    pub fn new(
        p: u64,
        k: u32,
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self> {
        let modulus = checked_modulus(p, k)?;
        let mut raw: Vec<(u32, u32, u64)> = Vec::new();
        for (i, j, x) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({i},{j}) outside {rows}x{cols}"
                )));
            }
            raw.push((i as u32, j as u32, x.rem_euclid(modulus as i64) as u64));
        }
        raw.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut entries: Vec<(u32, u32, u64)> = Vec::with_capacity(raw.len());
        for (i, j, x) in raw {
            match entries.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 = (last.2 + x) % modulus,
                _ => entries.push((i, j, x)),
            }
        }
        entries.retain(|e| e.2 != 0);
        Ok(Self {
            p,
            k,
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(p: u64, k: u32, rows: usize, cols: usize) -> Result<Self> {
        Self::new(p, k, rows, cols, std::iter::empty())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(u32, u32, u64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|&(i, j, x)| (j, i, x)).collect();
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        Self {
            p: self.p,
            k: self.k,
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Matrix times column vector, modulo p^k.
    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.cols);
        let m = self.modulus();
        let mut out = vec![0u64; self.rows];
        for &(i, j, a) in &self.entries {
            out[i as usize] = (out[i as usize] + a * (x[j as usize] % m)) % m;
        }
        out
    }

    /// Sparse product `self * other`.
    pub fn mul(&self, other: &ZpkMatrix) -> Result<ZpkMatrix> {
        if self.cols != other.rows || self.p != other.p || self.k != other.k {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let m = self.modulus();
        let other_rows = row_lists(other);
        let mut out: Vec<(usize, usize, i64)> = Vec::new();
        let mut acc: Vec<u64> = vec![0; other.cols];
        let mut touched: Vec<usize> = Vec::new();
        for row in row_lists(self) {
            let Some(&(i, _, _)) = row.first() else { continue };
            for &(_, j, a) in row {
                for &(_, l, b) in other_rows_get(&other_rows, j as usize) {
                    if acc[l as usize] == 0 {
                        touched.push(l as usize);
                    }
                    acc[l as usize] = (acc[l as usize] + a * b) % m;
                }
            }
            for &l in &touched {
                if acc[l] != 0 {
                    out.push((i as usize, l, acc[l] as i64));
                }
                acc[l] = 0;
            }
            touched.clear();
        }
        ZpkMatrix::new(self.p, self.k, self.rows, other.cols, out)
    }

    /// The matrix with one extra column appended.
    pub fn with_column(&self, column: &[u64]) -> ZpkMatrix {
        assert_eq!(column.len(), self.rows);
        let m = self.modulus();
        let c = self.cols as u32;
        let mut entries = self.entries.clone();
        entries.extend(
            column
                .iter()
                .enumerate()
                .filter(|(_, &x)| x % m != 0)
                .map(|(i, &x)| (i as u32, c, x % m)),
        );
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        ZpkMatrix {
            p: self.p,
            k: self.k,
            rows: self.rows,
            cols: self.cols + 1,
            entries,
        }
    }
}

fn row_lists(m: &ZpkMatrix) -> Vec<&[(u32, u32, u64)]> {
    let mut out = Vec::new();
    let mut start = 0;
    let e = &m.entries;
    while start < e.len() {
        let mut end = start;
        while end < e.len() && e[end].0 == e[start].0 {
            end += 1;
        }
        out.push(&e[start..end]);
        start = end;
    }
    out
}

fn other_rows_get<'a>(rows: &[&'a [(u32, u32, u64)]], i: usize) -> &'a [(u32, u32, u64)] {
    match rows.binary_search_by_key(&(i as u32), |r| r[0].0) {
        Ok(pos) => rows[pos],
        Err(_) => &[],
    }
}

/// Elementary divisors of a matrix over Z/p^k, viewed as a map
/// (Z/p^k)^cols -> (Z/p^k)^rows.
///
/// `exponents` lists `e_i` (ascending) for every nonzero divisor `p^(e_i)`,
/// `0 <= e_i < k`; the remaining `min(rows, cols) - exponents.len()` diagonal
/// entries are zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryDivisors {
    pub p: u64,
    pub k: u32,
    pub rows: usize,
    pub cols: usize,
    pub exponents: Vec<u32>,
}

impl ElementaryDivisors {
    /// Number of nonzero divisors.
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn zero_divisors(&self) -> usize {
        self.rows.min(self.cols) - self.exponents.len()
    }

    /// log_p |image|.
    pub fn image_log_order(&self) -> u64 {
        self.exponents.iter().map(|&e| (self.k - e) as u64).sum()
    }

    /// log_p |kernel| = k * cols - log_p |image|.
    pub fn kernel_log_order(&self) -> u64 {
        self.k as u64 * self.cols as u64 - self.image_log_order()
    }

    /// log_p |cokernel| = k * rows - log_p |image|.
    pub fn cokernel_log_order(&self) -> u64 {
        self.k as u64 * self.rows as u64 - self.image_log_order()
    }

    /// Multiset of divisors as `(exponent, multiplicity)`, including `k` for zero divisors.
    pub fn multiset(&self) -> Vec<(u32, usize)> {
        let mut out: Vec<(u32, usize)> = Vec::new();
        for &e in &self.exponents {
            match out.last_mut() {
                Some((x, c)) if *x == e => *c += 1,
                _ => out.push((e, 1)),
            }
        }
        if self.zero_divisors() > 0 {
            out.push((self.k, self.zero_divisors()));
        }
        out
    }
}

type SparseRow = Vec<(u32, u64)>;

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "not a unit");
    t0.rem_euclid(m as i128) as u64
}

/// `target -= factor * pivot` for sorted sparse rows. Calls `on_new` for every
/// column that was absent from `target` and is now present.
fn axpy(
    target: &SparseRow,
    pivot: &SparseRow,
    factor: u64,
    modulus: u64,
    mut on_new: impl FnMut(u32),
) -> SparseRow {
    let neg = modulus - factor % modulus;
    let mut out = Vec::with_capacity(target.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < pivot.len() {
        let a = target.get(i);
        let b = pivot.get(j);
        match (a, b) {
            (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                let v = (va + neg * vb) % modulus;
                if v != 0 {
                    out.push((ca, v));
                }
                i += 1;
                j += 1;
            }
            (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                out.push((ca, va));
                i += 1;
            }
            (Some(&(ca, va)), None) => {
                out.push((ca, va));
                i += 1;
            }
            (_, Some(&(cb, vb))) => {
                let v = neg * vb % modulus;
                if v != 0 {
                    out.push((cb, v));
                    on_new(cb);
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

fn entry(row: &SparseRow, c: u32) -> Option<u64> {
    row.binary_search_by_key(&c, |e| e.0).ok().map(|i| row[i].1)
}

/// Eliminates every unit pivot reachable in `rows`. Returns the number of
/// pivots and the surviving rows, none of which contains a unit.
fn eliminate_units(
    mut rows: Vec<SparseRow>,
    ncols: usize,
    p: u64,
    modulus: u64,
    guard: &Guard,
) -> Result<(usize, Vec<SparseRow>)> {
    let is_unit = |x: u64| x % p != 0;
    let mut alive = vec![true; rows.len()];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    for (r, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            col_rows[c as usize].push(r as u32);
        }
    }
    let mut done = vec![false; ncols];
    let mut pivots = 0usize;
    loop {
        let mut heap: BinaryHeap<Reverse<(usize, u32)>> = (0..ncols)
            .filter(|&c| !done[c] && !col_rows[c].is_empty())
            .map(|c| Reverse((col_rows[c].len(), c as u32)))
            .collect();
        let mut progress = false;
        while let Some(Reverse((count, c))) = heap.pop() {
            let cu = c as usize;
            if done[cu] {
                continue;
            }
            let mut list = std::mem::take(&mut col_rows[cu]);
            list.sort_unstable();
            list.dedup();
            list.retain(|&r| alive[r as usize] && entry(&rows[r as usize], c).is_some());
            if list.is_empty() {
                done[cu] = true;
                continue;
            }
            if list.len() != count {
                heap.push(Reverse((list.len(), c)));
                col_rows[cu] = list;
                continue;
            }
            let pivot = list
                .iter()
                .copied()
                .filter(|&r| is_unit(entry(&rows[r as usize], c).unwrap()))
                .min_by_key(|&r| rows[r as usize].len());
            let Some(pr) = pivot else {
                // deferred: another pivot may still turn an entry into a unit
                col_rows[cu] = list;
                continue;
            };
            let pivot_row = std::mem::take(&mut rows[pr as usize]);
            alive[pr as usize] = false;
            let inv = inv_mod(entry(&pivot_row, c).unwrap(), modulus);
            for &r in list.iter().filter(|&&r| r != pr) {
                let a = entry(&rows[r as usize], c).unwrap();
                let factor = a * inv % modulus;
                let new_row = axpy(&rows[r as usize], &pivot_row, factor, modulus, |nc| {
                    col_rows[nc as usize].push(r)
                });
                rows[r as usize] = new_row;
            }
            done[cu] = true;
            pivots += 1;
            progress = true;
            if pivots % 256 == 0 {
                guard.check_time("elementary divisors")?;
            }
        }
        let unit_left = rows
            .iter()
            .zip(&alive)
            .any(|(row, &a)| a && row.iter().any(|&(_, x)| is_unit(x)));
        if !unit_left || !progress {
            debug_assert!(!unit_left, "unit entry survived elimination");
            break;
        }
        for c in 0..ncols {
            if !done[c] {
                col_rows[c].clear();
            }
        }
        for (r, row) in rows.iter().enumerate() {
            if alive[r] {
                for &(c, _) in row {
                    col_rows[c as usize].push(r as u32);
                }
            }
        }
    }
    let residual = rows
        .into_iter()
        .zip(alive)
        .filter(|(row, a)| *a && !row.is_empty())
        .map(|(row, _)| row)
        .collect();
    Ok((pivots, residual))
}

/// Elementary divisors by sparse elimination with unit-pivot preference and
/// p-adic descent on the residual block.
pub fn elementary_divisors(m: &ZpkMatrix) -> ElementaryDivisors {
    elementary_divisors_guarded(m, &Guard::unlimited()).expect("no deadline set")
}

/// As [`elementary_divisors`], but honours the guard's deadline.
pub fn elementary_divisors_guarded(m: &ZpkMatrix, guard: &Guard) -> Result<ElementaryDivisors> {
    let p = m.p;
    let mut modulus = m.modulus();
    let mut rows: Vec<SparseRow> = row_lists(m)
        .into_iter()
        .map(|r| r.iter().map(|&(_, j, x)| (j, x)).collect())
        .collect();
    let mut exponents = Vec::new();
    let mut level = 0u32;
    while level < m.k && !rows.is_empty() {
        let (r, residual) = eliminate_units(rows, m.cols, p, modulus, guard)?;
        exponents.extend(std::iter::repeat(level).take(r));
        modulus /= p;
        level += 1;
        rows = residual
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .filter_map(|(c, x)| {
                        debug_assert_eq!(x % p, 0);
                        let y = (x / p) % modulus.max(1);
                        (y != 0).then_some((c, y))
                    })
                    .collect::<SparseRow>()
            })
            .filter(|row| !row.is_empty())
            .collect();
    }
    Ok(ElementaryDivisors {
        p,
        k: m.k,
        rows: m.rows,
        cols: m.cols,
        exponents,
    })
}

/// Whether `v` lies in the column span (image) of `m`, decided by comparing
/// image orders of `m` and `[m | v]`.
pub fn image_contains(m: &ZpkMatrix, v: &[u64], guard: &Guard) -> Result<bool> {
    let base = elementary_divisors_guarded(m, guard)?;
    let ext = elementary_divisors_guarded(&m.with_column(v), guard)?;
    Ok(base.image_log_order() == ext.image_log_order())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_case() {
        let m = ZpkMatrix::new(3, 2, 2, 2, [(0, 0, 1), (1, 1, 3)]).unwrap();
        let d = elementary_divisors(&m);
        assert_eq!(d.exponents, vec![0, 1]);
        assert_eq!(d.kernel_log_order(), 1);
        assert_eq!(d.image_log_order(), 3);
    }

    #[test]
    fn zero_matrix() {
        let m = ZpkMatrix::zeros(3, 2, 3, 4).unwrap();
        let d = elementary_divisors(&m);
        assert_eq!(d.image_log_order(), 0);
        assert_eq!(d.kernel_log_order(), 8);
        assert_eq!(d.multiset(), vec![(2, 3)]);
    }

    #[test]
    fn non_unit_pivots_need_descent() {
        // [[3, 6], [6, 3]] over Z/27: divisors p * smith([[1,2],[2,1]] mod 9) = {3, 3*3}.
        let m = ZpkMatrix::new(3, 3, 2, 2, [(0, 0, 3), (0, 1, 6), (1, 0, 6), (1, 1, 3)]).unwrap();
        let d = elementary_divisors(&m);
        assert_eq!(d.exponents, vec![1, 2]);
    }

    #[test]
    fn inverse_mod_prime_power() {
        for a in [1u64, 2, 4, 5, 7, 8, 10, 26] {
            assert_eq!(a * inv_mod(a, 27) % 27, 1);
        }
    }

    #[test]
    fn sparse_product() {
        let a = ZpkMatrix::new(5, 1, 2, 3, [(0, 0, 1), (0, 2, 2), (1, 1, 4)]).unwrap();
        let b = ZpkMatrix::new(5, 1, 3, 2, [(0, 0, 1), (2, 0, 2), (1, 1, 1)]).unwrap();
        let c = a.mul(&b).unwrap();
        assert_eq!(c.entries(), &[(1, 1, 4)]);
        assert!(a.mul(&a).is_err());
    }

    #[test]
    fn membership_in_image() {
        let m = ZpkMatrix::new(3, 2, 2, 1, [(0, 0, 3), (1, 0, 0)]).unwrap();
        let g = Guard::unlimited();
        assert!(image_contains(&m, &[6, 0], &g).unwrap());
        assert!(!image_contains(&m, &[1, 0], &g).unwrap());
        assert!(!image_contains(&m, &[0, 3], &g).unwrap());
    }
}
