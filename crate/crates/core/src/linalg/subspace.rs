use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::PrimeField;

use super::matrix::{kernel_from_rref, rref_rows};
use super::FpMatrix;

/// A subspace of F_p^N stored by its reduced row-echelon basis.
///
/// The basis is canonical: two `Subspace` values are equal exactly when they
/// describe the same subspace, so `==` and `Hash` are the mathematical ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    field: PrimeField,
    ambient_dim: usize,
    basis: Vec<Vec<u32>>,
}

impl Subspace {
    pub fn zero(field: PrimeField, ambient_dim: usize) -> Self {
        Self {
            field,
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn full(field: PrimeField, ambient_dim: usize) -> Self {
        FpMatrix::identity(field, ambient_dim).rref().0
    }

    /// Span of arbitrary generators (each of length `ambient_dim`).
    pub fn span(field: PrimeField, ambient_dim: usize, gens: &[Vec<u32>]) -> Self {
        let mut rows: Vec<Vec<u32>> = gens
            .iter()
            .map(|g| {
                assert_eq!(g.len(), ambient_dim, "generator length");
                g.iter().map(|&x| x % field.p()).collect()
            })
            .collect();
        rref_rows(field, ambient_dim, &mut rows);
        Self {
            field,
            ambient_dim,
            basis: rows,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).expect("nonzero basis row"))
            .collect()
    }

    /// Basis as an `dim x ambient_dim` matrix.
    pub fn to_matrix(&self) -> FpMatrix {
        FpMatrix::from_vectors(self.field, self.ambient_dim, &self.basis)
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim || self.field != other.field {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of {}^{} and {}^{}",
                self.field, self.ambient_dim, other.field, other.ambient_dim
            )));
        }
        Ok(())
    }

    /// Remainder of `v` after reduction against the basis; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut r: Vec<u32> = v.iter().map(|&x| x % f.p()).collect();
        for (row, pc) in self.basis.iter().zip(self.pivots()) {
            let a = r[pc];
            if a == 0 {
                continue;
            }
            for (x, &y) in r.iter_mut().zip(row) {
                *x = f.sub(*x, f.mul(a, y));
            }
        }
        r
    }

    pub fn contains(&self, v: &[u32]) -> Result<bool> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in ambient {}",
                v.len(),
                self.ambient_dim
            )));
        }
        Ok(self.reduce(v).iter().all(|&x| x == 0))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(other
            .basis
            .iter()
            .all(|v| self.reduce(v).iter().all(|&x| x == 0)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let gens: Vec<Vec<u32>> = self.basis.iter().chain(&other.basis).cloned().collect();
        Ok(Subspace::span(self.field, self.ambient_dim, &gens))
    }

    /// Intersection by the Zassenhaus method: row-reduce `[s | s]` stacked on
    /// `[t | 0]`; rows with vanishing left half carry a basis of `S ∩ T`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let n = self.ambient_dim;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.field, n));
        }
        let mut rows: Vec<Vec<u32>> = Vec::with_capacity(self.dim() + other.dim());
        for s in &self.basis {
            let mut r = s.clone();
            r.extend_from_slice(s);
            rows.push(r);
        }
        for t in &other.basis {
            let mut r = t.clone();
            r.extend(std::iter::repeat(0).take(n));
            rows.push(r);
        }
        rref_rows(self.field, 2 * n, &mut rows);
        let gens: Vec<Vec<u32>> = rows
            .into_iter()
            .filter(|r| r[..n].iter().all(|&x| x == 0))
            .map(|r| r[n..].to_vec())
            .collect();
        Ok(Subspace::span(self.field, n, &gens))
    }

    /// `{x : <s, x> = 0 for all s}` under the bilinear form `<s, x> = s^T P x`.
    pub fn orthogonal(&self, pairing: &FpMatrix) -> Result<Subspace> {
        let n = self.ambient_dim;
        if pairing.rows() != n || pairing.cols() != n || pairing.field() != self.field {
            return Err(Error::DimensionMismatch(format!(
                "pairing {}x{} for ambient dimension {n}",
                pairing.rows(),
                pairing.cols()
            )));
        }
        let rank = pairing.rank();
        if rank < n {
            return Err(Error::DegeneratePairing { rank, size: n });
        }
        let forms = self.to_matrix().mul(pairing)?;
        Ok(forms.kernel())
    }

    /// Orthogonal complement for the standard dot product (dual bases).
    pub fn orthogonal_std(&self) -> Subspace {
        kernel_from_rref(self)
    }

    /// Linear functionals, in dual coordinates, whose common kernel is `self`.
    pub fn annihilator_forms(&self) -> Vec<Vec<u32>> {
        self.orthogonal_std().basis
    }
}

/// Incrementally grown span; keeps a reduced basis and accepts new vectors.
#[derive(Debug, Clone)]
pub struct SpanBuilder {
    field: PrimeField,
    ambient_dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl SpanBuilder {
    pub fn new(field: PrimeField, ambient_dim: usize) -> Self {
        Self {
            field,
            ambient_dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v`; returns true if the span grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let f = self.field;
        let mut r: Vec<u32> = v.iter().map(|&x| x % f.p()).collect();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let a = r[pc];
            if a != 0 {
                for (x, &y) in r.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(a, y));
                }
            }
        }
        let Some(pc) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(r[pc]);
        for x in r.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for row in self.rows.iter_mut() {
            let a = row[pc];
            if a != 0 {
                for (x, &y) in row.iter_mut().zip(&r) {
                    *x = f.sub(*x, f.mul(a, y));
                }
            }
        }
        self.rows.push(r);
        self.pivots.push(pc);
        true
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient_dim
    }

    pub fn finish(self) -> Subspace {
        Subspace::span(self.field, self.ambient_dim, &self.rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    fn e(n: usize, i: usize) -> Vec<u32> {
        let mut v = vec![0; n];
        v[i] = 1;
        v
    }

    #[test]
    fn sum_and_intersection_of_axes() {
        let s = Subspace::span(f3(), 3, &[e(3, 0)]);
        let t = Subspace::span(f3(), 3, &[e(3, 1)]);
        assert_eq!(s.sum(&t).unwrap().dim(), 2);
        assert_eq!(s.intersect(&t).unwrap().dim(), 0);
    }

    #[test]
    fn idempotence() {
        let s = Subspace::span(f3(), 4, &[vec![1, 2, 0, 1], vec![0, 1, 1, 1]]);
        assert_eq!(s.sum(&s).unwrap(), s);
        assert_eq!(s.intersect(&s).unwrap(), s);
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let s = Subspace::zero(f3(), 3);
        let t = Subspace::zero(f3(), 4);
        assert!(matches!(s.sum(&t), Err(Error::DimensionMismatch(_))));
        assert!(s.intersect(&t).is_err());
        assert!(s.contains(&[0, 0]).is_err());
    }

    #[test]
    fn orthogonal_of_axis() {
        let s = Subspace::span(f3(), 3, &[e(3, 0)]);
        let id = FpMatrix::identity(f3(), 3);
        let o = s.orthogonal(&id).unwrap();
        assert_eq!(o, Subspace::span(f3(), 3, &[e(3, 1), e(3, 2)]));
        assert_eq!(o, s.orthogonal_std());
        assert!(Subspace::full(f3(), 3).orthogonal(&id).unwrap().is_zero());
    }

    #[test]
    fn degenerate_pairing_rejected() {
        let s = Subspace::span(f3(), 2, &[e(2, 0)]);
        let bad = FpMatrix::from_rows(f3(), 2, &[[1, 1], [1, 1]]).unwrap();
        assert_eq!(
            s.orthogonal(&bad),
            Err(Error::DegeneratePairing { rank: 1, size: 2 })
        );
    }

    #[test]
    fn nonstandard_pairing() {
        // <s, x> = s^T P x with P swapping coordinates: e1-perp is <e1, e3>.
        let p = FpMatrix::from_rows(f3(), 3, &[[0, 1, 0], [1, 0, 0], [0, 0, 1]]).unwrap();
        let s = Subspace::span(f3(), 3, &[e(3, 0)]);
        assert_eq!(
            s.orthogonal(&p).unwrap(),
            Subspace::span(f3(), 3, &[e(3, 0), e(3, 2)])
        );
    }

    #[test]
    fn span_builder_matches_span() {
        let gens = vec![vec![1, 2, 0, 1], vec![2, 1, 0, 2], vec![0, 1, 1, 1], vec![1, 1, 2, 0]];
        let mut b = SpanBuilder::new(f3(), 4);
        let grew: Vec<bool> = gens.iter().map(|g| b.insert(g)).collect();
        assert_eq!(grew, vec![true, false, true, false]);
        assert_eq!(b.finish(), Subspace::span(f3(), 4, &gens));
    }
}
