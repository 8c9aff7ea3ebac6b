//! Exterior powers of F_p^n, their duals, and degree-4 tensors.
//!
//! Basis convention: Λ^k has basis `e_S` for the k-subsets `S = {s_1 < ... < s_k}`
//! of `{1..n}` listed in lexicographic order. The dual wedge basis `e_S^∨` of
//! Λ^k(U^∨) pairs with it by `<e_S^∨, e_T> = δ_{S,T}`, which is what the
//! determinant normalization `<f_1∧…∧f_k, v_1∧…∧v_k> = det(f_i(v_j))` gives.
//! So the duality pairing is the plain dot product of coefficient vectors and
//! orthogonal complements use the identity pairing matrix.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::PrimeField;
use crate::linalg::{FpMatrix, Subspace};

pub const MAX_DIM: usize = 16;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// The lexicographically ordered basis of Λ^k(F^n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExteriorBasis {
    n: usize,
    k: usize,
    masks: Vec<u32>,
    index: Vec<u32>,
}

fn push_subsets(n: usize, k: usize, start: usize, mask: u32, out: &mut Vec<u32>) {
    if k == 0 {
        out.push(mask);
        return;
    }
    for i in start..n {
        if n - i < k {
            break;
        }
        push_subsets(n, k - 1, i + 1, mask | (1 << i), out);
    }
}

impl ExteriorBasis {
    /// Degrees `k > n` give the zero space.
    pub fn new(n: usize, k: usize) -> Self {
        assert!(n <= MAX_DIM, "ambient dimension {n} exceeds {MAX_DIM}");
        let mut masks = Vec::with_capacity(binomial(n, k));
        if k <= n {
            push_subsets(n, k, 0, 0, &mut masks);
        }
        let mut index = vec![u32::MAX; 1 << n];
        for (i, &m) in masks.iter().enumerate() {
            index[m as usize] = i as u32;
        }
        Self { n, k, masks, index }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.masks.len()
    }

    pub fn mask(&self, i: usize) -> u32 {
        self.masks[i]
    }

    /// Zero-based increasing indices of the i-th basis element.
    pub fn subset(&self, i: usize) -> Vec<usize> {
        mask_to_indices(self.masks[i])
    }

    pub fn index_of_mask(&self, mask: u32) -> Option<usize> {
        match self.index.get(mask as usize) {
            Some(&i) if i != u32::MAX => Some(i as usize),
            _ => None,
        }
    }
}

fn mask_to_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Sign of `e_S ∧ e_T` relative to `e_{S∪T}`; `None` when `S ∩ T ≠ ∅`.
pub fn wedge_sign(s: u32, t: u32) -> Option<bool> {
    if s & t != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut rest = t;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (s >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(inversions % 2 == 1)
}

/// Sorts `indices`, returning the mask and whether the permutation was odd;
/// `None` on repeated indices.
pub fn sort_with_sign(indices: &[usize]) -> Option<(u32, bool)> {
    let mut v = indices.to_vec();
    let mut odd = false;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                odd = !odd;
            }
        }
    }
    let mut mask = 0u32;
    for &i in &v {
        if mask & (1 << i) != 0 {
            return None;
        }
        mask |= 1 << i;
    }
    Some((mask, odd))
}

/// An element of Λ^k(F_p^n) in the lexicographic wedge basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtVector {
    field: PrimeField,
    n: usize,
    k: usize,
    coeffs: Vec<u32>,
}

impl ExtVector {
    pub fn zero(field: PrimeField, n: usize, k: usize) -> Self {
        Self {
            field,
            n,
            k,
            coeffs: vec![0; binomial(n, k)],
        }
    }

    pub fn from_coeffs(field: PrimeField, n: usize, k: usize, coeffs: Vec<u32>) -> Result<Self> {
        if coeffs.len() != binomial(n, k) {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for Λ^{k} of dimension {}",
                coeffs.len(),
                binomial(n, k)
            )));
        }
        let coeffs = coeffs.into_iter().map(|x| x % field.p()).collect();
        Ok(Self {
            field,
            n,
            k,
            coeffs,
        })
    }

    /// Degree-1 element from a vector of F_p^n.
    pub fn from_vector(field: PrimeField, v: &[u32]) -> Self {
        Self {
            field,
            n: v.len(),
            k: 1,
            coeffs: v.iter().map(|&x| x % field.p()).collect(),
        }
    }

    /// `coeff * e_{i_1} ∧ … ∧ e_{i_k}` for zero-based indices in any order.
    pub fn monomial(field: PrimeField, n: usize, indices: &[usize], coeff: i64) -> Result<Self> {
        let k = indices.len();
        if indices.iter().any(|&i| i >= n) {
            return Err(Error::DimensionMismatch(format!("index out of range for n = {n}")));
        }
        let mut v = Self::zero(field, n, k);
        if let Some((mask, odd)) = sort_with_sign(indices) {
            let idx = ExteriorBasis::new(n, k).index_of_mask(mask).unwrap();
            let c = field.reduce(coeff);
            v.coeffs[idx] = if odd { field.neg(c) } else { c };
        }
        Ok(v)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u32> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&x| x == 0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.field != other.field {
            return Err(Error::DimensionMismatch(format!(
                "exterior vectors over n = {} and n = {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.k != other.k {
            return Err(Error::DimensionMismatch(format!(
                "adding degrees {} and {}",
                self.k, other.k
            )));
        }
        let f = self.field;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(Self {
            coeffs,
            ..self.clone()
        })
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = self.field;
        Self {
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c % f.p())).collect(),
            ..self.clone()
        }
    }

    /// Bilinear wedge product; degrees above `n` give the zero element of
    /// the (zero-dimensional) target.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let f = self.field;
        let n = self.n;
        let target = ExteriorBasis::new(n, self.k + other.k);
        let mut out = vec![0u32; target.dim()];
        if target.dim() > 0 {
            let a_basis = ExteriorBasis::new(n, self.k);
            let b_basis = ExteriorBasis::new(n, other.k);
            for (i, &a) in self.coeffs.iter().enumerate().filter(|(_, &a)| a != 0) {
                let s = a_basis.mask(i);
                for (j, &b) in other.coeffs.iter().enumerate().filter(|(_, &b)| b != 0) {
                    let t = b_basis.mask(j);
                    if let Some(odd) = wedge_sign(s, t) {
                        let idx = target.index_of_mask(s | t).unwrap();
                        let c = f.mul(a, b);
                        out[idx] = if odd { f.sub(out[idx], c) } else { f.add(out[idx], c) };
                    }
                }
            }
        }
        Ok(Self {
            field: f,
            n,
            k: self.k + other.k,
            coeffs: out,
        })
    }

    /// Duality pairing between Λ^k(U^∨) (`self`) and Λ^k(U) (`other`).
    pub fn pairing(&self, other: &Self) -> Result<u32> {
        self.check_same(other)?;
        if self.k != other.k {
            return Err(Error::DimensionMismatch(format!(
                "pairing degrees {} and {}",
                self.k, other.k
            )));
        }
        Ok(dot(self.field, &self.coeffs, &other.coeffs))
    }

    /// Canonical text form, e.g. `u[1,2,3] + 2*u[1,5,6] - u[3,4,5]`.
    pub fn render(&self, prefix: &str) -> String {
        render_coeffs(self.field, self.n, self.k, &self.coeffs, prefix)
    }
}

impl std::fmt::Display for ExtVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render("u"))
    }
}

pub fn dot(f: PrimeField, a: &[u32], b: &[u32]) -> u32 {
    let p = f.p() as u64;
    (a.iter().zip(b).map(|(&x, &y)| x as u64 * y as u64 % p).sum::<u64>() % p) as u32
}

/// Renders a coefficient vector of Λ^k with one-based indices. Coefficients
/// are printed in the symmetric range, `p - 1` as a leading minus sign.
pub fn render_coeffs(f: PrimeField, n: usize, k: usize, coeffs: &[u32], prefix: &str) -> String {
    let basis = ExteriorBasis::new(n, k);
    let mut out = String::new();
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let c = f.signed(c);
        let term: Vec<String> = basis.subset(i).iter().map(|j| (j + 1).to_string()).collect();
        let abs = c.unsigned_abs();
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0 { " - " } else { " + " });
        }
        if abs != 1 {
            let _ = write!(out, "{abs}*");
        }
        let _ = write!(out, "{prefix}[{}]", term.join(","));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// `{ω ∧ v : ω ∈ Λ^k}` as a subspace of Λ^{k+1}; it has dimension C(n-1, k).
pub fn flag_subspace(field: PrimeField, k: usize, v: &[u32]) -> Result<Subspace> {
    let n = v.len();
    if v.iter().all(|&x| x % field.p() == 0) {
        return Err(Error::InvalidArgument("flag_subspace needs a nonzero vector".into()));
    }
    let basis = ExteriorBasis::new(n, k);
    let v1 = ExtVector::from_vector(field, v);
    let gens: Vec<Vec<u32>> = (0..basis.dim())
        .map(|i| {
            let mut c = vec![0u32; basis.dim()];
            c[i] = 1;
            ExtVector::from_coeffs(field, n, k, c)
                .and_then(|w| w.wedge(&v1))
                .map(ExtVector::into_coeffs)
        })
        .collect::<Result<_>>()?;
    Ok(Subspace::span(field, binomial(n, k + 1), &gens))
}

/// Basis `{e_S · e_T : S <= T}` of the symmetric square S²(Λ²).
#[derive(Debug, Clone)]
pub struct Sym2Lambda2 {
    n: usize,
    lambda2: ExteriorBasis,
    pairs: Vec<(usize, usize)>,
}

impl Sym2Lambda2 {
    pub fn new(n: usize) -> Self {
        let lambda2 = ExteriorBasis::new(n, 2);
        let d = lambda2.dim();
        let pairs = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
        Self { n, lambda2, pairs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn lambda2(&self) -> &ExteriorBasis {
        &self.lambda2
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let d = self.lambda2.dim();
        i * d - i * i.saturating_sub(1) / 2 + (j - i)
    }

    /// Symmetric product `a · b` of two elements of Λ².
    pub fn product(&self, f: PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
        let d = self.lambda2.dim();
        assert!(a.len() == d && b.len() == d);
        let mut out = vec![0u32; self.dim()];
        for (s, &x) in a.iter().enumerate().filter(|(_, &x)| x != 0) {
            for (t, &y) in b.iter().enumerate().filter(|(_, &y)| y != 0) {
                let idx = self.index(s, t);
                out[idx] = f.add(out[idx], f.mul(x, y));
            }
        }
        out
    }
}

/// The multiplication map S²(Λ²U^∨) → Λ⁴U^∨ together with the symmetrized
/// generators `½(u∧v · w∧x + u∧w · v∧x)` over all basis 4-tuples.
#[derive(Debug, Clone)]
pub struct MultMap {
    pub field: PrimeField,
    pub n: usize,
    /// `dim Λ⁴ x dim S²(Λ²)`.
    pub matrix: FpMatrix,
    /// Distinct nonzero generators in S²(Λ²) coordinates.
    pub generators: Vec<Vec<u32>>,
}

pub fn mult_map_s2_l2_to_l4(field: PrimeField, n: usize) -> Result<MultMap> {
    if n < 2 {
        return Err(Error::InvalidArgument("mult map needs n >= 2".into()));
    }
    let s2 = Sym2Lambda2::new(n);
    let l2 = s2.lambda2();
    let l4 = ExteriorBasis::new(n, 4);
    let mut matrix = FpMatrix::zeros(field, l4.dim(), s2.dim());
    for (col, &(s, t)) in s2.pairs().iter().enumerate() {
        if let Some(odd) = wedge_sign(l2.mask(s), l2.mask(t)) {
            let row = l4.index_of_mask(l2.mask(s) | l2.mask(t)).unwrap();
            matrix.set(row, col, if odd { field.neg(1) } else { 1 });
        }
    }
    let half = field.half();
    let e2 = |a: usize, b: usize| -> Vec<u32> {
        ExtVector::monomial(field, n, &[a, b], 1).unwrap().into_coeffs()
    };
    let mut generators: Vec<Vec<u32>> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let x = s2.product(field, &e2(a, b), &e2(c, d));
                    let y = s2.product(field, &e2(a, c), &e2(b, d));
                    let g: Vec<u32> = x
                        .iter()
                        .zip(&y)
                        .map(|(&x, &y)| field.mul(half, field.add(x, y)))
                        .collect();
                    if g.iter().any(|&z| z != 0) && !generators.contains(&g) {
                        generators.push(g);
                    }
                }
            }
        }
    }
    Ok(MultMap {
        field,
        n,
        matrix,
        generators,
    })
}

/// An element of (F_p^n)^{⊗4}, indexed by `((a*n + b)*n + c)*n + d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TensorDeg4 {
    field: PrimeField,
    n: usize,
    coeffs: Vec<u32>,
}

impl TensorDeg4 {
    pub fn zero(field: PrimeField, n: usize) -> Self {
        Self {
            field,
            n,
            coeffs: vec![0; n.pow(4)],
        }
    }

    pub fn pure(field: PrimeField, factors: [&[u32]; 4]) -> Self {
        let n = factors[0].len();
        let mut t = Self::zero(field, n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let x = field.mul(
                            field.mul(factors[0][a], factors[1][b]),
                            field.mul(factors[2][c], factors[3][d]),
                        );
                        t.coeffs[((a * n + b) * n + c) * n + d] = x;
                    }
                }
            }
        }
        t
    }

    /// `e_a ⊗ e_b ⊗ e_c ⊗ e_d` with zero-based indices.
    pub fn basis(field: PrimeField, n: usize, idx: [usize; 4]) -> Self {
        let mut t = Self::zero(field, n);
        t.coeffs[((idx[0] * n + idx[1]) * n + idx[2]) * n + idx[3]] = 1;
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn get(&self, idx: [usize; 4]) -> u32 {
        let n = self.n;
        self.coeffs[((idx[0] * n + idx[1]) * n + idx[2]) * n + idx[3]]
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = self.field;
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = self.field;
        Self {
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
            ..self.clone()
        }
    }

    /// Permutation of tensor factors: `σ·(a_1⊗…⊗a_4) = a_{σ⁻¹(1)}⊗…⊗a_{σ⁻¹(4)}`,
    /// with `sigma` given zero-based (`sigma[i] = σ(i)`).
    pub fn permute(&self, sigma: [usize; 4]) -> Self {
        let n = self.n;
        let mut out = Self::zero(self.field, n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let i = [a, b, c, d];
                        let src = [i[sigma[0]], i[sigma[1]], i[sigma[2]], i[sigma[3]]];
                        out.coeffs[((a * n + b) * n + c) * n + d] = self.get(src);
                    }
                }
            }
        }
        out
    }
}

pub const SWAP_12: [usize; 4] = [1, 0, 2, 3];
pub const SWAP_34: [usize; 4] = [0, 1, 3, 2];
pub const SWAP_14: [usize; 4] = [3, 1, 2, 0];
pub const SWAP_23: [usize; 4] = [0, 2, 1, 3];
pub const SWAP_13: [usize; 4] = [2, 1, 0, 3];

fn compose(a: [usize; 4], b: [usize; 4]) -> [usize; 4] {
    [a[b[0]], a[b[1]], a[b[2]], a[b[3]]]
}

/// `λ ↦ Σ_{σ∈⟨(12),(34)⟩} ε(σ) σ(Σ_{σ'∈⟨(14),(23)⟩} σ'λ)`, whose image is S^□.
pub fn box_symmetrizer(t: &TensorDeg4) -> TensorDeg4 {
    let id = [0, 1, 2, 3];
    let plus = [id, SWAP_14, SWAP_23, compose(SWAP_14, SWAP_23)];
    let minus = [
        (id, false),
        (SWAP_12, true),
        (SWAP_34, true),
        (compose(SWAP_12, SWAP_34), false),
    ];
    let f = t.field;
    let mut sym = TensorDeg4::zero(f, t.n);
    for s in plus {
        sym = sym.add(&t.permute(s));
    }
    let mut out = TensorDeg4::zero(f, t.n);
    for (s, odd) in minus {
        let term = sym.permute(s);
        out = out.add(&if odd { term.scale(f.neg(1)) } else { term });
    }
    out
}

/// Image of `e_S · e_T` under S²(Λ²) → (⊗⁴) with `a∧b ↦ ½(a⊗b − b⊗a)` and
/// `x·y ↦ ½(x⊗y + y⊗x)`.
pub fn embed_sym2(field: PrimeField, s2: &Sym2Lambda2, x: &[u32]) -> TensorDeg4 {
    let n = s2.n();
    let l2 = s2.lambda2();
    let half = field.half();
    let iota = |i: usize| -> Vec<(usize, usize, u32)> {
        let s = l2.subset(i);
        vec![(s[0], s[1], half), (s[1], s[0], field.neg(half))]
    };
    let mut out = TensorDeg4::zero(field, n);
    for (col, &(s, t)) in s2.pairs().iter().enumerate() {
        let c = x[col];
        if c == 0 {
            continue;
        }
        let weight = if s == t { c } else { field.mul(c, half) };
        let orders: &[(usize, usize)] = if s == t { &[(s, t)] } else { &[(s, t), (t, s)] };
        for &(l, r) in orders {
            for &(a, b, x1) in &iota(l) {
                for &(cc, d, x2) in &iota(r) {
                    let idx = ((a * n + b) * n + cc) * n + d;
                    let v = field.mul(weight, field.mul(x1, x2));
                    out.coeffs[idx] = field.add(out.coeffs[idx], v);
                }
            }
        }
    }
    out
}

/// The sixteen-term expression for the image in (⊗⁴) of `u ⊗ vw ⊗ x`,
/// scaled by 1/16.
pub fn generator_tensor(field: PrimeField, u: &[u32], v: &[u32], w: &[u32], x: &[u32]) -> TensorDeg4 {
    let terms: [([&[u32]; 4], bool); 16] = [
        ([u, v, w, x], false),
        ([w, x, u, v], false),
        ([v, u, w, x], true),
        ([w, x, v, u], true),
        ([v, u, x, w], false),
        ([x, w, v, u], false),
        ([u, v, x, w], true),
        ([x, w, u, v], true),
        ([u, w, v, x], false),
        ([v, x, u, w], false),
        ([w, u, v, x], true),
        ([v, x, w, u], true),
        ([w, u, x, v], false),
        ([x, v, w, u], false),
        ([u, w, x, v], true),
        ([x, v, u, w], true),
    ];
    let n = u.len();
    let mut out = TensorDeg4::zero(field, n);
    for (factors, neg) in terms {
        let t = TensorDeg4::pure(field, factors);
        out = out.add(&if neg { t.scale(field.neg(1)) } else { t });
    }
    out.scale(field.inv(16 % field.p()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn e(n: usize, i: usize, p: u32) -> ExtVector {
        ExtVector::monomial(f(p), n, &[i], 1).unwrap()
    }

    #[test]
    fn lex_order() {
        let b = ExteriorBasis::new(4, 2);
        let subsets: Vec<Vec<usize>> = (0..b.dim()).map(|i| b.subset(i)).collect();
        assert_eq!(
            subsets,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(ExteriorBasis::new(2, 3).dim(), 0);
        assert_eq!(ExteriorBasis::new(3, 0).dim(), 1);
    }

    #[test]
    fn wedge_of_basis_vectors() {
        let e12 = e(3, 0, 3).wedge(&e(3, 1, 3)).unwrap();
        assert_eq!(e12.coeffs(), &[1, 0, 0]);
        let e21 = e(3, 1, 3).wedge(&e(3, 0, 3)).unwrap();
        assert_eq!(e21.coeffs(), &[2, 0, 0]);
        let s = e(3, 0, 3).add(&e(3, 1, 3)).unwrap();
        assert_eq!(s.wedge(&e(3, 1, 3)).unwrap(), e12);
    }

    #[test]
    fn wedge_above_top_degree_is_zero_space() {
        let a = ExtVector::monomial(f(3), 2, &[0, 1], 1).unwrap();
        let w = a.wedge(&e(2, 0, 3)).unwrap();
        assert_eq!(w.degree(), 3);
        assert!(w.coeffs().is_empty());
    }

    #[test]
    fn mismatched_n_rejected() {
        assert!(e(3, 0, 3).wedge(&e(4, 0, 3)).is_err());
    }

    #[test]
    fn pairing_dual_bases() {
        let d12 = ExtVector::monomial(f(3), 3, &[0, 1], 1).unwrap();
        let x13 = ExtVector::monomial(f(3), 3, &[0, 2], 1).unwrap();
        assert_eq!(d12.pairing(&d12).unwrap(), 1);
        assert_eq!(d12.pairing(&x13).unwrap(), 0);
        // f1 = e1 + e2, f2 = e2: det [[1,1],[0,1]] = 1
        let f1 = e(2, 0, 5).add(&e(2, 1, 5)).unwrap();
        let f2 = e(2, 1, 5);
        let v = e(2, 0, 5).wedge(&e(2, 1, 5)).unwrap();
        assert_eq!(f1.wedge(&f2).unwrap().pairing(&v).unwrap(), 1);
    }

    #[test]
    fn monomial_sorting_sign() {
        // u5∧u6∧u1 is an even permutation of u1∧u5∧u6
        let a = ExtVector::monomial(f(3), 6, &[4, 5, 0], 1).unwrap();
        let b = ExtVector::monomial(f(3), 6, &[0, 4, 5], 1).unwrap();
        assert_eq!(a, b);
        let c = ExtVector::monomial(f(3), 6, &[1, 0, 2], 1).unwrap();
        assert_eq!(c.render("u"), "-u[1,2,3]");
        assert!(ExtVector::monomial(f(3), 6, &[1, 1, 2], 1).unwrap().is_zero());
    }

    #[test]
    fn rendering() {
        let t = ExtVector::monomial(f(3), 6, &[0, 1, 2], 1)
            .unwrap()
            .add(&ExtVector::monomial(f(3), 6, &[2, 3, 4], 1).unwrap())
            .unwrap()
            .add(&ExtVector::monomial(f(3), 6, &[4, 5, 0], 1).unwrap())
            .unwrap();
        assert_eq!(t.render("u"), "u[1,2,3] + u[1,5,6] + u[3,4,5]");
        let z = ExtVector::zero(f(5), 4, 2);
        assert_eq!(z.render("u"), "0");
        let w = ExtVector::monomial(f(5), 4, &[0, 1], 2).unwrap().add(
            &ExtVector::monomial(f(5), 4, &[2, 3], -2).unwrap(),
        );
        assert_eq!(w.unwrap().render("u*"), "2*u*[1,2] - 2*u*[3,4]");
    }

    #[test]
    fn flag_subspace_examples() {
        let s = flag_subspace(f(3), 1, &[1, 0, 0]).unwrap();
        assert_eq!(s.dim(), 2);
        let e12 = ExtVector::monomial(f(3), 3, &[0, 1], 1).unwrap();
        let e13 = ExtVector::monomial(f(3), 3, &[0, 2], 1).unwrap();
        assert!(s.contains(e12.coeffs()).unwrap());
        assert!(s.contains(e13.coeffs()).unwrap());
        assert_eq!(flag_subspace(f(3), 2, &[0, 0, 0, 0, 0, 1]).unwrap().dim(), 10);
        assert!(flag_subspace(f(3), 2, &[0, 0, 0]).is_err());
    }

    #[test]
    fn sym2_indexing_is_dense() {
        let s2 = Sym2Lambda2::new(4);
        assert_eq!(s2.dim(), 21);
        for (k, &(i, j)) in s2.pairs().iter().enumerate() {
            assert_eq!(s2.index(i, j), k);
            assert_eq!(s2.index(j, i), k);
        }
    }

    #[test]
    fn mult_map_small_cases() {
        for (n, dim) in [(2, 1), (3, 6), (4, 21)] {
            let m = mult_map_s2_l2_to_l4(f(3), n).unwrap();
            assert_eq!(m.matrix.cols(), dim);
        }
        let m4 = mult_map_s2_l2_to_l4(f(3), 4).unwrap();
        assert_eq!(m4.matrix.rank(), 1);
        assert_eq!(m4.matrix.kernel().dim(), 20);
    }

    fn unit(n: usize, i: usize) -> Vec<u32> {
        let mut v = vec![0; n];
        v[i] = 1;
        v
    }

    fn tensor_span(ts: &[TensorDeg4]) -> Subspace {
        let n4 = ts[0].coeffs().len();
        let gens: Vec<Vec<u32>> = ts.iter().map(|t| t.coeffs().to_vec()).collect();
        Subspace::span(f(3), n4, &gens)
    }

    #[test]
    fn embedded_generators_match_sixteen_term_formula() {
        let n = 4;
        let field = f(3);
        let s2 = Sym2Lambda2::new(n);
        let half = field.half();
        for (a, b, c, d) in [(0, 1, 2, 3), (0, 0, 1, 2), (3, 1, 0, 2), (1, 2, 1, 0)] {
            let e2 = |x: usize, y: usize| ExtVector::monomial(field, n, &[x, y], 1).unwrap().into_coeffs();
            let g: Vec<u32> = s2
                .product(field, &e2(a, b), &e2(c, d))
                .iter()
                .zip(s2.product(field, &e2(a, c), &e2(b, d)))
                .map(|(&x, y)| field.mul(half, field.add(x, y)))
                .collect();
            let lhs = embed_sym2(field, &s2, &g);
            let rhs = generator_tensor(field, &unit(n, a), &unit(n, b), &unit(n, c), &unit(n, d));
            assert_eq!(lhs, rhs, "tuple {:?}", (a, b, c, d));
        }
    }

    #[test]
    fn box_image_has_kernel_dimension() {
        let field = f(3);
        for n in 2..=4 {
            let mm = mult_map_s2_l2_to_l4(field, n).unwrap();
            let s2 = Sym2Lambda2::new(n);
            let kernel = mm.matrix.kernel();
            let gen_span = Subspace::span(field, s2.dim(), &mm.generators);
            assert_eq!(gen_span, kernel, "n = {n}");
            let mut images = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            images.push(box_symmetrizer(&TensorDeg4::basis(field, n, [a, b, c, d])));
                        }
                    }
                }
            }
            let boxed = tensor_span(&images);
            let embedded: Vec<TensorDeg4> = kernel.basis().iter().map(|k| embed_sym2(field, &s2, k)).collect();
            let emb = tensor_span(&embedded);
            assert_eq!(boxed.dim(), kernel.dim(), "n = {n}");
            assert_eq!(emb, boxed, "n = {n}");
        }
    }

    #[test]
    fn generator_is_box_eigenvector() {
        let field = f(5);
        let n = 4;
        let t = generator_tensor(field, &unit(n, 0), &unit(n, 1), &unit(n, 2), &unit(n, 3));
        assert_ne!(t.permute(SWAP_13), t);
        assert_eq!(box_symmetrizer(&t), t.scale(2));
    }
}
