//! Central extensions `0 → V → G → U → 0` of exponent p built from an
//! alternating map `γ: Λ²U → V`.
//!
//! Elements are pairs `(u, v)` with multiplication
//! `(u1, v1)(u2, v2) = (u1 + u2, v1 + v2 + ½γ(u1∧u2))`, so that
//! `[(u1, v1), (u2, v2)] = (0, γ(u1∧u2))` and `(u, v)^k = (ku, kv)`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{binomial, ExteriorBasis};
use crate::fp::PrimeField;
use crate::guard::{pow_u128, Guard};
use crate::linalg::{FpMatrix, SpanBuilder};

pub const MAX_DIM_U: usize = 12;
pub const MAX_DIM_V: usize = 66;

/// One term `γ(u_i∧u_j) = Σ v[k]·v_k` of the JSON spec, indices one-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaTerm {
    pub i: usize,
    pub j: usize,
    pub v: Vec<i64>,
}

/// The on-disk spec format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub p: u64,
    #[serde(rename = "dimU")]
    pub dim_u: usize,
    #[serde(rename = "dimV")]
    pub dim_v: usize,
    #[serde(default)]
    pub gamma: Vec<GammaTerm>,
}

/// A validated (structurally) group description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpecFile", into = "SpecFile")]
pub struct GroupSpec {
    field: PrimeField,
    n: usize,
    m: usize,
    /// `m x C(n,2)`: column `(i,j)` is `γ(u_i∧u_j)`.
    gamma: FpMatrix,
}

impl TryFrom<SpecFile> for GroupSpec {
    type Error = Error;

    fn try_from(s: SpecFile) -> Result<Self> {
        if s.p == 2 {
            return Err(Error::EvenPrime);
        }
        if s.p > u32::MAX as u64 {
            return Err(Error::InvalidSpec(format!("p = {} is too large", s.p)));
        }
        let field = PrimeField::new(s.p as u32)?;
        if s.dim_u > MAX_DIM_U {
            return Err(Error::InvalidSpec(format!(
                "dimU = {} exceeds the supported maximum {MAX_DIM_U}",
                s.dim_u
            )));
        }
        if s.dim_v > MAX_DIM_V {
            return Err(Error::InvalidSpec(format!(
                "dimV = {} exceeds the supported maximum {MAX_DIM_V}",
                s.dim_v
            )));
        }
        let pairs = ExteriorBasis::new(s.dim_u, 2);
        let mut gamma = FpMatrix::zeros(field, s.dim_v, pairs.dim());
        let mut seen = BTreeSet::new();
        for (t, term) in s.gamma.iter().enumerate() {
            let t = t + 1;
            if term.i == 0 || term.j == 0 || term.i > s.dim_u || term.j > s.dim_u {
                return Err(Error::InvalidSpec(format!(
                    "gamma term {t}: indices must lie in 1..={}",
                    s.dim_u
                )));
            }
            if term.i >= term.j {
                return Err(Error::InvalidSpec(format!("gamma term {t}: i<j required")));
            }
            if term.v.len() != s.dim_v {
                return Err(Error::InvalidSpec(format!(
                    "gamma term {t}: v has length {}, expected dimV = {}",
                    term.v.len(),
                    s.dim_v
                )));
            }
            if let Some(bad) = term.v.iter().find(|&&x| x < 0 || x >= s.p as i64) {
                return Err(Error::InvalidSpec(format!(
                    "gamma term {t}: coefficient {bad} outside [0, {}]",
                    s.p - 1
                )));
            }
            if !seen.insert((term.i, term.j)) {
                return Err(Error::InvalidSpec(format!(
                    "gamma term {t}: duplicate pair ({}, {})",
                    term.i, term.j
                )));
            }
            let col = pairs
                .index_of_mask((1 << (term.i - 1)) | (1 << (term.j - 1)))
                .expect("valid pair");
            for (k, &x) in term.v.iter().enumerate() {
                gamma.set(k, col, x as u32);
            }
        }
        Ok(GroupSpec {
            field,
            n: s.dim_u,
            m: s.dim_v,
            gamma,
        })
    }
}

impl From<GroupSpec> for SpecFile {
    fn from(g: GroupSpec) -> Self {
        let pairs = ExteriorBasis::new(g.n, 2);
        let gamma = (0..pairs.dim())
            .filter_map(|c| {
                let v: Vec<i64> = (0..g.m).map(|k| g.gamma.get(k, c) as i64).collect();
                if v.iter().all(|&x| x == 0) {
                    return None;
                }
                let s = pairs.subset(c);
                Some(GammaTerm {
                    i: s[0] + 1,
                    j: s[1] + 1,
                    v,
                })
            })
            .collect();
        SpecFile {
            p: g.field.p() as u64,
            dim_u: g.n,
            dim_v: g.m,
            gamma,
        }
    }
}

/// Outcome of checking the structural hypotheses on γ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub p: u32,
    pub dim_u: usize,
    pub dim_v: usize,
    pub rank_gamma: usize,
    pub radical_dim: usize,
    pub surjective: bool,
    pub radical_trivial: bool,
}

impl ValidationReport {
    pub fn hypotheses_ok(&self) -> bool {
        self.surjective && self.radical_trivial
    }
}

/// An element `(u, v)` of G.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub u: Vec<u32>,
    pub v: Vec<u32>,
}

impl std::fmt::Display for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:?}, {:?})", self.u, self.v)
    }
}

impl GroupSpec {
    /// Builds a spec from a dense `m x C(n,2)` gamma matrix.
    pub fn new(field: PrimeField, n: usize, gamma: FpMatrix) -> Result<Self> {
        if n > MAX_DIM_U {
            return Err(Error::InvalidSpec(format!("dimU = {n} exceeds {MAX_DIM_U}")));
        }
        if gamma.cols() != binomial(n, 2) || gamma.field() != field {
            return Err(Error::DimensionMismatch(format!(
                "gamma has {} columns, expected C({n},2) = {}",
                gamma.cols(),
                binomial(n, 2)
            )));
        }
        if gamma.rows() > MAX_DIM_V {
            return Err(Error::InvalidSpec(format!("dimV exceeds {MAX_DIM_V}")));
        }
        Ok(Self {
            field,
            n,
            m: gamma.rows(),
            gamma,
        })
    }

    /// Builds a spec from one-based `(i, j, γ(u_i∧u_j))` entries.
    pub fn from_terms(p: u32, n: usize, m: usize, terms: &[(usize, usize, Vec<i64>)]) -> Result<Self> {
        let field = PrimeField::new(p)?;
        let gamma = terms
            .iter()
            .map(|(i, j, v)| GammaTerm {
                i: *i,
                j: *j,
                v: v.iter().map(|&x| field.reduce(x) as i64).collect(),
            })
            .collect();
        Self::try_from(SpecFile {
            p: p as u64,
            dim_u: n,
            dim_v: m,
            gamma,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpecFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        Self::try_from(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SpecFile::from(self.clone())).expect("spec serializes")
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn dim_u(&self) -> usize {
        self.n
    }

    pub fn dim_v(&self) -> usize {
        self.m
    }

    pub fn gamma(&self) -> &FpMatrix {
        &self.gamma
    }

    /// `log_p |G|`.
    pub fn log_order(&self) -> usize {
        self.n + self.m
    }

    /// `|G| = p^{n+m}`, saturating.
    pub fn order(&self) -> u128 {
        pow_u128(self.p() as u64, self.log_order() as u32)
    }

    /// `γ(a∧b)` for `a, b ∈ U`.
    pub fn gamma_apply(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let f = self.field;
        let pairs = ExteriorBasis::new(self.n, 2);
        let mut out = vec![0u32; self.m];
        for c in 0..pairs.dim() {
            let s = pairs.subset(c);
            let w = f.sub(f.mul(a[s[0]], b[s[1]]), f.mul(a[s[1]], b[s[0]]));
            if w == 0 {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                *o = f.add(*o, f.mul(w, self.gamma.get(k, c)));
            }
        }
        out
    }

    /// `γ^∨(ρ) = ρ∘γ` in Λ²U^∨ coordinates.
    pub fn gamma_dual(&self, rho: &[u32]) -> Vec<u32> {
        let f = self.field;
        (0..self.gamma.cols())
            .map(|c| {
                (0..self.m).fold(0, |acc, k| f.add(acc, f.mul(rho[k], self.gamma.get(k, c))))
            })
            .collect()
    }

    pub fn rank_gamma(&self) -> usize {
        self.gamma.rank()
    }

    /// Matrix whose kernel is the radical `{u : γ(u∧w) = 0 ∀w}`.
    fn radical_system(&self) -> FpMatrix {
        let f = self.field;
        let pairs = ExteriorBasis::new(self.n, 2);
        let mut sys = FpMatrix::zeros(f, self.n * self.m, self.n);
        for j in 0..self.n {
            for i in 0..self.n {
                if i == j {
                    continue;
                }
                let (a, b, neg) = if i < j { (i, j, false) } else { (j, i, true) };
                let c = pairs.index_of_mask((1 << a) | (1 << b)).unwrap();
                for k in 0..self.m {
                    let x = self.gamma.get(k, c);
                    sys.set(j * self.m + k, i, if neg { f.neg(x) } else { x });
                }
            }
        }
        sys
    }

    pub fn radical(&self) -> crate::linalg::Subspace {
        self.radical_system().kernel()
    }

    /// `(dim radical, dim [G,G])`.
    pub fn center_and_derived(&self) -> (usize, usize) {
        (self.radical().dim(), self.rank_gamma())
    }

    pub fn validate(&self, strict: bool) -> Result<ValidationReport> {
        let (radical_dim, rank) = self.center_and_derived();
        let report = ValidationReport {
            p: self.p(),
            dim_u: self.n,
            dim_v: self.m,
            rank_gamma: rank,
            radical_dim,
            surjective: rank == self.m,
            radical_trivial: radical_dim == 0,
        };
        if strict {
            if !report.surjective {
                return Err(Error::NotSurjective {
                    rank,
                    dim_v: self.m,
                });
            }
            if !report.radical_trivial {
                return Err(Error::NontrivialRadical(radical_dim));
            }
        }
        Ok(report)
    }

    /// Same group with U-basis relabelled: `u_i ↦ u_{perm[i]}`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidArgument("not a permutation of the U basis".into()));
        }
        let f = self.field;
        let pairs = ExteriorBasis::new(n, 2);
        let mut gamma = FpMatrix::zeros(f, self.m, pairs.dim());
        for c in 0..pairs.dim() {
            let s = pairs.subset(c);
            let (a, b) = (perm[s[0]], perm[s[1]]);
            let (lo, hi, neg) = if a < b { (a, b, false) } else { (b, a, true) };
            let c2 = pairs.index_of_mask((1 << lo) | (1 << hi)).unwrap();
            for k in 0..self.m {
                let x = self.gamma.get(k, c);
                gamma.set(k, c2, if neg { f.neg(x) } else { x });
            }
        }
        Self::new(f, n, gamma)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            u: vec![0; self.n],
            v: vec![0; self.m],
        }
    }

    /// The section `s(u) = (u, 0)`.
    pub fn section(&self, u: &[u32]) -> GroupElement {
        GroupElement {
            u: u.to_vec(),
            v: vec![0; self.m],
        }
    }

    fn check_element(&self, g: &GroupElement) -> Result<()> {
        if g.u.len() != self.n || g.v.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "element with |u| = {}, |v| = {} for dim U = {}, dim V = {}",
                g.u.len(),
                g.v.len(),
                self.n,
                self.m
            )));
        }
        Ok(())
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_element(a)?;
        self.check_element(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    fn mul_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let f = self.field;
        let half = f.half();
        let c = self.gamma_apply(&a.u, &b.u);
        GroupElement {
            u: a.u.iter().zip(&b.u).map(|(&x, &y)| f.add(x, y)).collect(),
            v: a
                .v
                .iter()
                .zip(&b.v)
                .zip(&c)
                .map(|((&x, &y), &z)| f.add(f.add(x, y), f.mul(half, z)))
                .collect(),
        }
    }

    pub fn inv(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check_element(g)?;
        let f = self.field;
        Ok(GroupElement {
            u: g.u.iter().map(|&x| f.neg(x)).collect(),
            v: g.v.iter().map(|&x| f.neg(x)).collect(),
        })
    }

    /// `g^k` for any integer `k`.
    pub fn pow(&self, g: &GroupElement, k: i64) -> Result<GroupElement> {
        self.check_element(g)?;
        let f = self.field;
        let k = f.reduce(k);
        Ok(GroupElement {
            u: g.u.iter().map(|&x| f.mul(x, k)).collect(),
            v: g.v.iter().map(|&x| f.mul(x, k)).collect(),
        })
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`, computed from the group law.
    pub fn commutator(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        let ab = self.mul(a, b)?;
        let ai = self.inv(a)?;
        let bi = self.inv(b)?;
        self.mul(&self.mul(&ab, &ai)?, &bi)
    }

    /// Position of `g` in the lexicographic enumeration of G.
    pub fn index_of(&self, g: &GroupElement) -> u64 {
        let p = self.p() as u64;
        g.u.iter().chain(&g.v).fold(0, |acc, &x| acc * p + x as u64)
    }

    pub fn element_at(&self, mut idx: u64) -> GroupElement {
        let p = self.p() as u64;
        let total = self.n + self.m;
        let mut digits = vec![0u32; total];
        for d in digits.iter_mut().rev() {
            *d = (idx % p) as u32;
            idx /= p;
        }
        let v = digits.split_off(self.n);
        GroupElement { u: digits, v }
    }

    /// All elements in lexicographic order of `(u, v)`.
    pub fn enumerate_elements(&self, guard: &Guard) -> Result<impl Iterator<Item = GroupElement> + '_> {
        let order = self.order();
        guard.check("enumerating group elements", order)?;
        Ok((0..order as u64).map(move |i| self.element_at(i)))
    }
}

/// Dense multiplication table over the lexicographic enumeration.
#[derive(Debug, Clone)]
pub struct GroupTable {
    spec: GroupSpec,
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl GroupTable {
    pub fn new(spec: &GroupSpec, guard: &Guard) -> Result<Self> {
        let order = spec.order();
        guard.check("group multiplication table", order.saturating_mul(order))?;
        let order = order as usize;
        let elems: Vec<GroupElement> = spec.enumerate_elements(guard)?.collect();
        let mut mul = vec![0u32; order * order];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                mul[i * order + j] = spec.index_of(&spec.mul_unchecked(a, b)) as u32;
            }
        }
        let inv = elems
            .iter()
            .map(|g| spec.index_of(&spec.inv(g).unwrap()) as u32)
            .collect();
        Ok(Self {
            spec: spec.clone(),
            order,
            mul,
            inv,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn element(&self, i: usize) -> GroupElement {
        self.spec.element_at(i as u64)
    }

    /// Index of `ḡ` in the enumeration of U.
    #[inline]
    pub fn u_index(&self, g: usize) -> usize {
        g / (self.spec.p() as usize).pow(self.spec.m as u32)
    }

    /// Index of the V-coordinate of `g` in the enumeration of V.
    #[inline]
    pub fn v_index(&self, g: usize) -> usize {
        g % (self.spec.p() as usize).pow(self.spec.m as u32)
    }
}

/// A named builtin spec.
#[derive(Debug, Clone, Copy)]
pub struct Builtin {
    pub name: &'static str,
    pub description: &'static str,
}

pub const BUILTINS: &[Builtin] = &[
    Builtin {
        name: "peyre6",
        description: "p=3, dim U=6, dim V=6: g(u1^u2)=v1, g(u4^u5)=-v1, g(u2^u3)=v2, \
                      g(u5^u6)=-v2, g(u1^u4)=v3, g(u2^u5)=v4, g(u3^u6)=v5, g(u4^u6)=v6",
    },
    Builtin {
        name: "heisenberg3",
        description: "Heisenberg group of order 27: p=3, dim U=2, dim V=1, g(u1^u2)=v1",
    },
    Builtin {
        name: "heisenberg5",
        description: "Heisenberg group of order 125: p=5, dim U=2, dim V=1, g(u1^u2)=v1",
    },
    Builtin {
        name: "cyclic3",
        description: "Z/3: p=3, dim U=1, dim V=0",
    },
    Builtin {
        name: "elem9",
        description: "(Z/3)^2: p=3, dim U=2, dim V=0",
    },
    Builtin {
        name: "elem27",
        description: "(Z/3)^3: p=3, dim U=3, dim V=0",
    },
];

pub fn builtin(name: &str) -> Result<GroupSpec> {
    let e = |k: usize, m: usize, c: i64| -> Vec<i64> {
        let mut v = vec![0; m];
        v[k - 1] = c;
        v
    };
    match name {
        "peyre6" => GroupSpec::from_terms(
            3,
            6,
            6,
            &[
                (1, 2, e(1, 6, 1)),
                (4, 5, e(1, 6, -1)),
                (2, 3, e(2, 6, 1)),
                (5, 6, e(2, 6, -1)),
                (1, 4, e(3, 6, 1)),
                (2, 5, e(4, 6, 1)),
                (3, 6, e(5, 6, 1)),
                (4, 6, e(6, 6, 1)),
            ],
        ),
        "heisenberg3" => GroupSpec::from_terms(3, 2, 1, &[(1, 2, vec![1])]),
        "heisenberg5" => GroupSpec::from_terms(5, 2, 1, &[(1, 2, vec![1])]),
        "cyclic3" => GroupSpec::from_terms(3, 1, 0, &[]),
        "elem9" => GroupSpec::from_terms(3, 2, 0, &[]),
        "elem27" => GroupSpec::from_terms(3, 3, 0, &[]),
        other => Err(Error::InvalidSpec(format!(
            "unknown builtin '{other}' (known: {})",
            BUILTINS.iter().map(|b| b.name).collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// Random γ of shape `m x C(n,2)` satisfying the strict hypotheses, or
/// `None` after `tries` rejections.
pub fn random_strict_spec<R: Rng>(rng: &mut R, p: u32, n: usize, m: usize, tries: usize) -> Option<GroupSpec> {
    let field = PrimeField::new(p).ok()?;
    let cols = binomial(n, 2);
    for _ in 0..tries {
        let mut gamma = FpMatrix::zeros(field, m, cols);
        for k in 0..m {
            for c in 0..cols {
                gamma.set(k, c, rng.gen_range(0..p));
            }
        }
        let spec = GroupSpec::new(field, n, gamma).ok()?;
        if spec.validate(true).is_ok() {
            return Some(spec);
        }
    }
    None
}

/// Exhaustive up to this order, sampled above it.
pub const EXHAUSTIVE_ORDER: u128 = 243;
pub const SAMPLE_COUNT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub cases: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Sampled { seed: u64, samples: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupVerification {
    pub order: String,
    pub mode: CheckMode,
    pub checks: Vec<CheckOutcome>,
}

impl GroupVerification {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

struct Checker {
    name: &'static str,
    cases: u64,
    counterexample: Option<String>,
}

impl Checker {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            name: self.name.to_string(),
            pass: self.counterexample.is_none(),
            cases: self.cases,
            counterexample: self.counterexample,
        }
    }
}

/// Group axioms, exponent, order, derived subgroup and center.
pub fn verify_group(spec: &GroupSpec, seed: u64, guard: &Guard) -> Result<GroupVerification> {
    let order = spec.order();
    if order <= EXHAUSTIVE_ORDER {
        verify_exhaustive(spec, guard)
    } else {
        verify_sampled(spec, seed)
    }
}

fn verify_exhaustive(spec: &GroupSpec, guard: &Guard) -> Result<GroupVerification> {
    let table = GroupTable::new(spec, guard)?;
    let n = table.order();
    let p = spec.p() as usize;
    let e = 0usize;
    let elems: Vec<GroupElement> = (0..n).map(|i| table.element(i)).collect();
    let mut checks = Vec::new();

    let mut assoc = Checker::new("associativity");
    for a in 0..n {
        for b in 0..n {
            let ab = table.mul(a, b);
            for c in 0..n {
                let ok = table.mul(ab, c) == table.mul(a, table.mul(b, c));
                assoc.record(ok, || format!("{} {} {}", elems[a], elems[b], elems[c]));
            }
        }
    }
    checks.push(assoc.finish());

    let mut ident = Checker::new("identity");
    let mut inverse = Checker::new("inverses");
    let mut exponent = Checker::new("exponent p");
    for a in 0..n {
        ident.record(table.mul(a, e) == a && table.mul(e, a) == a, || elems[a].to_string());
        let ai = table.inv(a);
        inverse.record(table.mul(a, ai) == e && table.mul(ai, a) == e, || elems[a].to_string());
        let mut x = e;
        for _ in 0..p {
            x = table.mul(x, a);
        }
        exponent.record(x == e, || elems[a].to_string());
    }
    checks.push(ident.finish());
    checks.push(inverse.finish());
    checks.push(exponent.finish());

    let mut count = Checker::new("order p^(n+m)");
    let distinct: BTreeSet<&GroupElement> = elems.iter().collect();
    count.record(distinct.len() as u128 == spec.order(), || {
        format!("{} distinct elements", distinct.len())
    });
    checks.push(count.finish());

    // [G,G]: central elements of exponent p, so the generated subgroup is the F_p-span
    let mut derived = Checker::new("[G,G] = im gamma");
    let mut comm_span = SpanBuilder::new(spec.field(), spec.dim_v());
    let mut commutators_central = true;
    for a in 0..n {
        for b in 0..n {
            let c = table.mul(table.mul(table.mul(a, b), table.inv(a)), table.inv(b));
            let g = &elems[c];
            if g.u.iter().any(|&x| x != 0) {
                commutators_central = false;
            }
            comm_span.insert(&g.v);
        }
    }
    let im_gamma = spec.gamma().transpose().rref().0;
    let comm = comm_span.finish();
    derived.record(commutators_central && comm == im_gamma, || {
        format!("commutator span dim {} vs rank gamma {}", comm.dim(), im_gamma.dim())
    });
    checks.push(derived.finish());

    let mut center = Checker::new("Z(G) = radical + V");
    let radical = spec.radical();
    let mut center_size = 0u128;
    let mut mismatch = None;
    for a in 0..n {
        let central = (0..n).all(|b| table.mul(a, b) == table.mul(b, a));
        if central {
            center_size += 1;
        }
        let predicted = radical.contains(&elems[a].u).unwrap_or(false);
        if central != predicted && mismatch.is_none() {
            mismatch = Some(a);
        }
    }
    let expected = pow_u128(spec.p() as u64, (radical.dim() + spec.dim_v()) as u32);
    center.record(mismatch.is_none() && center_size == expected, || match mismatch {
        Some(a) => format!("{} misclassified", elems[a]),
        None => format!("|Z(G)| = {center_size}, expected {expected}"),
    });
    checks.push(center.finish());

    Ok(GroupVerification {
        order: spec.order().to_string(),
        mode: CheckMode::Exhaustive,
        checks,
    })
}

fn verify_sampled(spec: &GroupSpec, seed: u64) -> Result<GroupVerification> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = spec.p();
    let random = |rng: &mut ChaCha8Rng| GroupElement {
        u: (0..spec.dim_u()).map(|_| rng.gen_range(0..p)).collect(),
        v: (0..spec.dim_v()).map(|_| rng.gen_range(0..p)).collect(),
    };
    let e = spec.identity();
    let mut assoc = Checker::new("associativity");
    let mut ident = Checker::new("identity");
    let mut inverse = Checker::new("inverses");
    let mut exponent = Checker::new("exponent p");
    let mut derived = Checker::new("[G,G] = im gamma");
    let mut center = Checker::new("Z(G) = radical + V");
    let radical_basis = spec.radical().basis().to_vec();
    for _ in 0..SAMPLE_COUNT {
        let (a, b, c) = (random(&mut rng), random(&mut rng), random(&mut rng));
        let lhs = spec.mul(&spec.mul(&a, &b)?, &c)?;
        let rhs = spec.mul(&a, &spec.mul(&b, &c)?)?;
        assoc.record(lhs == rhs, || format!("{a} {b} {c}"));
        ident.record(spec.mul(&a, &e)? == a && spec.mul(&e, &a)? == a, || a.to_string());
        let ai = spec.inv(&a)?;
        inverse.record(spec.mul(&a, &ai)? == e, || a.to_string());
        let mut x = e.clone();
        for _ in 0..p {
            x = spec.mul(&x, &a)?;
        }
        exponent.record(x == e, || a.to_string());
        let comm = spec.commutator(&a, &b)?;
        let predicted = GroupElement {
            u: vec![0; spec.dim_u()],
            v: spec.gamma_apply(&a.u, &b.u),
        };
        derived.record(comm == predicted, || format!("[{a}, {b}] = {comm}"));
        let mut z = GroupElement {
            u: vec![0; spec.dim_u()],
            v: b.v.clone(),
        };
        for r in &radical_basis {
            let c = rng.gen_range(0..p);
            for (x, &y) in z.u.iter_mut().zip(r) {
                *x = spec.field().add(*x, spec.field().mul(c, y));
            }
        }
        center.record(spec.mul(&z, &a)? == spec.mul(&a, &z)?, || format!("{z} {a}"));
    }
    let mut count = Checker::new("order p^(n+m)");
    count.record(spec.order() == pow_u128(p as u64, spec.log_order() as u32), String::new);
    Ok(GroupVerification {
        order: spec.order().to_string(),
        mode: CheckMode::Sampled {
            seed,
            samples: SAMPLE_COUNT,
        },
        checks: vec![
            assoc.finish(),
            ident.finish(),
            inverse.finish(),
            exponent.finish(),
            count.finish(),
            derived.finish(),
            center.finish(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heis() -> GroupSpec {
        builtin("heisenberg3").unwrap()
    }

    #[test]
    fn heisenberg_is_valid() {
        let r = heis().validate(true).unwrap();
        assert_eq!(r.radical_dim, 0);
        assert_eq!(r.rank_gamma, 1);
    }

    #[test]
    fn zero_gamma_is_not_surjective() {
        let s = GroupSpec::from_terms(3, 2, 1, &[]).unwrap();
        assert_eq!(s.validate(true), Err(Error::NotSurjective { rank: 0, dim_v: 1 }));
        assert!(s.validate(false).is_ok());
    }

    #[test]
    fn unused_basis_vector_gives_radical() {
        let s = GroupSpec::from_terms(3, 3, 1, &[(1, 2, vec![1])]).unwrap();
        assert_eq!(s.center_and_derived(), (1, 1));
        assert_eq!(s.validate(true), Err(Error::NontrivialRadical(1)));
    }

    #[test]
    fn even_and_composite_primes() {
        let json = r#"{"p":2,"dimU":2,"dimV":1,"gamma":[]}"#;
        assert_eq!(GroupSpec::from_json(json), Err(Error::EvenPrime));
        let json = r#"{"p":9,"dimU":2,"dimV":1,"gamma":[]}"#;
        assert_eq!(GroupSpec::from_json(json), Err(Error::NotPrime(9)));
    }

    #[test]
    fn malformed_terms_name_the_term() {
        let json = r#"{"p":3,"dimU":3,"dimV":1,"gamma":[
            {"i":1,"j":2,"v":[1]},{"i":1,"j":3,"v":[1]},{"i":2,"j":3,"v":[1]},{"i":2,"j":2,"v":[1]}]}"#;
        assert_eq!(
            GroupSpec::from_json(json).unwrap_err().to_string(),
            "invalid spec: gamma term 4: i<j required"
        );
        let dup = r#"{"p":3,"dimU":3,"dimV":1,"gamma":[{"i":1,"j":2,"v":[1]},{"i":1,"j":2,"v":[2]}]}"#;
        assert!(GroupSpec::from_json(dup).unwrap_err().to_string().contains("duplicate"));
        let len = r#"{"p":3,"dimU":3,"dimV":2,"gamma":[{"i":1,"j":2,"v":[1]}]}"#;
        assert!(GroupSpec::from_json(len).unwrap_err().to_string().contains("length"));
        let range = r#"{"p":3,"dimU":3,"dimV":1,"gamma":[{"i":1,"j":2,"v":[3]}]}"#;
        assert!(GroupSpec::from_json(range).is_err());
        let idx = r#"{"p":3,"dimU":3,"dimV":1,"gamma":[{"i":1,"j":4,"v":[1]}]}"#;
        assert!(GroupSpec::from_json(idx).is_err());
        assert!(GroupSpec::from_json("{").is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = builtin("peyre6").unwrap();
        assert_eq!(GroupSpec::from_json(&s.to_json()).unwrap(), s);
        let via_serde: GroupSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(via_serde, s);
    }

    #[test]
    fn heisenberg_commutator() {
        let g = heis();
        let a = g.section(&[1, 0]);
        let b = g.section(&[0, 1]);
        let c = g.commutator(&a, &b).unwrap();
        assert_eq!(c, GroupElement { u: vec![0, 0], v: vec![1] });
    }

    #[test]
    fn powers_and_exponent() {
        let g = builtin("peyre6").unwrap();
        let x = GroupElement {
            u: vec![1, 2, 0, 1, 1, 2],
            v: vec![2, 0, 1, 1, 0, 0],
        };
        let mut acc = g.identity();
        for k in 1..=3 {
            acc = g.mul(&acc, &x).unwrap();
            assert_eq!(acc, g.pow(&x, k).unwrap());
        }
        assert_eq!(acc, g.identity());
    }

    #[test]
    fn worked_example_products() {
        let g = builtin("peyre6").unwrap();
        let mut e1 = vec![0; 6];
        e1[0] = 1;
        let mut e2 = vec![0; 6];
        e2[1] = 1;
        let half = g.field().half();
        let ab = g.mul(&g.section(&e1), &g.section(&e2)).unwrap();
        let ba = g.mul(&g.section(&e2), &g.section(&e1)).unwrap();
        assert_eq!(ab.u, vec![1, 1, 0, 0, 0, 0]);
        assert_eq!(ab.v, vec![half, 0, 0, 0, 0, 0]);
        assert_eq!(ba.v, vec![g.field().neg(half), 0, 0, 0, 0, 0]);
        let q = g.mul(&ab, &g.inv(&ba).unwrap()).unwrap();
        assert_eq!(q, GroupElement { u: vec![0; 6], v: vec![1, 0, 0, 0, 0, 0] });
    }

    #[test]
    fn worked_example_radical_by_enumeration() {
        let g = builtin("peyre6").unwrap();
        assert_eq!(g.center_and_derived(), (0, 6));
        // enumerate all u in U and test γ(u∧e_j) = 0 for every j
        let mut zero_count = 0;
        for idx in 0..3u64.pow(6) {
            let mut u = vec![0u32; 6];
            let mut x = idx;
            for c in u.iter_mut() {
                *c = (x % 3) as u32;
                x /= 3;
            }
            let in_radical = (0..6).all(|j| {
                let mut e = vec![0; 6];
                e[j] = 1;
                g.gamma_apply(&u, &e).iter().all(|&y| y == 0)
            });
            if in_radical {
                zero_count += 1;
            }
        }
        assert_eq!(zero_count, 1);
    }

    #[test]
    fn enumeration() {
        let guard = Guard::default();
        assert_eq!(heis().enumerate_elements(&guard).unwrap().count(), 27);
        let elem9 = builtin("elem9").unwrap();
        let elems: Vec<_> = elem9.enumerate_elements(&guard).unwrap().collect();
        assert_eq!(elems.len(), 9);
        assert!(elems.windows(2).all(|w| w[0] < w[1]));
        let small = Guard::new(100_000);
        let worked = builtin("peyre6").unwrap();
        assert!(matches!(
            worked.enumerate_elements(&small),
            Err(Error::GuardExceeded { required: 531441, .. })
        ));
    }

    #[test]
    fn index_round_trip() {
        let g = heis();
        for i in 0..27 {
            assert_eq!(g.index_of(&g.element_at(i)), i);
        }
        assert_eq!(g.element_at(0), g.identity());
    }

    #[test]
    fn verify_small_groups_exhaustively() {
        for name in ["heisenberg3", "elem9", "elem27", "cyclic3"] {
            let r = verify_group(&builtin(name).unwrap(), 0, &Guard::default()).unwrap();
            assert_eq!(r.mode, CheckMode::Exhaustive);
            assert!(r.pass(), "{name}: {r:?}");
        }
    }

    #[test]
    fn verify_worked_example_sampled() {
        let r = verify_group(&builtin("peyre6").unwrap(), 7, &Guard::default()).unwrap();
        assert!(matches!(r.mode, CheckMode::Sampled { seed: 7, .. }));
        assert!(r.pass());
    }

    #[test]
    fn permuted_spec_has_same_invariants() {
        let g = builtin("peyre6").unwrap();
        let h = g.permuted(&[5, 3, 1, 0, 2, 4]).unwrap();
        assert_eq!(h.center_and_derived(), g.center_and_derived());
        assert!(g.permuted(&[0, 0, 1, 2, 3, 4]).is_err());
    }
}
