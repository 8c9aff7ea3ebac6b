//! Inhomogeneous cochains on G with values in `(1/p)Z/Z ⊂ Q/Z` and checks of
//! the coboundary identities used for the degree-3 obstruction.
//!
//! A value is stored as its numerator in `Z/p`. Tuples `(g_1, …, g_d)` are
//! indexed lexicographically with `g_1` most significant, using the element
//! order of [`GroupTable`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{mult_map_s2_l2_to_l4, ExteriorBasis, TensorDeg4, SWAP_13, SWAP_23};
use crate::fp::PrimeField;
use crate::group::{GroupSpec, GroupTable};
use crate::guard::{pow_u128, Guard};
use crate::linalg::zpk::elementary_divisors_guarded;
use crate::linalg::{Subspace, ZpkMatrix};
use crate::obstruction::projective_lines;

/// An element `numerator/p` of `(1/p)Z/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorsionValue {
    pub numerator: u32,
    pub p: u32,
}

impl std::fmt::Display for TorsionValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.numerator == 0 {
            f.write_str("0")
        } else {
            write!(f, "{}/{}", self.numerator, self.p)
        }
    }
}

/// A dense cochain `G^d → (1/p)Z/Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    field: PrimeField,
    group_order: usize,
    degree: usize,
    values: Vec<u32>,
}

fn decode(mut idx: u64, n: u64, out: &mut [usize]) {
    for g in out.iter_mut().rev() {
        *g = (idx % n) as usize;
        idx /= n;
    }
}

fn encode(tuple: impl IntoIterator<Item = usize>, n: usize) -> usize {
    tuple.into_iter().fold(0, |acc, g| acc * n + g)
}

impl Cochain {
    /// Tabulates `f` over all `d`-tuples.
    pub fn from_fn<F>(table: &GroupTable, degree: usize, guard: &Guard, f: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> u32 + Sync,
    {
        let n = table.order();
        let size = pow_u128(n as u64, degree as u32);
        guard.check("cochain table", size)?;
        let field = table.spec().field();
        let values = (0..size as u64)
            .into_par_iter()
            .map_init(
                || vec![0usize; degree],
                |buf, idx| {
                    decode(idx, n as u64, buf);
                    f(buf) % field.p()
                },
            )
            .collect();
        Ok(Self {
            field,
            group_order: n,
            degree,
            values,
        })
    }

    pub fn zero(table: &GroupTable, degree: usize, guard: &Guard) -> Result<Self> {
        Self::from_fn(table, degree, guard, |_| 0)
    }

    /// Uniformly random values from a seeded generator.
    pub fn random(table: &GroupTable, degree: usize, seed: u64, guard: &Guard) -> Result<Self> {
        let n = table.order();
        let size = pow_u128(n as u64, degree as u32);
        guard.check("cochain table", size)?;
        let field = table.spec().field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..size).map(|_| rng.gen_range(0..field.p())).collect();
        Ok(Self {
            field,
            group_order: n,
            degree,
            values,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn value(&self, tuple: &[usize]) -> TorsionValue {
        TorsionValue {
            numerator: self.values[encode(tuple.iter().copied(), self.group_order)],
            p: self.field.p(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0)
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        if self.degree != other.degree || self.group_order != other.group_order {
            return Err(Error::DimensionMismatch("cochains of different shape".into()));
        }
        let f = self.field;
        Ok(Cochain {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
            ..self.clone()
        })
    }

    pub fn scale(&self, c: u32) -> Cochain {
        let f = self.field;
        Cochain {
            values: self.values.iter().map(|&a| f.mul(a, c)).collect(),
            ..self.clone()
        }
    }

    /// First tuple (in index order) where the two cochains differ.
    pub fn first_difference(&self, other: &Cochain) -> Option<Vec<usize>> {
        let pos = self.values.iter().zip(&other.values).position(|(a, b)| a != b)?;
        let mut t = vec![0; self.degree];
        decode(pos as u64, self.group_order as u64, &mut t);
        Some(t)
    }
}

/// `(δf)(g_1..g_{d+1}) = f(g_2..) + Σ_i (−1)^i f(.., g_i g_{i+1}, ..) + (−1)^{d+1} f(g_1..g_d)`.
#[inline]
fn coboundary_at(table: &GroupTable, f: &Cochain, g: &[usize], scratch: &mut Vec<usize>) -> u32 {
    let fp = f.field;
    let n = table.order();
    let d = f.degree;
    let mut acc = f.values[encode(g[1..].iter().copied(), n)];
    for i in 0..d {
        scratch.clear();
        scratch.extend_from_slice(&g[..i]);
        scratch.push(table.mul(g[i], g[i + 1]));
        scratch.extend_from_slice(&g[i + 2..]);
        let x = f.values[encode(scratch.iter().copied(), n)];
        acc = if i % 2 == 0 { fp.sub(acc, x) } else { fp.add(acc, x) };
    }
    let last = f.values[encode(g[..d].iter().copied(), n)];
    if d % 2 == 0 {
        fp.sub(acc, last)
    } else {
        fp.add(acc, last)
    }
}

pub fn coboundary(table: &GroupTable, f: &Cochain, guard: &Guard) -> Result<Cochain> {
    if f.group_order != table.order() {
        return Err(Error::DimensionMismatch("cochain on a different group".into()));
    }
    Cochain::from_fn(table, f.degree + 1, guard, |g| {
        let mut scratch = Vec::with_capacity(g.len());
        coboundary_at(table, f, g, &mut scratch)
    })
}

/// Named cochains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NamedCochain {
    /// `(g1,g2,g3) ↦ ½ ρ(v(g1)) λ(ḡ2∧ḡ3)`, `ρ ∈ V^∨`, `λ ∈ Λ²U^∨`.
    FRhoLambda { rho: Vec<u32>, lambda: Vec<u32> },
    /// `g ↦ ρ(v(g))`.
    HRho { rho: Vec<u32> },
    /// `(g1,g2,g3) ↦ u(ḡ1) v(ḡ2) w(ḡ2) x(ḡ3)`.
    Tau23([Vec<u32>; 4]),
    /// `u(ḡ1)v(ḡ2)w(ḡ2)x(ḡ3) + u(ḡ1)w(ḡ1)v(ḡ2)x(ḡ3) + w(ḡ1)v(ḡ2)u(ḡ2)x(ḡ3)`.
    Tau13([Vec<u32>; 4]),
    /// `(g1..g4) ↦ Σ T_{abcd} ḡ1_a ḡ2_b ḡ3_c ḡ4_d`.
    Mu(TensorDeg4),
}

/// Values `ḡ ↦ ℓ(ḡ)` of a linear form on U, indexed by U-index.
fn form_on_u(spec: &GroupSpec, form: &[u32]) -> Vec<u32> {
    let f = spec.field();
    let p = f.p() as u64;
    let n = spec.dim_u();
    (0..p.pow(n as u32))
        .map(|mut idx| {
            let mut acc = 0;
            for i in (0..n).rev() {
                acc = f.add(acc, f.mul(form[i], (idx % p) as u32));
                idx /= p;
            }
            acc
        })
        .collect()
}

/// Values of `λ(a∧b)` indexed by `(U-index a, U-index b)`.
fn bivector_form_on_u(spec: &GroupSpec, lambda: &[u32]) -> Vec<u32> {
    let f = spec.field();
    let n = spec.dim_u();
    let q = (f.p() as usize).pow(n as u32);
    let pairs = ExteriorBasis::new(n, 2);
    let coords: Vec<Vec<u32>> = (0..q).map(|i| u_coords(spec, i)).collect();
    let mut out = vec![0u32; q * q];
    for a in 0..q {
        for b in 0..q {
            let (x, y) = (&coords[a], &coords[b]);
            let mut acc = 0;
            for c in 0..pairs.dim() {
                if lambda[c] == 0 {
                    continue;
                }
                let s = pairs.subset(c);
                let w = f.sub(f.mul(x[s[0]], y[s[1]]), f.mul(x[s[1]], y[s[0]]));
                acc = f.add(acc, f.mul(lambda[c], w));
            }
            out[a * q + b] = acc;
        }
    }
    out
}

fn u_coords(spec: &GroupSpec, mut idx: usize) -> Vec<u32> {
    let p = spec.p() as usize;
    let mut u = vec![0u32; spec.dim_u()];
    for c in u.iter_mut().rev() {
        *c = (idx % p) as u32;
        idx /= p;
    }
    u
}

fn v_values(table: &GroupTable, rho: &[u32]) -> Vec<u32> {
    let spec = table.spec();
    let f = spec.field();
    (0..table.order())
        .map(|g| {
            let v = table.element(g).v;
            v.iter().zip(rho).fold(0, |acc, (&x, &r)| f.add(acc, f.mul(x, r)))
        })
        .collect()
}

fn check_len(what: &str, v: &[u32], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch(format!(
            "{what} has {} coordinates, expected {expected}",
            v.len()
        )));
    }
    Ok(())
}

pub fn build_named(table: &GroupTable, kind: &NamedCochain, guard: &Guard) -> Result<Cochain> {
    let spec = table.spec();
    let f = spec.field();
    let n = spec.dim_u();
    match kind {
        NamedCochain::FRhoLambda { rho, lambda } => {
            check_len("rho", rho, spec.dim_v())?;
            check_len("lambda", lambda, ExteriorBasis::new(n, 2).dim())?;
            let rv = v_values(table, rho);
            let lam = bivector_form_on_u(spec, lambda);
            let q = (f.p() as usize).pow(n as u32);
            let half = f.half();
            Cochain::from_fn(table, 3, guard, |g| {
                let l = lam[table.u_index(g[1]) * q + table.u_index(g[2])];
                f.mul(half, f.mul(rv[g[0]], l))
            })
        }
        NamedCochain::HRho { rho } => {
            check_len("rho", rho, spec.dim_v())?;
            let rv = v_values(table, rho);
            Cochain::from_fn(table, 1, guard, |g| rv[g[0]])
        }
        NamedCochain::Tau23(forms) | NamedCochain::Tau13(forms) => {
            for form in forms {
                check_len("linear form", form, n)?;
            }
            let [u, v, w, x] = [0, 1, 2, 3].map(|i| form_on_u(spec, &forms[i]));
            let tau13 = matches!(kind, NamedCochain::Tau13(_));
            Cochain::from_fn(table, 3, guard, |g| {
                let [a, b, c] = [0, 1, 2].map(|i| table.u_index(g[i]));
                let base = f.mul(f.mul(u[a], v[b]), f.mul(w[b], x[c]));
                if !tau13 {
                    return base;
                }
                let t2 = f.mul(f.mul(u[a], w[a]), f.mul(v[b], x[c]));
                let t3 = f.mul(f.mul(w[a], v[b]), f.mul(u[b], x[c]));
                f.add(base, f.add(t2, t3))
            })
        }
        NamedCochain::Mu(t) => {
            if t.n() != n {
                return Err(Error::DimensionMismatch(format!(
                    "tensor over n = {}, spec has dim U = {n}",
                    t.n()
                )));
            }
            let q = (f.p() as usize).pow(n as u32);
            let coords: Vec<Vec<u32>> = (0..q).map(|i| u_coords(spec, i)).collect();
            let support: Vec<([usize; 4], u32)> = (0..n.pow(4))
                .filter_map(|i| {
                    let idx = [i / (n * n * n), (i / (n * n)) % n, (i / n) % n, i % n];
                    let c = t.get(idx);
                    (c != 0).then_some((idx, c))
                })
                .collect();
            Cochain::from_fn(table, 4, guard, |g| {
                let us = [0, 1, 2, 3].map(|i| &coords[table.u_index(g[i])]);
                support.iter().fold(0, |acc, (idx, c)| {
                    let prod = (0..4).fold(*c, |p, k| f.mul(p, us[k][idx[k]]));
                    f.add(acc, prod)
                })
            })
        }
    }
}

/// The checks run by [`verify_identity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    DeltaSquared,
    Dh,
    Df,
    TauSquares,
    TauAgree,
    SsquareKernel,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::DeltaSquared,
        Identity::Dh,
        Identity::Df,
        Identity::TauSquares,
        Identity::TauAgree,
        Identity::SsquareKernel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::DeltaSquared => "delta_squared",
            Identity::Dh => "dh",
            Identity::Df => "df",
            Identity::TauSquares => "tau_squares",
            Identity::TauAgree => "tau_agree",
            Identity::SsquareKernel => "ssquare_kernel",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationResult {
    pub identity: Identity,
    pub status: Status,
    /// Number of tuple evaluations (or linear-algebra cases) checked.
    pub cases: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl VerificationResult {
    pub fn pass(&self) -> bool {
        self.status != Status::Fail
    }

    fn outcome(identity: Identity, cases: u64, counterexample: Option<String>) -> Self {
        Self {
            identity,
            status: if counterexample.is_some() {
                Status::Fail
            } else {
                Status::Pass
            },
            cases,
            detail: counterexample,
        }
    }

    fn skipped(identity: Identity, reason: &str) -> Self {
        Self {
            identity,
            status: Status::Skipped,
            cases: 0,
            detail: Some(format!("skipped: {reason}")),
        }
    }
}

/// Options for [`verify_identity`].
#[derive(Debug, Clone, Copy)]
pub struct LabOptions {
    pub seed: u64,
    pub guard: Guard,
}

impl Default for LabOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            guard: Guard::default(),
        }
    }
}

fn render_tuple(table: &GroupTable, g: &[usize]) -> String {
    let parts: Vec<String> = g.iter().map(|&x| table.element(x).to_string()).collect();
    format!("({})", parts.join(", "))
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Lexicographically first `arity`-tuple failing `ok`, scanning in parallel.
fn first_failure<F>(order: usize, arity: usize, ok: F) -> Option<Vec<usize>>
where
    F: Fn(&[usize]) -> bool + Sync,
{
    let total = (order as u64).pow(arity as u32);
    (0..total).into_par_iter().find_map_first(|idx| {
        let mut g = vec![0usize; arity];
        decode(idx, order as u64, &mut g);
        (!ok(&g)).then_some(g)
    })
}

/// The abelian group U realized as a spec with `dim V = 0`.
pub fn quotient_spec(spec: &GroupSpec) -> Result<GroupSpec> {
    GroupSpec::from_terms(spec.p(), spec.dim_u(), 0, &[])
}

pub fn verify_identity(spec: &GroupSpec, which: Identity, opts: &LabOptions) -> Result<VerificationResult> {
    let guard = &opts.guard;
    match which {
        Identity::DeltaSquared => verify_delta_squared(spec, opts),
        Identity::Dh | Identity::Df if spec.dim_v() == 0 => {
            Ok(VerificationResult::skipped(which, "requires m ≥ 1"))
        }
        Identity::Dh => verify_dh(spec, guard),
        Identity::Df => verify_df(spec, guard),
        Identity::TauSquares => verify_tau_squares(&quotient_spec(spec)?, guard),
        Identity::TauAgree => verify_tau_agree(&quotient_spec(spec)?, guard),
        Identity::SsquareKernel => verify_ssquare_kernel(spec),
    }
}

/// Largest `δδf` table built by the `delta_squared` check.
pub const DELTA_SQUARED_CELLS: u128 = 1 << 24;

/// δ∘δ = 0 on seeded random cochains of degrees 0, 1 and 2, skipping degrees
/// whose `δδf` table exceeds [`DELTA_SQUARED_CELLS`].
fn verify_delta_squared(spec: &GroupSpec, opts: &LabOptions) -> Result<VerificationResult> {
    let guard = &opts.guard;
    let table = GroupTable::new(spec, guard)?;
    let mut cases = 0;
    let mut top = 0;
    for d in 0..=2usize {
        let cells = pow_u128(table.order() as u64, d as u32 + 2);
        if d > 0 && cells > DELTA_SQUARED_CELLS {
            break;
        }
        guard.check("delta squared", cells)?;
        top = d;
        let f = Cochain::random(&table, d, opts.seed.wrapping_add(d as u64), guard)?;
        let ddf = coboundary(&table, &coboundary(&table, &f, guard)?, guard)?;
        cases += ddf.values().len() as u64;
        if let Some(pos) = ddf.first_difference(&Cochain::zero(&table, d + 2, guard)?) {
            return Ok(VerificationResult::outcome(
                Identity::DeltaSquared,
                cases,
                Some(format!("degree {d}: δδf ≠ 0 at {}", render_tuple(&table, &pos))),
            ));
        }
    }
    let mut r = VerificationResult::outcome(Identity::DeltaSquared, cases, None);
    if top < 2 {
        r.detail = Some(format!("degrees 0..={top} only"));
    }
    Ok(r)
}

/// `δh_ρ(g1,g2) = −½ γ^∨(ρ)(ḡ1∧ḡ2)` for every basis vector ρ of V^∨.
fn verify_dh(spec: &GroupSpec, guard: &Guard) -> Result<VerificationResult> {
    let table = GroupTable::new(spec, guard)?;
    let f = spec.field();
    let q = (f.p() as usize).pow(spec.dim_u() as u32);
    let minus_half = f.neg(f.half());
    let mut cases = 0;
    for k in 0..spec.dim_v() {
        let rho = unit(spec.dim_v(), k);
        let h = build_named(&table, &NamedCochain::HRho { rho: rho.clone() }, guard)?;
        let dh = coboundary(&table, &h, guard)?;
        let lam = bivector_form_on_u(spec, &spec.gamma_dual(&rho));
        let bad = first_failure(table.order(), 2, |g| {
            let expected = f.mul(minus_half, lam[table.u_index(g[0]) * q + table.u_index(g[1])]);
            dh.value(g).numerator == expected
        });
        cases += dh.values().len() as u64;
        if let Some(g) = bad {
            return Ok(VerificationResult::outcome(
                Identity::Dh,
                cases,
                Some(format!("rho = v*[{}], g = {}", k + 1, render_tuple(&table, &g))),
            ));
        }
    }
    Ok(VerificationResult::outcome(Identity::Dh, cases, None))
}

/// `δf_{ρ,λ}(g1..g4) = −¼ γ^∨(ρ)(ḡ1∧ḡ2) λ(ḡ3∧ḡ4)` over basis pairs (ρ, λ).
///
/// δf is evaluated tuple by tuple from the defining formula, so the cost is
/// `|G|^4` evaluations per pair with only `|U|^2`-sized tables stored.
fn verify_df(spec: &GroupSpec, guard: &Guard) -> Result<VerificationResult> {
    let table = GroupTable::new(spec, guard)?;
    let order = table.order();
    guard.check("df identity", pow_u128(order as u64, 4))?;
    let f = spec.field();
    let n = spec.dim_u();
    let q = (f.p() as usize).pow(n as u32);
    let half = f.half();
    let minus_quarter = f.neg(f.mul(half, half));
    let pairs = ExteriorBasis::new(n, 2);
    let ubar: Vec<usize> = (0..order).map(|g| table.u_index(g)).collect();
    let mut cases = 0u64;
    for k in 0..spec.dim_v() {
        let rho = unit(spec.dim_v(), k);
        let rv = v_values(&table, &rho);
        let gdual = bivector_form_on_u(spec, &spec.gamma_dual(&rho));
        for c in 0..pairs.dim() {
            guard.check_time("df identity")?;
            let lam = bivector_form_on_u(spec, &unit(pairs.dim(), c));
            let bad = (0..order * order).into_par_iter().find_map_first(|i12| {
                let (g1, g2) = (i12 / order, i12 % order);
                let (u1, u2) = (ubar[g1], ubar[g2]);
                // the first two terms share λ(ḡ3∧ḡ4)
                let outer = f.mul(half, f.sub(rv[g2], rv[table.mul(g1, g2)]));
                let r1 = f.mul(half, rv[g1]);
                let expected_12 = f.mul(minus_quarter, gdual[u1 * q + u2]);
                for g3 in 0..order {
                    let u3 = ubar[g3];
                    let u23 = ubar[table.mul(g2, g3)];
                    let fifth = lam[u2 * q + u3];
                    for g4 in 0..order {
                        let u4 = ubar[g4];
                        let lam34 = lam[u3 * q + u4];
                        let inner = f.add(f.sub(lam[u23 * q + u4], lam[u2 * q + ubar[table.mul(g3, g4)]]), fifth);
                        let d = f.add(f.mul(outer, lam34), f.mul(r1, inner));
                        if d != f.mul(expected_12, lam34) {
                            return Some(vec![g1, g2, g3, g4]);
                        }
                    }
                }
                None
            });
            cases += (order as u64).pow(4);
            if let Some(g) = bad {
                return Ok(VerificationResult::outcome(
                    Identity::Df,
                    cases,
                    Some(format!(
                        "rho = v*[{}], lambda = u*[{}], g = {}",
                        k + 1,
                        pairs.subset(c).iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(","),
                        render_tuple(&table, &g)
                    )),
                ));
            }
        }
    }
    Ok(VerificationResult::outcome(Identity::Df, cases, None))
}

/// `δτ₂₃(t) = μ(t + (23)t)` and `δτ₁₃(t) = μ(t + (13)t)` for basis tensors `t`.
fn verify_tau_squares(abelian: &GroupSpec, guard: &Guard) -> Result<VerificationResult> {
    let table = GroupTable::new(abelian, guard)?;
    guard.check("tau squares", pow_u128(table.order() as u64, 4))?;
    let f = abelian.field();
    let n = abelian.dim_u();
    let mut cases = 0;
    for i in 0..n.pow(4) {
        let idx = [i / (n * n * n), (i / (n * n)) % n, (i / n) % n, i % n];
        let forms = idx.map(|a| unit(n, a));
        let t = TensorDeg4::basis(f, n, idx);
        for (kind, swap, label) in [
            (NamedCochain::Tau23(forms.clone()), SWAP_23, "tau23"),
            (NamedCochain::Tau13(forms.clone()), SWAP_13, "tau13"),
        ] {
            let tau = build_named(&table, &kind, guard)?;
            let lhs = coboundary(&table, &tau, guard)?;
            let rhs = build_named(&table, &NamedCochain::Mu(t.add(&t.permute(swap))), guard)?;
            cases += lhs.values().len() as u64;
            if let Some(g) = lhs.first_difference(&rhs) {
                let names: Vec<String> = idx.iter().map(|a| format!("u*[{}]", a + 1)).collect();
                return Ok(VerificationResult::outcome(
                    Identity::TauSquares,
                    cases,
                    Some(format!(
                        "{label}({}) at g = {}",
                        names.join(", "),
                        render_tuple(&table, &g)
                    )),
                ));
            }
        }
    }
    Ok(VerificationResult::outcome(Identity::TauSquares, cases, None))
}

/// Matrix of `δ: C^d(G, Z/M) → C^{d+1}(G, Z/M)` on full inhomogeneous cochains, `M = p^k`.
pub fn full_coboundary_matrix(table: &GroupTable, degree: usize, k: u32, guard: &Guard) -> Result<ZpkMatrix> {
    let n = table.order();
    let rows = pow_u128(n as u64, degree as u32 + 1);
    guard.check("coboundary matrix", rows * (degree as u128 + 2))?;
    let rows = rows as usize;
    let cols = n.pow(degree as u32);
    let mut entries = Vec::with_capacity(rows * (degree + 2));
    let mut g = vec![0usize; degree + 1];
    let mut scratch = Vec::with_capacity(degree);
    for r in 0..rows {
        decode(r as u64, n as u64, &mut g);
        entries.push((r, encode(g[1..].iter().copied(), n), 1i64));
        for i in 0..degree {
            scratch.clear();
            scratch.extend_from_slice(&g[..i]);
            scratch.push(table.mul(g[i], g[i + 1]));
            scratch.extend_from_slice(&g[i + 2..]);
            let sign = if i % 2 == 0 { -1 } else { 1 };
            entries.push((r, encode(scratch.iter().copied(), n), sign));
        }
        let sign = if degree % 2 == 0 { -1 } else { 1 };
        entries.push((r, encode(g[..degree].iter().copied(), n), sign));
    }
    ZpkMatrix::new(table.spec().p() as u64, k, rows, cols, entries)
}

/// Decides whether degree-`d` cochains with values in `(1/p)Z/Z` are
/// coboundaries of `Q/Z`-valued cochains.
///
/// Every `Q/Z` class of positive degree is killed by `N = |G|`, so a primitive
/// `b` with `δb = c` can be moved into `(1/(pN))Z/Z`; membership is then
/// decided in `Z/(pN)` after embedding `x/p ↦ N·x`.
pub struct CoboundaryTest {
    degree: usize,
    order: u64,
    delta: Option<ZpkMatrix>,
    base_log_order: u64,
    guard: Guard,
}

impl CoboundaryTest {
    pub fn new(table: &GroupTable, degree: usize, guard: &Guard) -> Result<Self> {
        let order = table.order() as u64;
        if degree == 0 {
            return Ok(Self {
                degree,
                order,
                delta: None,
                base_log_order: 0,
                guard: *guard,
            });
        }
        let k = table.spec().log_order() as u32 + 1;
        let delta = full_coboundary_matrix(table, degree - 1, k, guard)?;
        let base_log_order = elementary_divisors_guarded(&delta, guard)?.image_log_order();
        Ok(Self {
            degree,
            order,
            delta: Some(delta),
            base_log_order,
            guard: *guard,
        })
    }

    pub fn contains(&self, c: &Cochain) -> Result<bool> {
        if c.degree != self.degree || c.group_order as u64 != self.order {
            return Err(Error::DimensionMismatch("cochain shape differs from the test".into()));
        }
        let Some(delta) = &self.delta else {
            return Ok(c.is_zero());
        };
        let modulus = delta.modulus();
        let target: Vec<u64> = c.values.iter().map(|&x| (x as u64 * self.order) % modulus).collect();
        let ext = elementary_divisors_guarded(&delta.with_column(&target), &self.guard)?;
        Ok(ext.image_log_order() == self.base_log_order)
    }
}

pub fn is_qz_coboundary(table: &GroupTable, c: &Cochain, guard: &Guard) -> Result<bool> {
    CoboundaryTest::new(table, c.degree, guard)?.contains(c)
}

/// `Σ_{k<p} c(g, g^k, g)`: unchanged by coboundaries, and nonzero exactly when
/// the restriction of the 3-cocycle `c` to the cyclic group `⟨g⟩ ≠ 1` is
/// nontrivial in `H³(⟨g⟩, Q/Z)`.
pub fn cyclic_invariant(table: &GroupTable, c: &Cochain, g: usize) -> Result<TorsionValue> {
    if c.degree != 3 {
        return Err(Error::InvalidArgument("cyclic invariant needs a 3-cochain".into()));
    }
    let f = table.spec().field();
    let mut power = 0usize;
    let mut acc = 0u32;
    for _ in 0..f.p() {
        acc = f.add(acc, c.value(&[g, power, g]).numerator);
        power = table.mul(power, g);
    }
    Ok(TorsionValue {
        numerator: acc,
        p: f.p(),
    })
}

/// `τ₁₃(t) − τ₂₃(t)` is a coboundary for the generators `t = u⊗u⊗u⊗v` of the
/// fully symmetric part, `u` over all lines of U^∨ and `v` over a basis.
fn verify_tau_agree(abelian: &GroupSpec, guard: &Guard) -> Result<VerificationResult> {
    let table = GroupTable::new(abelian, guard)?;
    let f = abelian.field();
    let n = abelian.dim_u();
    let test = CoboundaryTest::new(&table, 3, guard)?;
    let mut cases = 0;
    for u in projective_lines(f, n) {
        for j in 0..n {
            let v = unit(n, j);
            let forms = [u.clone(), u.clone(), u.clone(), v];
            let t13 = build_named(&table, &NamedCochain::Tau13(forms.clone()), guard)?;
            let t23 = build_named(&table, &NamedCochain::Tau23(forms), guard)?;
            let diff = t13.sub(&t23)?;
            cases += 1;
            if !test.contains(&diff)? {
                let mut detail = format!("u = {u:?}, v = u*[{}]: difference is not a coboundary", j + 1);
                for g in 1..table.order() {
                    let inv = cyclic_invariant(&table, &diff, g)?;
                    if inv.numerator != 0 {
                        detail.push_str(&format!(
                            "; its restriction to <{}> has cyclic invariant {inv}",
                            table.element(g)
                        ));
                        break;
                    }
                }
                return Ok(VerificationResult::outcome(Identity::TauAgree, cases, Some(detail)));
            }
        }
    }
    Ok(VerificationResult::outcome(Identity::TauAgree, cases, None))
}

/// Kernel of `S²(Λ²U^∨) → Λ⁴U^∨` equals the span of the symmetrized generators.
fn verify_ssquare_kernel(spec: &GroupSpec) -> Result<VerificationResult> {
    let n = spec.dim_u();
    if n < 2 {
        return Ok(VerificationResult::skipped(Identity::SsquareKernel, "requires dim U ≥ 2"));
    }
    let mm = mult_map_s2_l2_to_l4(spec.field(), n)?;
    let kernel = mm.matrix.kernel();
    let span = Subspace::span(spec.field(), mm.matrix.cols(), &mm.generators);
    let detail = (span != kernel).then(|| {
        format!("generator span has dim {}, kernel has dim {}", span.dim(), kernel.dim())
    });
    Ok(VerificationResult::outcome(Identity::SsquareKernel, 1, detail))
}

/// Runs every identity in order.
pub fn verify_all(spec: &GroupSpec, opts: &LabOptions) -> Result<Vec<VerificationResult>> {
    Identity::ALL
        .iter()
        .map(|&which| verify_identity(spec, which, opts))
        .collect()
}
