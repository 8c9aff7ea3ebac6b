//! The degree-2 and degree-3 obstruction spaces of a spec.
//!
//! `K² ⊂ Λ²U^∨` is the image of `γ^∨`, `K³ = K² ∧ U^∨ ⊂ Λ³U^∨`,
//! `S^i = (K^i)^⊥ ⊂ Λ^iU`, `S^i_dec ⊂ S^i` is spanned by the elements of `S^i`
//! with a vector factor, and `K^i_max = (S^i_dec)^⊥`. The reported obstruction
//! dimensions are `dim K²_max − dim K²` and `dim K³_max − dim K³`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{binomial, flag_subspace, render_coeffs, ExtVector, ExteriorBasis};
use crate::fp::PrimeField;
use crate::group::{GroupSpec, ValidationReport};
use crate::guard::{pow_u128, Guard};
use crate::linalg::{SpanBuilder, Subspace};

/// Row space of γ, read in Λ²U^∨ coordinates.
pub fn compute_k2(spec: &GroupSpec) -> Subspace {
    spec.gamma().rref().0
}

/// `span{κ ∧ e_j^∨}` over a basis of `k2` and all `j`.
pub fn compute_k3(spec: &GroupSpec, k2: &Subspace) -> Result<Subspace> {
    let f = spec.field();
    let n = spec.dim_u();
    let mut gens = Vec::with_capacity(k2.dim() * n);
    for kappa in k2.basis() {
        let kappa = ExtVector::from_coeffs(f, n, 2, kappa.clone())?;
        for j in 0..n {
            let ej = ExtVector::monomial(f, n, &[j], 1)?;
            gens.push(kappa.wedge(&ej)?.into_coeffs());
        }
    }
    Ok(Subspace::span(f, binomial(n, 3), &gens))
}

/// Representatives `v` of the projective lines of F_p^n: first nonzero coordinate 1.
pub fn projective_lines(field: PrimeField, n: usize) -> impl Iterator<Item = Vec<u32>> {
    let p = field.p() as u64;
    (0..n).flat_map(move |lead| {
        let tail = n - lead - 1;
        (0..p.pow(tail as u32)).map(move |mut idx| {
            let mut v = vec![0u32; n];
            v[lead] = 1;
            for c in v[lead + 1..].iter_mut().rev() {
                *c = (idx % p) as u32;
                idx /= p;
            }
            v
        })
    })
}

fn check_degree(s: &Subspace, n: usize, k: usize) -> Result<()> {
    if k != 2 && k != 3 {
        return Err(Error::InvalidArgument(format!("decomposable degree must be 2 or 3, got {k}")));
    }
    if s.ambient_dim() != binomial(n, k) {
        return Err(Error::DimensionMismatch(format!(
            "subspace of dimension-{} space is not in Λ^{k} of F^{n}",
            s.ambient_dim()
        )));
    }
    Ok(())
}

/// Span of the elements of `s ⊂ Λ^kU` of the form `ω ∧ v` with `v ∈ U`.
pub fn dec_subgroup(s: &Subspace, n: usize, k: usize) -> Result<Subspace> {
    check_degree(s, n, k)?;
    let f = s.field();
    let mut acc = SpanBuilder::new(f, s.ambient_dim());
    if s.is_zero() || n < k {
        return Ok(acc.finish());
    }
    for v in projective_lines(f, n) {
        let hits = flag_subspace(f, k - 1, &v)?.intersect(s)?;
        for h in hits.basis() {
            acc.insert(h);
        }
        if acc.dim() == s.dim() {
            break;
        }
    }
    Ok(acc.finish())
}

/// Independent version of [`dec_subgroup`]: enumerates every element of every
/// `{ω ∧ v}` and keeps those lying in `s`.
pub fn dec_subgroup_bruteforce(s: &Subspace, n: usize, k: usize, guard: &Guard) -> Result<Subspace> {
    check_degree(s, n, k)?;
    let f = s.field();
    let p = f.p();
    let ambient = s.ambient_dim();
    let mut acc = SpanBuilder::new(f, ambient);
    if s.is_zero() || n < k {
        return Ok(acc.finish());
    }
    let lines = (pow_u128(p as u64, n as u32) - 1) / (p as u128 - 1);
    let d = binomial(n - 1, k - 1);
    guard.check("brute-force decomposable search", lines * pow_u128(p as u64, d as u32))?;

    let forms = s.annihilator_forms();
    let lower = ExteriorBasis::new(n, k - 1);
    for v in projective_lines(f, n) {
        guard.check_time("brute-force decomposable search")?;
        let vv = ExtVector::from_vector(f, &v);
        // ω ranges over Λ^{k-1}; the products e_S ∧ v span the flag
        let products: Vec<Vec<u32>> = (0..lower.dim())
            .map(|i| {
                let mut c = vec![0u32; lower.dim()];
                c[i] = 1;
                ExtVector::from_coeffs(f, n, k - 1, c)
                    .and_then(|w| w.wedge(&vv))
                    .map(ExtVector::into_coeffs)
            })
            .collect::<Result<_>>()?;
        let flag = Subspace::span(f, ambient, &products);
        let basis = flag.basis();
        debug_assert_eq!(basis.len(), d);
        let phi: Vec<Vec<u32>> = basis
            .iter()
            .map(|b| forms.iter().map(|form| crate::exterior::dot(f, form, b)).collect())
            .collect();
        let mut digits = vec![0u32; d];
        let mut values = vec![0u32; forms.len()];
        loop {
            // advance the odometer; every step adds phi[t] for the digit that moved
            let mut t = 0;
            loop {
                if t == d {
                    break;
                }
                for (x, &y) in values.iter_mut().zip(&phi[t]) {
                    *x = f.add(*x, y);
                }
                digits[t] += 1;
                if digits[t] == p {
                    digits[t] = 0;
                    t += 1;
                } else {
                    break;
                }
            }
            if t == d {
                break;
            }
            if values.iter().all(|&x| x == 0) {
                let mut x = vec![0u32; ambient];
                for (c, b) in digits.iter().zip(basis) {
                    if *c != 0 {
                        for (xi, &bi) in x.iter_mut().zip(b) {
                            *xi = f.add(*xi, f.mul(*c, bi));
                        }
                    }
                }
                acc.insert(&x);
                if acc.dim() == s.dim() {
                    return Ok(acc.finish());
                }
            }
        }
    }
    Ok(acc.finish())
}

/// A subspace with its basis rendered for humans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceReport {
    pub dim: usize,
    pub basis: Vec<Vec<u32>>,
    pub rendered: Vec<String>,
}

impl SubspaceReport {
    fn new(s: &Subspace, n: usize, k: usize, prefix: &str) -> Self {
        Self {
            dim: s.dim(),
            basis: s.basis().to_vec(),
            rendered: s
                .basis()
                .iter()
                .map(|b| render_coeffs(s.field(), n, k, b, prefix))
                .collect(),
        }
    }

    pub fn to_subspace(&self, field: PrimeField, ambient_dim: usize) -> Subspace {
        Subspace::span(field, ambient_dim, &self.basis)
    }
}

/// The four spaces of one degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub degree: usize,
    pub ambient_dim: usize,
    pub k: SubspaceReport,
    pub s: SubspaceReport,
    pub s_dec: SubspaceReport,
    pub k_max: SubspaceReport,
    pub obstruction_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub brauer_trivial: bool,
    pub degree3_obstruction_nonzero: bool,
    pub hypotheses_ok: bool,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub spec: GroupSpec,
    pub validation: ValidationReport,
    pub b0_dim: usize,
    pub h3_dim: usize,
    pub degree2: DegreeReport,
    pub degree3: DegreeReport,
    pub verdict: Verdict,
}

fn degree_report(k_space: Subspace, n: usize, i: usize) -> Result<DegreeReport> {
    let s = k_space.orthogonal_std();
    let s_dec = dec_subgroup(&s, n, i)?;
    let k_max = if s_dec == s {
        k_space.clone()
    } else {
        s_dec.orthogonal_std()
    };
    if !k_max.contains_subspace(&k_space)? {
        return Err(Error::Internal(format!("K^{i} is not contained in K^{i}_max")));
    }
    Ok(DegreeReport {
        degree: i,
        ambient_dim: binomial(n, i),
        obstruction_dim: k_max.dim() - k_space.dim(),
        k: SubspaceReport::new(&k_space, n, i, "u*"),
        s: SubspaceReport::new(&s, n, i, "u"),
        s_dec: SubspaceReport::new(&s_dec, n, i, "u"),
        k_max: SubspaceReport::new(&k_max, n, i, "u*"),
    })
}

fn summary(brauer_trivial: bool, h3_nonzero: bool, hypotheses_ok: bool) -> String {
    let body = match (brauer_trivial, h3_nonzero) {
        (true, true) => "unramified Brauer group trivial; degree-3 unramified obstruction nonzero; \
                         invariant field NOT rational"
            .to_string(),
        (false, _) => "unramified Brauer group nontrivial; invariant field NOT rational".to_string(),
        (true, false) => "unramified Brauer group trivial; degree-3 unramified obstruction zero; \
                          no obstruction to rationality detected"
            .to_string(),
    };
    if hypotheses_ok {
        body
    } else {
        format!("hypotheses violated (gamma not surjective or nontrivial radical); {body}")
    }
}

/// Runs the full pipeline. With `strict`, specs failing the hypotheses are rejected.
pub fn analyze(spec: &GroupSpec, strict: bool) -> Result<ObstructionReport> {
    let validation = spec.validate(strict)?;
    let n = spec.dim_u();
    let k2 = compute_k2(spec);
    let k3 = compute_k3(spec, &k2)?;
    let degree2 = degree_report(k2, n, 2)?;
    let degree3 = degree_report(k3, n, 3)?;
    let b0_dim = degree2.obstruction_dim;
    let h3_dim = degree3.obstruction_dim;
    let hypotheses_ok = validation.hypotheses_ok();
    Ok(ObstructionReport {
        spec: spec.clone(),
        validation,
        b0_dim,
        h3_dim,
        verdict: Verdict {
            brauer_trivial: b0_dim == 0,
            degree3_obstruction_nonzero: h3_dim > 0,
            hypotheses_ok,
            summary: summary(b0_dim == 0, h3_dim > 0, hypotheses_ok),
        },
        degree2,
        degree3,
    })
}

impl ObstructionReport {
    /// Human-readable report.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let v = &self.validation;
        out.push_str(&format!(
            "group: p = {}, dim U = {}, dim V = {}, |G| = {}^{}\n",
            v.p,
            v.dim_u,
            v.dim_v,
            v.p,
            v.dim_u + v.dim_v
        ));
        out.push_str(&format!(
            "hypotheses: rank gamma = {}, radical dim = {} ({})\n",
            v.rank_gamma,
            v.radical_dim,
            if v.hypotheses_ok() { "ok" } else { "violated" }
        ));
        out.push_str("multivectors are sorted to increasing indices with the sign of the sorting permutation\n");
        for d in [&self.degree2, &self.degree3] {
            let i = d.degree;
            out.push_str(&format!("\ndegree {i} (ambient dimension {}):\n", d.ambient_dim));
            for (name, s) in [("K", &d.k), ("S", &d.s), ("S_dec", &d.s_dec), ("K_max", &d.k_max)] {
                out.push_str(&format!("  {name}^{i}: dim {}\n", s.dim));
                if s.dim <= 12 {
                    for r in &s.rendered {
                        out.push_str(&format!("    {r}\n"));
                    }
                }
            }
        }
        out.push_str(&format!("\nb0_dim = {}\nh3_dim = {}\n", self.b0_dim, self.h3_dim));
        out.push_str(&format!("verdict: {}\n", self.verdict.summary));
        out
    }
}

/// `S^k` of a spec, `k ∈ {2, 3}`.
pub fn s_space(spec: &GroupSpec, k: usize) -> Result<Subspace> {
    let k2 = compute_k2(spec);
    match k {
        2 => Ok(k2.orthogonal_std()),
        3 => Ok(compute_k3(spec, &k2)?.orthogonal_std()),
        _ => Err(Error::InvalidArgument(format!("degree must be 2 or 3, got {k}"))),
    }
}

/// Fast and brute-force `S^k_dec` side by side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecComparison {
    pub degree: usize,
    pub fast: SubspaceReport,
    pub brute: SubspaceReport,
    pub agree: bool,
}

fn render_span(r: &SubspaceReport) -> String {
    format!("span{{{}}}", r.rendered.join(", "))
}

impl DecComparison {
    pub fn to_text(&self) -> String {
        if self.agree {
            format!("fast = brute = {}", render_span(&self.fast))
        } else {
            format!("MISMATCH: fast = {}, brute = {}", render_span(&self.fast), render_span(&self.brute))
        }
    }
}

pub fn compare_decomposables(spec: &GroupSpec, k: usize, guard: &Guard) -> Result<DecComparison> {
    let n = spec.dim_u();
    let s = s_space(spec, k)?;
    let fast = dec_subgroup(&s, n, k)?;
    let brute = dec_subgroup_bruteforce(&s, n, k, guard)?;
    Ok(DecComparison {
        degree: k,
        agree: fast == brute,
        fast: SubspaceReport::new(&fast, n, k, "u"),
        brute: SubspaceReport::new(&brute, n, k, "u"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    #[test]
    fn projective_line_count() {
        assert_eq!(projective_lines(f3(), 6).count(), 364);
        assert_eq!(projective_lines(PrimeField::new(5).unwrap(), 3).count(), 31);
        for v in projective_lines(f3(), 3) {
            assert_eq!(v.iter().find(|&&x| x != 0), Some(&1));
        }
    }

    #[test]
    fn heisenberg_pipeline() {
        let r = analyze(&builtin("heisenberg3").unwrap(), true).unwrap();
        assert_eq!(r.degree2.k.dim, 1);
        assert_eq!(r.degree2.s.dim, 0);
        assert_eq!(r.degree3.ambient_dim, 0);
        assert_eq!((r.b0_dim, r.h3_dim), (0, 0));
        assert!(r.verdict.brauer_trivial && !r.verdict.degree3_obstruction_nonzero);
    }

    #[test]
    fn full_space_is_decomposably_spanned() {
        let s = Subspace::full(f3(), binomial(4, 2));
        assert_eq!(dec_subgroup(&s, 4, 2).unwrap(), s);
    }

    #[test]
    fn decomposable_trivector_is_its_own_dec() {
        let e123 = ExtVector::monomial(f3(), 4, &[0, 1, 2], 1).unwrap();
        let s = Subspace::span(f3(), 4, &[e123.into_coeffs()]);
        assert_eq!(dec_subgroup(&s, 4, 3).unwrap(), s);
        assert_eq!(dec_subgroup_bruteforce(&s, 4, 3, &Guard::default()).unwrap(), s);
    }

    #[test]
    fn symplectic_form_has_no_decomposables() {
        // e12 + e34 is not of the form u ∧ v
        let f = f3();
        let w = ExtVector::monomial(f, 4, &[0, 1], 1)
            .unwrap()
            .add(&ExtVector::monomial(f, 4, &[2, 3], 1).unwrap())
            .unwrap();
        let s = Subspace::span(f, 6, &[w.into_coeffs()]);
        assert!(dec_subgroup(&s, 4, 2).unwrap().is_zero());
        assert!(dec_subgroup_bruteforce(&s, 4, 2, &Guard::default()).unwrap().is_zero());
    }

    #[test]
    fn degree_checks() {
        let s = Subspace::zero(f3(), 6);
        assert!(dec_subgroup(&s, 4, 4).is_err());
        assert!(dec_subgroup(&s, 5, 2).is_err());
        assert!(dec_subgroup_bruteforce(&s, 4, 2, &Guard::default()).unwrap().is_zero());
    }

    #[test]
    fn brute_force_respects_guard() {
        let s = Subspace::full(f3(), 20);
        let err = dec_subgroup_bruteforce(&s, 6, 3, &Guard::new(1000)).unwrap_err();
        assert!(matches!(err, Error::GuardExceeded { .. }));
    }

    #[test]
    fn comparison_text() {
        let c = compare_decomposables(&builtin("heisenberg5").unwrap(), 2, &Guard::default()).unwrap();
        assert!(c.agree);
        assert_eq!(c.to_text(), "fast = brute = span{}");
    }

    #[test]
    fn report_json_round_trip() {
        let r = analyze(&builtin("heisenberg5").unwrap(), true).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: ObstructionReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn non_strict_stamps_hypotheses() {
        let spec = builtin("elem9").unwrap();
        assert!(analyze(&spec, true).is_err());
        let r = analyze(&spec, false).unwrap();
        assert!(!r.verdict.hypotheses_ok);
        assert!(r.verdict.summary.starts_with("hypotheses violated"));
    }
}
