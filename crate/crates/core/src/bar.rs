//! Cohomology orders of small groups from the normalized bar complex.
//!
//! `C^n` is the set of functions on `n`-tuples of non-identity elements with
//! values in `Z/p^k` and trivial action. From the elementary divisors of the
//! differentials `δ^n` one gets `|H^n(G, Z/p^k)| = |ker δ^n| / |im δ^{n-1}|`.
//!
//! For `Q/Z` coefficients the integral groups are recovered by the
//! universal-coefficient splitting
//! `H^i(G, Z/N) ≅ H^i(G, Z) ⊗ Z/N ⊕ H^{i+1}(G, Z)[N]`. When `N = |G|` every
//! positive-degree integral class is killed by `N`, so both summands are the
//! whole groups and `|H^{i+1}(G,Z)| = |H^i(G,Z/N)| / |H^i(G,Z)|`, starting
//! from `H^1(G,Z) = 0`. Finally `H^i(G, Q/Z) ≅ H^{i+1}(G, Z)` for `i ≥ 1`.
//! Running the same recursion with the mod-`p` ranks counts cyclic factors,
//! which tells whether a group is killed by `p`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupSpec, GroupTable};
use crate::guard::{pow_u128, Guard};
use crate::linalg::zpk::{elementary_divisors_guarded, ElementaryDivisors, ZpkMatrix};

/// Largest top differential (in rows) computed without `allow_heavy`.
pub const HEAVY_ROWS: u128 = 20_000;

#[derive(Debug, Clone, Copy, Default)]
pub struct BarOptions {
    pub allow_heavy: bool,
    pub guard: Guard,
}

/// Matrix of `δ^n: C^n → C^{n+1}` of the normalized complex over `Z/p^k`.
///
/// Tuples of non-identity elements are indexed lexicographically by
/// `g_i − 1` in base `|G| − 1`.
pub fn bar_matrix(table: &GroupTable, n: usize, k: u32, guard: &Guard) -> Result<ZpkMatrix> {
    let q = table.order() - 1;
    let rows = pow_u128(q as u64, n as u32 + 1);
    let cols = pow_u128(q as u64, n as u32);
    guard.check("bar differential", rows * (n as u128 + 2))?;
    let p = table.spec().p() as u64;
    let encode = |t: &[usize]| t.iter().fold(0usize, |acc, &g| acc * q + (g - 1));
    let triplets: Vec<(usize, usize, i64)> = (0..rows as usize)
        .into_par_iter()
        .flat_map_iter(|r| {
            let mut g = vec![0usize; n + 1];
            let mut idx = r;
            for x in g.iter_mut().rev() {
                *x = idx % q + 1;
                idx /= q;
            }
            let mut out = Vec::with_capacity(n + 2);
            out.push((r, encode(&g[1..]), 1));
            let mut merged = Vec::with_capacity(n);
            for i in 0..n {
                let prod = table.mul(g[i], g[i + 1]);
                if prod == 0 {
                    continue;
                }
                merged.clear();
                merged.extend_from_slice(&g[..i]);
                merged.push(prod);
                merged.extend_from_slice(&g[i + 2..]);
                let sign = if i % 2 == 0 { -1 } else { 1 };
                out.push((r, encode(&merged), sign));
            }
            out.push((r, encode(&g[..n]), if n % 2 == 0 { -1 } else { 1 }));
            out
        })
        .collect();
    ZpkMatrix::new(p, k, rows as usize, cols as usize, triplets)
}

fn check_tier(table: &GroupTable, top_degree: usize, opts: &BarOptions) -> Result<()> {
    let rows = pow_u128(table.order() as u64 - 1, top_degree as u32 + 1);
    if rows > HEAVY_ROWS && !opts.allow_heavy {
        return Err(Error::GuardExceeded {
            what: format!("degree-{top_degree} bar differential (heavy tier, needs allow-heavy)"),
            required: rows,
            allowed: HEAVY_ROWS as u64,
        });
    }
    Ok(())
}

fn differentials(table: &GroupTable, top: usize, k: u32, opts: &BarOptions) -> Result<Vec<ElementaryDivisors>> {
    check_tier(table, top, opts)?;
    (0..=top)
        .map(|n| {
            opts.guard.check_time("bar differential")?;
            elementary_divisors_guarded(&bar_matrix(table, n, k, &opts.guard)?, &opts.guard)
        })
        .collect()
}

/// `log_p |H^n(G, Z/p^k)|` from the divisors of `δ^{n-1}` and `δ^n`.
fn log_order_from(divisors: &[ElementaryDivisors], n: usize) -> u64 {
    let below = if n == 0 { 0 } else { divisors[n - 1].image_log_order() };
    divisors[n].kernel_log_order() - below
}

/// `log_p |H^n(G, Z/p)|`: the unit divisors are the mod-`p` rank.
fn log_order_mod_p(divisors: &[ElementaryDivisors], n: usize) -> u64 {
    let rank = |d: &ElementaryDivisors| d.exponents.iter().filter(|&&e| e == 0).count() as u64;
    let below = if n == 0 { 0 } else { rank(&divisors[n - 1]) };
    divisors[n].cols as u64 - rank(&divisors[n]) - below
}

/// `log_p |H^n(G, Z/p^k)|`.
pub fn cohomology_log_order(spec: &GroupSpec, n: usize, k: u32, opts: &BarOptions) -> Result<u64> {
    let table = GroupTable::new(spec, &opts.guard)?;
    let divisors = differentials(&table, n, k, opts)?;
    Ok(log_order_from(&divisors, n))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeOrders {
    pub degree: usize,
    /// `|H^n(G, Z/p^k)|` and its base-`p` logarithm.
    pub order_mod: u64,
    pub log_order_mod: u64,
    /// Divisors of `δ^n` as `(exponent, multiplicity)`; exponent `k` means zero.
    pub differential_divisors: Vec<(u32, usize)>,
    /// `|H^n(G, Q/Z)|`, present for `n ≥ 1` when the modulus is a multiple of `|G|`.
    pub qz_order: Option<u64>,
    pub qz_log_order: Option<u64>,
    /// Whether `H^n(G, Q/Z)` is killed by `p`.
    pub qz_killed_by_p: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyOrders {
    pub group_order: u64,
    pub p: u64,
    pub modulus: u64,
    pub degrees: Vec<DegreeOrders>,
}

impl CohomologyOrders {
    pub fn qz_orders(&self) -> Vec<Option<u64>> {
        self.degrees.iter().skip(1).map(|d| d.qz_order).collect()
    }
}

fn pow_checked(p: u64, e: u64) -> Result<u64> {
    u32::try_from(e)
        .ok()
        .and_then(|e| p.checked_pow(e))
        .ok_or_else(|| Error::InvalidArgument(format!("order {p}^{e} overflows")))
}

/// Orders of `H^n(G, Z/p^k)` for `n ≤ degmax` and, when `p^k` is a multiple of
/// `|G|`, of `H^n(G, Q/Z)`. `k` defaults to `log_p |G|`.
pub fn qz_orders(spec: &GroupSpec, degmax: usize, k: Option<u32>, opts: &BarOptions) -> Result<CohomologyOrders> {
    let log_g = spec.log_order() as u32;
    let k = k.unwrap_or(log_g);
    let p = spec.p() as u64;
    let table = GroupTable::new(spec, &opts.guard)?;
    let divisors = differentials(&table, degmax, k, opts)?;
    let modulus = pow_checked(p, k as u64)?;

    let qz_valid = k >= log_g;
    // log|H^i(G,Z)| and its number of cyclic factors, for i = 1..=degmax+1
    let mut integral = vec![0u64; degmax + 2];
    let mut cyclic = vec![0u64; degmax + 2];
    let mut degrees = Vec::with_capacity(degmax + 1);
    for n in 0..=degmax {
        let log_mod = log_order_from(&divisors, n);
        let (mut qz_log, mut killed) = (None, None);
        if n >= 1 && qz_valid {
            integral[n + 1] = log_mod.checked_sub(integral[n]).ok_or_else(|| {
                Error::Internal(format!("|H^{n}(G, Z/{modulus})| smaller than |H^{n}(G, Z)|"))
            })?;
            cyclic[n + 1] = log_order_mod_p(&divisors, n).checked_sub(cyclic[n]).ok_or_else(|| {
                Error::Internal(format!("mod-p cohomology in degree {n} inconsistent"))
            })?;
            qz_log = Some(integral[n + 1]);
            killed = Some(cyclic[n + 1] == integral[n + 1]);
        }
        degrees.push(DegreeOrders {
            degree: n,
            order_mod: pow_checked(p, log_mod)?,
            log_order_mod: log_mod,
            differential_divisors: divisors[n].multiset(),
            qz_order: qz_log.map(|e| pow_checked(p, e)).transpose()?,
            qz_log_order: qz_log,
            qz_killed_by_p: killed,
        });
    }
    Ok(CohomologyOrders {
        group_order: pow_checked(p, log_g as u64)?,
        p,
        modulus,
        degrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin;

    fn table(name: &str) -> GroupTable {
        GroupTable::new(&builtin(name).unwrap(), &Guard::default()).unwrap()
    }

    #[test]
    fn cyclic_shapes_and_square_zero() {
        let t = table("cyclic3");
        let g = Guard::default();
        let d1 = bar_matrix(&t, 1, 2, &g).unwrap();
        assert_eq!((d1.rows(), d1.cols()), (4, 2));
        for n in 0..3 {
            let a = bar_matrix(&t, n, 2, &g).unwrap();
            let b = bar_matrix(&t, n + 1, 2, &g).unwrap();
            assert!(b.mul(&a).unwrap().is_zero());
        }
        assert!(bar_matrix(&t, 0, 1, &g).unwrap().is_zero());
    }

    #[test]
    fn cyclic_low_degrees() {
        let spec = builtin("cyclic3").unwrap();
        let o = BarOptions::default();
        assert_eq!(cohomology_log_order(&spec, 1, 1, &o).unwrap(), 1);
        assert_eq!(cohomology_log_order(&spec, 2, 2, &o).unwrap(), 1);
        let r = qz_orders(&spec, 3, None, &o).unwrap();
        assert_eq!(r.qz_orders(), vec![Some(3), Some(1), Some(3)]);
    }

    #[test]
    fn elementary_abelian_plane() {
        let spec = builtin("elem9").unwrap();
        let o = BarOptions::default();
        assert_eq!(cohomology_log_order(&spec, 2, 1, &o).unwrap(), 3);
        let r = qz_orders(&spec, 3, None, &o).unwrap();
        assert_eq!(r.qz_orders(), vec![Some(9), Some(3), Some(27)]);
        assert!(r.degrees[1..].iter().all(|d| d.qz_killed_by_p == Some(true)));
    }

    #[test]
    fn heisenberg_abelianization() {
        let spec = builtin("heisenberg3").unwrap();
        let r = qz_orders(&spec, 1, None, &BarOptions::default()).unwrap();
        assert_eq!(r.modulus, 27);
        assert_eq!(r.degrees[1].order_mod, 9);
        assert_eq!(r.degrees[1].qz_order, Some(9));
    }

    #[test]
    fn small_modulus_has_no_qz_part() {
        let spec = builtin("elem9").unwrap();
        let r = qz_orders(&spec, 2, Some(1), &BarOptions::default()).unwrap();
        assert_eq!(r.modulus, 3);
        assert_eq!(r.degrees[2].order_mod, 27);
        assert!(r.degrees.iter().all(|d| d.qz_order.is_none()));
    }

    #[test]
    fn heavy_tier_needs_opt_in() {
        let spec = builtin("heisenberg3").unwrap();
        let err = qz_orders(&spec, 3, None, &BarOptions::default()).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
