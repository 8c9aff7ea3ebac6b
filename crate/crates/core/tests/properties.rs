//! Property tests for the algebraic invariants.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use unramified::cochain::{coboundary, Cochain};
use unramified::exterior::{binomial, ExtVector};
use unramified::group::{builtin, random_strict_spec, GroupElement, GroupSpec, GroupTable};
use unramified::linalg::Subspace;
use unramified::obstruction::analyze;
use unramified::{Guard, PrimeField};

fn prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(3u32), Just(5), Just(7)]
}

/// A field with generators for a subspace of F^dim.
fn subspace_pair() -> impl Strategy<Value = (u32, usize, Vec<Vec<u32>>, Vec<Vec<u32>>)> {
    (prime(), 1usize..7).prop_flat_map(|(p, dim)| {
        let vecs = prop::collection::vec(prop::collection::vec(0..p, dim), 0..=dim);
        (Just(p), Just(dim), vecs.clone(), vecs)
    })
}

fn ext_vector(f: PrimeField, n: usize, k: usize) -> impl Strategy<Value = ExtVector> {
    prop::collection::vec(0..f.p(), binomial(n, k)).prop_map(move |c| ExtVector::from_coeffs(f, n, k, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sum_and_intersection_dimensions((p, dim, a, b) in subspace_pair()) {
        let f = PrimeField::new(p).unwrap();
        let a = Subspace::span(f, dim, &a);
        let b = Subspace::span(f, dim, &b);
        let sum = a.sum(&b).unwrap();
        let inter = a.intersect(&b).unwrap();
        prop_assert_eq!(sum.dim() + inter.dim(), a.dim() + b.dim());
        prop_assert!(sum.contains_subspace(&a).unwrap() && a.contains_subspace(&inter).unwrap());
    }

    #[test]
    fn orthogonal_complement_is_an_involution((p, dim, a, _b) in subspace_pair()) {
        let f = PrimeField::new(p).unwrap();
        let a = Subspace::span(f, dim, &a);
        let perp = a.orthogonal_std();
        prop_assert_eq!(perp.dim() + a.dim(), dim);
        prop_assert_eq!(perp.orthogonal_std(), a);
    }

    #[test]
    fn canonical_basis_ignores_generator_order((p, dim, a, _b) in subspace_pair(), seed in any::<u64>(), scale in 1u32..7) {
        let f = PrimeField::new(p).unwrap();
        let mut shuffled = a.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng);
        let c = scale % p;
        let c = if c == 0 { 1 } else { c };
        for v in &mut shuffled {
            for x in v.iter_mut() {
                *x = f.mul(*x, c);
            }
        }
        let s1 = Subspace::span(f, dim, &a);
        let s2 = Subspace::span(f, dim, &shuffled);
        prop_assert_eq!(s1.basis(), s2.basis());
    }

    #[test]
    fn wedge_is_graded_commutative(
        (f, a, b) in (prime(), 1usize..7).prop_flat_map(|(p, n)| {
            let f = PrimeField::new(p).unwrap();
            (0..=n, 0..=n).prop_flat_map(move |(j, k)| (Just(f), ext_vector(f, n, j), ext_vector(f, n, k)))
        })
    ) {
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let expected = if (a.degree() * b.degree()) % 2 == 0 { ba } else { ba.scale(f.p() - 1) };
        prop_assert_eq!(ab, expected);
    }

    #[test]
    fn wedge_is_associative(
        (a, b, c) in (prime(), 1usize..7).prop_flat_map(|(p, n)| {
            let f = PrimeField::new(p).unwrap();
            (0..=n, 0..=n, 0..=n).prop_flat_map(move |(i, j, k)| {
                (ext_vector(f, n, i), ext_vector(f, n, j), ext_vector(f, n, k))
            })
        })
    ) {
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }
}

fn strict_spec() -> impl Strategy<Value = GroupSpec> {
    (prime(), 2usize..=5, any::<u64>()).prop_filter_map("no strict spec found", |(p, n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = (seed as usize) % (binomial(n, 2) + 1);
        random_strict_spec(&mut rng, p, n, m, 50)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn obstruction_dims_ignore_basis_order(spec in strict_spec(), seed in any::<u64>()) {
        let n = spec.dim_u();
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut ChaCha8Rng::seed_from_u64(seed));
        let a = analyze(&spec, true).unwrap();
        let b = analyze(&spec.permuted(&perm).unwrap(), true).unwrap();
        prop_assert_eq!((a.b0_dim, a.h3_dim), (b.b0_dim, b.h3_dim));
        prop_assert_eq!(a.degree3.k.dim, b.degree3.k.dim);
    }

    #[test]
    fn spec_and_report_json_round_trip(spec in strict_spec()) {
        let back = GroupSpec::from_json(&spec.to_json()).unwrap();
        prop_assert_eq!(&back, &spec);
        let report = analyze(&spec, true).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let parsed: unramified::obstruction::ObstructionReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&parsed).unwrap(), text);
    }

    #[test]
    fn group_law_identities(spec in strict_spec(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let order = spec.order() as u64;
        let [a, b, c] = [a, b, c].map(|x| spec.element_at(x % order));
        let e = spec.identity();
        prop_assert_eq!(
            spec.mul(&spec.mul(&a, &b).unwrap(), &c).unwrap(),
            spec.mul(&a, &spec.mul(&b, &c).unwrap()).unwrap()
        );
        prop_assert_eq!(spec.mul(&a, &spec.inv(&a).unwrap()).unwrap(), e.clone());
        prop_assert_eq!(spec.pow(&a, spec.p() as i64).unwrap(), e);
        let comm = spec.commutator(&a, &b).unwrap();
        let expected = GroupElement { u: vec![0; spec.dim_u()], v: spec.gamma_apply(&a.u, &b.u) };
        prop_assert_eq!(comm, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn coboundary_squares_to_zero(seed in any::<u64>(), degree in 0usize..=2, name in prop_oneof![Just("heisenberg3"), Just("elem9"), Just("cyclic3")]) {
        let g = Guard::default();
        let t = GroupTable::new(&builtin(name).unwrap(), &g).unwrap();
        let c = Cochain::random(&t, degree, seed, &g).unwrap();
        prop_assert!(coboundary(&t, &coboundary(&t, &c, &g).unwrap(), &g).unwrap().is_zero());
    }
}
