//! Structural invariants checked on generated inputs.

use proptest::prelude::*;

use normhol::bbi::{classify_bbi, construct_type, TypeData};
use normhol::curvature::{conjugate_tensor, olmos_tensor, so_basis, ShapeFamily};
use normhol::field::{format_rational, parse_rational, simplest_between};
use normhol::holonomy::{borel_lichnerowicz, BLOutcome};
use normhol::lie::{lie_closure, LieAlgebraSpan};
use normhol::linalg::{dot, Matrix};
use normhol::pseudo_euclidean::SignatureSpace;
use normhol::{Field, Q};

fn rational() -> impl Strategy<Value = Q> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Q::ratio(n, d))
}

fn symmetric(d: usize) -> impl Strategy<Value = Matrix<Q>> {
    prop::collection::vec(rational(), d * (d + 1) / 2).prop_map(move |vals| {
        let mut m = Matrix::zeros(d, d);
        let mut it = vals.into_iter();
        for i in 0..d {
            for j in i..d {
                let x = it.next().unwrap();
                m.set(i, j, x.clone());
                m.set(j, i, x);
            }
        }
        m
    })
}

fn family() -> impl Strategy<Value = ShapeFamily<Q>> {
    (0usize..=1, 1usize..=3, 1usize..=3)
        .prop_filter("normal space of dimension at least 2", |(p, q, _)| 2 * p + q >= 2)
        .prop_flat_map(|(p, q, d)| {
            let space = SignatureSpace::new(p, q);
            prop::collection::vec(symmetric(d), space.dim()).prop_map(move |ops| ShapeFamily::new(space, d, ops).unwrap())
        })
}

/// Reflection in a non-null vector, or `None` for a null one.
fn reflection(g: &Matrix<Q>, u: &[Q]) -> Option<Matrix<Q>> {
    let gu = g.mul_vec(u);
    let norm = dot(u, &gu);
    if norm.is_zero() {
        return None;
    }
    let n = u.len();
    Some(Matrix::from_fn(n, n, |i, j| {
        let id = if i == j { <Q as Field>::one() } else { <Q as Field>::zero() };
        id.sub(&u[i].mul(&gu[j]).mul(&Q::from_i64(2)).div(&norm))
    }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn olmos_tensor_is_an_algebraic_curvature_tensor(f in family()) {
        let r = olmos_tensor(&f);
        prop_assert!(r.check_identities().all());
    }

    #[test]
    fn conjugation_preserves_identities(f in family(), u in prop::collection::vec(rational(), 7)) {
        let space = *f.space();
        let g = space.gram::<Q>();
        if let Some(tau) = reflection(&g, &u[..space.dim()]) {
            let base = olmos_tensor(&f);
            let r = conjugate_tensor(&base, &tau).unwrap();
            prop_assert!(r.check_identities().all());
            // A reflection is an involution, so conjugating twice is the identity.
            let back = conjugate_tensor(&r, &tau).unwrap();
            prop_assert_eq!(back.values(), base.values());
        }
    }

    #[test]
    fn curvature_operators_are_metric_skew(f in family()) {
        let r = olmos_tensor(&f);
        let space = *f.space();
        let g = space.gram::<Q>();
        for op in r.operators() {
            let lhs = g.mul(&op);
            prop_assert_eq!(lhs.transpose(), lhs.neg());
        }
    }

    #[test]
    fn lie_closure_is_closed(gens in prop::collection::vec(prop::collection::vec(-2i64..=2, 6), 1..=2)) {
        // Skew 4x4 matrices from their upper triangles.
        let mats: Vec<Matrix<Q>> = gens
            .iter()
            .map(|v| {
                let mut m = Matrix::zeros(4, 4);
                let mut k = 0;
                for i in 0..4 {
                    for j in i + 1..4 {
                        m.set(i, j, Q::from_i64(v[k]));
                        m.set(j, i, Q::from_i64(-v[k]));
                        k += 1;
                    }
                }
                m
            })
            .collect();
        let alg = lie_closure(4, &mats).unwrap();
        prop_assert!(alg.is_lie_closed());
        prop_assert!(mats.iter().all(|m| alg.contains(m)));
        prop_assert!(alg.dim() <= 6);
    }

    #[test]
    fn block_algebras_decompose(sizes in prop::collection::vec(prop::sample::select(vec![1usize, 2, 3]), 1..=3)) {
        let n: usize = sizes.iter().sum();
        let mut gens = Vec::new();
        let mut off = 0;
        for &s in &sizes {
            if s > 1 {
                for b in so_basis::<Q>(s) {
                    gens.push(Matrix::from_fn(n, n, |i, j| {
                        if (off..off + s).contains(&i) && (off..off + s).contains(&j) { b.get(i - off, j - off).clone() } else { <Q as Field>::zero() }
                    }));
                }
            }
            off += s;
        }
        let g = LieAlgebraSpan::span_of(n, &gens);
        match borel_lichnerowicz(&g, 3).unwrap() {
            BLOutcome::Decomposition(d) => {
                prop_assert!(d.verify(&g));
                prop_assert_eq!(d.modules.len(), sizes.iter().filter(|&&s| s > 1).count());
            }
            BLOutcome::NoBL(_) => prop_assert!(false, "block algebra without decomposition"),
        }
    }

    #[test]
    fn type2_round_trip(k in prop::sample::select(vec![0usize, 2, 3]), extra in 0usize..=2) {
        let m = k.max(1) + extra;
        let gens: Vec<Matrix<Q>> = if k == 0 {
            Vec::new()
        } else {
            so_basis::<Q>(k)
                .iter()
                .map(|b| Matrix::from_fn(m, m, |i, j| if i < k && j < k { b.get(i, j).clone() } else { <Q as Field>::zero() }))
                .collect()
        };
        let alg = construct_type(m, &gens, &TypeData::Type2).unwrap();
        let c = classify_bbi(&SignatureSpace::lorentzian(m), &alg, 11).unwrap();
        prop_assert_eq!(c.tag.as_str(), "Type2");
        prop_assert_eq!(c.g.dim(), gens.len());
    }

    #[test]
    fn rational_strings_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let q = Q::ratio(n, d);
        let s = format_rational(&q);
        prop_assert!(s.contains('/'));
        prop_assert_eq!(parse_rational(&s).unwrap(), q);
    }

    #[test]
    fn simplest_rational_lies_in_interval(n in -1000i64..1000, d in 1i64..200, w in 1i64..50) {
        let center = Q::ratio(n, d);
        let radius = Q::ratio(1, 100 * w);
        let lo = center.sub(&radius);
        let hi = center.add(&radius);
        let s = simplest_between(&lo, &hi);
        prop_assert!(lo <= s && s <= hi);
        // No rational with a smaller denominator fits.
        let den: i64 = s.denom().try_into().unwrap();
        for smaller in 1..den {
            let first = (lo.clone() * Q::from_i64(smaller)).ceil();
            prop_assert!(first / Q::from_i64(smaller) > hi);
        }
    }
}
