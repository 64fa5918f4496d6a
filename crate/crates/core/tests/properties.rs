//! Invariants across modules, checked on generated non-torsion points of
//! several curves E1(s): multiples of witnesses shifted by torsion points.

use facecuboid::correspondence::{
    composite_self_map, default_seed, fiber_f, forward_f, gamma_orbit, iso_b_to_a, lift_a, lift_b,
    map_a_to_bprime, rank_family, GammaElement, PairA, TripleA,
};
use facecuboid::cuboid::{
    b_orbit, canonicalize, class_fiber_32, cuboid_from_pair_b, pair_b_from_cuboid,
};
use facecuboid::curves::{CurveParams, CurvePoint};
use facecuboid::exactq::{int, q, BigRational};
use num_traits::{One, Zero};
use proptest::prelude::*;
use std::collections::BTreeSet;
use std::sync::OnceLock;

fn witnesses() -> &'static [TripleA] {
    static CELL: OnceLock<Vec<TripleA>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut all = vec![default_seed()];
        all.extend(
            rank_family(&default_seed(), 3)
                .unwrap()
                .members
                .into_iter()
                .map(|m| m.witness),
        );
        all
    })
}

/// `[n]W + T` for a witness `W` and torsion point `T`, as an element of A.
fn element(w: usize, n: i64, tor: usize) -> Option<TripleA> {
    let base = &witnesses()[w];
    let curve = base.curve();
    let shift = &curve.torsion_points().unwrap()[tor];
    let p = curve
        .add(&curve.scalar_mul(n, &base.point()).unwrap(), shift)
        .unwrap();
    match p {
        CurvePoint::Affine { x, y } if !y.is_zero() => TripleA::new(base.s().clone(), x, y).ok(),
        _ => None,
    }
}

fn arb_element() -> impl Strategy<Value = TripleA> {
    (0usize..4, prop_oneof![-3i64..=-1, 1i64..=3], 0usize..8)
        .prop_filter_map("point lies in A", |(w, n, tor)| element(w, n, tor))
}

fn arb_rational() -> impl Strategy<Value = BigRational> {
    (-10_000i64..=10_000, 1i64..=10_000).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gamma_is_a_klein_four_group(a in arb_element()) {
        let p = a.pair();
        for g in GammaElement::ALL {
            prop_assert_eq!(g.apply(&g.apply(&p)), p.clone());
            for h in GammaElement::ALL {
                prop_assert_eq!(g.apply(&h.apply(&p)), g.compose(h).apply(&p));
                prop_assert_eq!(g.compose(h), h.compose(g));
            }
        }
    }

    #[test]
    fn forward_map_is_gamma_invariant_and_fibers_are_orbits(a in arb_element()) {
        let p = a.pair();
        let image = forward_f(&p).unwrap();
        for g in GammaElement::ALL {
            prop_assert_eq!(forward_f(&g.apply(&p)).unwrap(), image.clone());
        }
        let fiber: BTreeSet<PairA> = fiber_f(&image).unwrap().into_iter().collect();
        let orbit: BTreeSet<PairA> = gamma_orbit(&p).unwrap().into_iter().collect();
        prop_assert_eq!(fiber.len(), 4);
        prop_assert_eq!(fiber, orbit);
    }

    #[test]
    fn triples_project_consistently(a in arb_element()) {
        let lifts = lift_a(&a.pair()).unwrap();
        prop_assert!(lifts.contains(&a));
        let b = map_a_to_bprime(&a).unwrap();
        prop_assert_eq!(b.pair().unwrap(), forward_f(&a.pair()).unwrap());
        let lifted = lift_b(&b.pair().unwrap()).unwrap();
        prop_assert_eq!(lifted.t(), b.t());
        prop_assert_eq!(lifted.gamma(), b.gamma());
    }

    #[test]
    fn cuboids_are_valid_and_invert(a in arb_element()) {
        let image = forward_f(&a.pair()).unwrap();
        let cuboid = cuboid_from_pair_b(&image).unwrap();
        prop_assert!(cuboid.is_valid());
        let class = canonicalize(&image).unwrap();
        prop_assert!(class.canonical.t() > &int(1));
        for member in b_orbit(&image) {
            let other = cuboid_from_pair_b(&member).unwrap();
            prop_assert!(other.is_similar_to(&cuboid));
            prop_assert_eq!(canonicalize(&member).unwrap(), class.clone());
        }
        let scale = q(7, 3);
        let [bf, ef, gf] = cuboid.edges();
        let recovered = pair_b_from_cuboid(&(bf * &scale), &(ef * &scale), &(gf * &scale)).unwrap();
        prop_assert_eq!(recovered, class.canonical.clone());
        let [p0, p1, p2] = class.primitive_edges.clone();
        let from_integers = pair_b_from_cuboid(
            &BigRational::from_integer(p0),
            &BigRational::from_integer(p1),
            &BigRational::from_integer(p2),
        )
        .unwrap();
        prop_assert_eq!(from_integers, class.canonical);
    }

    #[test]
    fn isomorphism_is_a_homomorphism(a in arb_element(), i in -2i64..=2, j in 0usize..8) {
        let b = map_a_to_bprime(&a).unwrap();
        let e2 = b.curve();
        let p = b.point();
        let r = e2.add(&e2.scalar_mul(i, &p).unwrap(), &e2.torsion_points().unwrap()[j]).unwrap();
        let image = iso_b_to_a(&b).unwrap();
        let e1 = image.curve();
        let iso = |pt: &CurvePoint| facecuboid::correspondence::transport_point(b.t(), pt);
        prop_assert!(e1.contains(&iso(&r)));
        prop_assert_eq!(iso(&e2.add(&p, &r).unwrap()), e1.add(&iso(&p), &iso(&r)).unwrap());
        prop_assert_eq!(iso(&p), image.point());
    }

    #[test]
    fn composite_map_preserves_non_torsion(a in arb_element()) {
        match composite_self_map(&a) {
            Ok(image) => {
                let curve = image.curve();
                prop_assert!(curve.contains(&image.point()));
                prop_assert!(!curve.is_torsion(&image.point()).unwrap());
            }
            // The map has a pole where its denominator vanishes.
            Err(e) => prop_assert!(matches!(e, facecuboid::Error::Domain(_)), "{e}"),
        }
    }

    #[test]
    fn difference_of_squares_identity(s in arb_rational(), t in arb_rational()) {
        prop_assume!(!s.is_zero());
        let one = BigRational::one();
        let inv = s.recip();
        let lhs = &t * &t * (&s - &inv) * (&s - &inv) - (&t * &t - &one) * (&t * &t - &one);
        let rhs = &inv * &inv * (&s + &t) * (&s - &t) * (&t * &s + &one) * (&t * &s - &one);
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn class_fiber_contains_every_preimage(a in arb_element()) {
        let image = forward_f(&a.pair()).unwrap();
        let fiber = class_fiber_32(&image).unwrap();
        let distinct: BTreeSet<_> = fiber.iter().collect();
        prop_assert_eq!(distinct.len(), 32);
        prop_assert!(fiber.contains(&a));
        let class = canonicalize(&image).unwrap();
        for t in &fiber {
            let b = map_a_to_bprime(t).unwrap().pair().unwrap();
            prop_assert_eq!(canonicalize(&b).unwrap(), class.clone());
        }
    }
}

#[test]
fn curves_of_generated_elements_are_distinct() {
    let params: BTreeSet<_> = witnesses().iter().map(|w| w.s().clone()).collect();
    assert_eq!(params.len(), witnesses().len());
    for w in witnesses() {
        let e = CurveParams::e1(w.s()).unwrap();
        assert!(e.contains(&w.point()));
    }
}
