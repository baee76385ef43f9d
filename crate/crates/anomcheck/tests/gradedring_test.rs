//! The truncated graded polynomial ring: arithmetic, truncation,
//! serialization, substitution, and the ring axioms under random inputs.

use std::sync::Arc;

use num::{BigInt, BigRational, Zero};
use proptest::prelude::*;

use anomcheck::error::Error;
use anomcheck::gradedring::{GradedElement, RingContext};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ctx() -> Arc<RingContext> {
    RingContext::standard(12)
}

// ---------------------------------------------------------------------------
// Construction and basic arithmetic.

#[test]
fn standard_context_has_twelve_generators_with_even_degrees() {
    let ring = ctx();
    let names: Vec<&str> = ring.generators().iter().map(|g| g.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "m", "n", "c", "p1T", "p2T", "p3T", "p1F1", "p2F1", "p3F1", "p1F2", "p2F2", "p3F2"
        ]
    );
    let degrees: Vec<u32> = ring.generators().iter().map(|g| g.degree).collect();
    assert_eq!(degrees, [0, 0, 2, 4, 8, 12, 4, 8, 12, 4, 8, 12]);
    assert_eq!(ring.max_degree(), 12);
}

#[test]
fn odd_or_zero_truncation_degree_is_rejected() {
    assert!(matches!(
        RingContext::new(&[("a", 2)], 7),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        RingContext::new(&[("a", 2)], 0),
        Err(Error::Config(_))
    ));
}

#[test]
fn duplicate_generator_names_are_rejected() {
    assert!(RingContext::new(&[("a", 2), ("a", 4)], 12).is_err());
}

#[test]
fn products_truncate_above_the_degree_bound() {
    let ring = ctx();
    let p3t = GradedElement::generator(&ring, "p3T").unwrap();
    let p1t = GradedElement::generator(&ring, "p1T").unwrap();
    // degree 12 * degree 4 = degree 16 > 12: gone.
    assert!(p3t.mul(&p1t).unwrap().is_zero());
    // degree 0 generators never truncate.
    let m = GradedElement::generator(&ring, "m").unwrap();
    assert!(!m.pow(40).unwrap().is_zero());
}

#[test]
fn extract_degree_partitions_an_element() {
    let ring = ctx();
    let e = GradedElement::parse(&ring, "3*m - 1/2*c^2*p1T + p2T + 7*p1T^2 - c^6").unwrap();
    let mut sum = GradedElement::zero(&ring);
    for d in (0..=12).step_by(2) {
        let part = e.extract_degree(d);
        assert!(part.is_homogeneous(d));
        sum = sum.add(&part).unwrap();
    }
    assert_eq!(sum, e);
}

#[test]
fn constant_term_and_nilpotency() {
    let ring = ctx();
    let e = GradedElement::parse(&ring, "2*m + p1T").unwrap();
    assert_eq!(e.constant_term(), BigRational::zero());
    assert!(!e.is_nilpotent()); // the degree-0 part 2m is nonzero
    let f = GradedElement::parse(&ring, "p1T + c^2").unwrap();
    assert!(f.is_nilpotent());
    assert!(f.pow(4).unwrap().is_zero()); // degree 16 > 12
}

// ---------------------------------------------------------------------------
// exp, inverses, univariate series.

#[test]
fn exp_of_nilpotent_terminates_and_multiplies() {
    let ring = ctx();
    let a = GradedElement::parse(&ring, "p1T").unwrap();
    let b = GradedElement::parse(&ring, "c^2 - p1F1").unwrap();
    let ea = a.exp_nilpotent().unwrap();
    let eb = b.exp_nilpotent().unwrap();
    let eab = a.add(&b).unwrap().exp_nilpotent().unwrap();
    assert_eq!(ea.mul(&eb).unwrap(), eab);
    // e^a e^(-a) = 1.
    assert_eq!(
        ea.mul(&a.neg().exp_nilpotent().unwrap()).unwrap(),
        GradedElement::one(&ring)
    );
}

#[test]
fn exp_rejects_non_nilpotent_input() {
    let ring = ctx();
    let m = GradedElement::generator(&ring, "m").unwrap();
    assert!(matches!(m.exp_nilpotent(), Err(Error::NotNilpotent)));
}

#[test]
fn invert_unit_requires_constant_part_one() {
    let ring = ctx();
    let u = GradedElement::parse(&ring, "1 + p1T + c^2").unwrap();
    let inv = u.invert_unit().unwrap();
    assert_eq!(u.mul(&inv).unwrap(), GradedElement::one(&ring));
    let not_unit = GradedElement::parse(&ring, "2 + p1T").unwrap();
    assert!(matches!(not_unit.invert_unit(), Err(Error::NotUnit)));
}

#[test]
fn try_reciprocal_inverts_nonzero_rational_leading_part() {
    let ring = ctx();
    let e = GradedElement::parse(&ring, "2 + p1T").unwrap();
    let r = e.try_reciprocal().unwrap();
    assert_eq!(e.mul(&r).unwrap(), GradedElement::one(&ring));
    // A symbolic or vanishing degree-0 part has no rational reciprocal.
    let m = GradedElement::generator(&ring, "m").unwrap();
    assert!(m.try_reciprocal().is_err());
    assert!(GradedElement::generator(&ring, "p1T")
        .unwrap()
        .try_reciprocal()
        .is_err());
}

#[test]
fn univariate_series_application_matches_direct_expansion() {
    let ring = ctx();
    let x = GradedElement::parse(&ring, "p1T - p1F1").unwrap();
    // f(y) = 1 + y/2 + y^2/3 + y^3/5.
    let coeffs = [rat(1, 1), rat(1, 2), rat(1, 3), rat(1, 5)];
    let direct = GradedElement::one(&ring)
        .add(&x.scale(&rat(1, 2)))
        .unwrap()
        .add(&x.pow(2).unwrap().scale(&rat(1, 3)))
        .unwrap()
        .add(&x.pow(3).unwrap().scale(&rat(1, 5)))
        .unwrap();
    assert_eq!(x.apply_univariate_series(&coeffs).unwrap(), direct);
}

#[test]
fn univariate_series_errors_when_coefficients_run_out() {
    let ring = ctx();
    let c = GradedElement::generator(&ring, "c").unwrap();
    // c survives to degree 12, i.e. powers up to 6; two coefficients are
    // not enough and silently dropping terms would be wrong.
    assert!(matches!(
        c.apply_univariate_series(&[rat(1, 1), rat(1, 1)]),
        Err(Error::SeriesTooShort { .. })
    ));
}

// ---------------------------------------------------------------------------
// Display and parse.

#[test]
fn display_matches_the_expected_grammar() {
    let ring = ctx();
    let zero = GradedElement::zero(&ring);
    assert_eq!(zero.to_string(), "0");
    let e = GradedElement::generator(&ring, "p1T")
        .unwrap()
        .scale(&rat(-1, 24));
    assert_eq!(e.to_string(), "-1/24*p1T");
    let f = GradedElement::parse(&ring, "m^2 - 2*m*n + n^2").unwrap();
    assert_eq!(f.to_string(), "m^2 - 2*m*n + n^2");
    // Unit coefficients are elided, constants keep their number.
    let g = GradedElement::parse(&ring, "1 + c^2 - p1T").unwrap();
    assert_eq!(g.to_string(), "c^2 - p1T + 1");
}

#[test]
fn parse_accepts_whitespace_and_rationals() {
    let ring = ctx();
    let a = GradedElement::parse(&ring, " -  1/24 * p1T + 3*c ^ 2 ").unwrap();
    let b = GradedElement::generator(&ring, "p1T")
        .unwrap()
        .scale(&rat(-1, 24))
        .add(
            &GradedElement::generator(&ring, "c")
                .unwrap()
                .pow(2)
                .unwrap()
                .scale(&rat(3, 1)),
        )
        .unwrap();
    assert_eq!(a, b);
}

#[test]
fn parse_rejects_unknown_generators_and_garbage() {
    let ring = ctx();
    assert!(matches!(
        GradedElement::parse(&ring, "q1T"),
        Err(Error::UnknownGenerator(_))
    ));
    assert!(matches!(
        GradedElement::parse(&ring, "1 +"),
        Err(Error::Parse { .. })
    ));
    assert!(GradedElement::parse(&ring, "").is_err());
}

// ---------------------------------------------------------------------------
// Substitution.

#[test]
fn substitution_is_a_ring_homomorphism() {
    let ring = ctx();
    let a = GradedElement::parse(&ring, "m*p1T - c^2").unwrap();
    let b = GradedElement::parse(&ring, "p1F1 + 2*c^2").unwrap();
    let image = [
        ("m", GradedElement::parse(&ring, "n + 32").unwrap()),
        ("p1T", GradedElement::parse(&ring, "p1T - 4*c^2").unwrap()),
    ];
    let lhs = a.mul(&b).unwrap().substitute_same(&image).unwrap();
    let rhs = a
        .substitute_same(&image)
        .unwrap()
        .mul(&b.substitute_same(&image).unwrap())
        .unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn substitution_requires_homogeneous_images() {
    let ring = ctx();
    let e = GradedElement::generator(&ring, "p1T").unwrap();
    // p1T has degree 4; an image mixing degrees 4 and 0 is rejected.
    let bad = [("p1T", GradedElement::parse(&ring, "p1F1 + 1").unwrap())];
    assert!(matches!(
        e.substitute_same(&bad),
        Err(Error::InhomogeneousSubstitution { .. })
    ));
}

#[test]
fn substitution_can_move_between_contexts() {
    // The assignment must cover every source generator that has no
    // same-named counterpart in the target context.
    let big = ctx();
    let small = RingContext::new(&[("p1T", 4), ("p1F", 4)], 12).unwrap();
    let e = GradedElement::parse(&big, "m*p1T - 2*p1F1").unwrap();
    let mut image = vec![
        ("m", GradedElement::from_int(&small, 32)),
        ("p1F1", GradedElement::generator(&small, "p1F").unwrap()),
    ];
    for gone in ["n", "c", "p2T", "p3T", "p2F1", "p3F1", "p1F2", "p2F2", "p3F2"] {
        image.push((gone, GradedElement::zero(&small)));
    }
    let moved = e.substitute(&small, &image).unwrap();
    assert_eq!(
        moved,
        GradedElement::parse(&small, "32*p1T - 2*p1F").unwrap()
    );

    // An uncovered source generator with no counterpart is an error even
    // when the element being moved never mentions it.
    assert!(matches!(
        e.substitute(&small, &image[..1]),
        Err(Error::UnknownGenerator(_))
    ));
}

// ---------------------------------------------------------------------------
// Randomized ring axioms and serialization round trips.

fn arb_element(ring: Arc<RingContext>) -> impl Strategy<Value = GradedElement> {
    // Sums of up to four monomials with small coefficients and exponents.
    let gen_count = ring.len();
    let term = (
        prop::collection::vec(0u16..3, gen_count),
        -6i64..7,
        1i64..5,
    );
    prop::collection::vec(term, 0..4).prop_map(move |terms| {
        let mut acc = GradedElement::zero(&ring);
        for (exps, num, den) in terms {
            let mut mono = GradedElement::constant(&ring, rat(num, den));
            for (i, &k) in exps.iter().enumerate() {
                let name = ring.generators()[i].name.clone();
                let g = GradedElement::generator(&ring, &name).unwrap();
                mono = mono.mul(&g.pow(k as u32).unwrap()).unwrap();
            }
            acc = acc.add(&mono).unwrap();
        }
        acc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn addition_commutes(
        a in arb_element(ctx()),
        b in arb_element(ctx()),
    ) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
    }

    #[test]
    fn multiplication_commutes_and_associates(
        a in arb_element(ctx()),
        b in arb_element(ctx()),
        c in arb_element(ctx()),
    ) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(
            a.mul(&b.mul(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().mul(&c).unwrap()
        );
    }

    #[test]
    fn multiplication_distributes(
        a in arb_element(ctx()),
        b in arb_element(ctx()),
        c in arb_element(ctx()),
    ) {
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn additive_inverse_and_zero(a in arb_element(ctx())) {
        prop_assert!(a.add(&a.neg()).unwrap().is_zero());
        prop_assert_eq!(a.add(&GradedElement::zero(&a.ctx().clone())).unwrap(), a);
    }

    #[test]
    fn display_parse_round_trip(a in arb_element(ctx())) {
        let ring = a.ctx().clone();
        let back = GradedElement::parse(&ring, &a.to_string()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn extraction_is_linear(
        a in arb_element(ctx()),
        b in arb_element(ctx()),
    ) {
        for d in [0u32, 2, 4, 8, 12] {
            prop_assert_eq!(
                a.add(&b).unwrap().extract_degree(d),
                a.extract_degree(d).add(&b.extract_degree(d)).unwrap()
            );
        }
    }

    #[test]
    fn exponentials_of_nilpotents_are_units(a in arb_element(ctx())) {
        // Strip the degree-0 part to force nilpotency.
        let nil = a.sub(&a.extract_degree(0)).unwrap();
        let e = nil.exp_nilpotent().unwrap();
        prop_assert_eq!(e.extract_degree(0), GradedElement::one(&nil.ctx().clone()));
        let inv = e.invert_unit().unwrap();
        prop_assert_eq!(e.mul(&inv).unwrap(), GradedElement::one(&nil.ctx().clone()));
    }
}
