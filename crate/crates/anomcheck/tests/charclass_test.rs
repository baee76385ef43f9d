//! Chern-character calculus: genus polynomials, Adams operations,
//! exterior/symmetric squares against brute-force root enumeration, the
//! low-order coefficients of each infinite product factor, and the
//! theta-quotient assembly.

use num::{BigInt, BigRational};
use proptest::prelude::*;

use anomcheck::anomaly::symbolic_set;
use anomcheck::charclass::{
    chern_root_set, euler_factor, lambda_product_ch, lambda_t_ch, sym_t_ch,
    theta_quotient_expansion, theta1_expansion, theta2_expansion, AtomKind, BundleExpr, BundleSet,
    EulerMode, GenusSpec, ProductFamily,
};
use anomcheck::gradedring::GradedElement;
use anomcheck::{QSeries, XiMode};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn sset() -> BundleSet {
    symbolic_set(12, XiMode::Generic).unwrap()
}

// ---------------------------------------------------------------------------
// Genus polynomials, frozen.

#[test]
fn a_hat_polynomial_matches_the_classical_coefficients() {
    let set = sset();
    let ring = set.ring();
    let form = GenusSpec::a_hat(12).genus_form(set.atom(AtomKind::Tz)).unwrap();
    let expect = GradedElement::parse(
        ring,
        "1 - 1/24*p1T + 7/5760*p1T^2 - 1/1440*p2T \
         - 31/967680*p1T^3 + 11/241920*p1T*p2T - 1/60480*p3T",
    )
    .unwrap();
    assert_eq!(form, expect);
}

#[test]
fn l_polynomial_matches_the_classical_coefficients() {
    let set = sset();
    let ring = set.ring();
    let form = GenusSpec::l_genus(12).genus_form(set.atom(AtomKind::Tz)).unwrap();
    let expect = GradedElement::parse(
        ring,
        "1 + 1/3*p1T - 1/45*p1T^2 + 7/45*p2T \
         + 2/945*p1T^3 - 13/945*p1T*p2T + 62/945*p3T",
    )
    .unwrap();
    assert_eq!(form, expect);
}

#[test]
fn genus_is_multiplicative_over_direct_sums() {
    let set = sset();
    let a = set.atom(AtomKind::Tz);
    let b = set.atom(AtomKind::F1);
    let sum = a.direct_sum(b, "TZ+F1").unwrap();
    let spec = GenusSpec::a_hat(12);
    assert_eq!(
        spec.genus_form(&sum).unwrap(),
        spec.genus_form(a)
            .unwrap()
            .mul(&spec.genus_form(b).unwrap())
            .unwrap()
    );
}

// ---------------------------------------------------------------------------
// Chern characters and the Newton identities.

#[test]
fn chern_character_of_a_pontryagin_atom() {
    let set = sset();
    let ring = set.ring();
    // ch = rank + p1/1 + (p1^2 - 2 p2)/12 + (p1^3 - 3 p1 p2 + 3 p3)/360.
    let expect = GradedElement::parse(
        ring,
        "10 + p1T + 1/12*p1T^2 - 1/6*p2T + 1/360*p1T^3 - 1/120*p1T*p2T + 1/120*p3T",
    )
    .unwrap();
    assert_eq!(set.ch(&BundleExpr::atom(AtomKind::Tz)).unwrap(), expect);
}

#[test]
fn pontryagin_classes_are_recovered_from_power_sums() {
    let set = sset();
    let ring = set.ring();
    let a = set.atom(AtomKind::F1);
    let (pi1, pi2, pi3) = (a.power_sum(1), a.power_sum(2), a.power_sum(3));
    let p1 = GradedElement::generator(ring, "p1F1").unwrap();
    let p2 = GradedElement::generator(ring, "p2F1").unwrap();
    let p3 = GradedElement::generator(ring, "p3F1").unwrap();
    // Newton in reverse: e1 = pi1, e2 = (e1 pi1 - pi2)/2,
    // e3 = (pi3 - pi2 e1 + pi1 e2)/3... with alternating signs folded in.
    assert_eq!(pi1, &p1);
    assert_eq!(
        p2,
        p1.mul(pi1).unwrap().sub(pi2).unwrap().scale(&rat(1, 2))
    );
    assert_eq!(
        p3,
        pi3.sub(&pi2.mul(&p1).unwrap())
            .unwrap()
            .add(&pi1.mul(&p2).unwrap())
            .unwrap()
            .scale(&rat(1, 3))
    );
}

#[test]
fn adams_operations_match_explicit_roots() {
    // Rank-4 bundle with half-roots y1, y2: psi^k has roots k*y_i.
    let set = chern_root_set(12, 4, 2).unwrap();
    let ring = set.ring();
    let y1 = GradedElement::generator(ring, "y1").unwrap();
    let y2 = GradedElement::generator(ring, "y2").unwrap();
    for k in 1..=4u32 {
        let mut expect = GradedElement::zero(ring);
        for root in [&y1, &y2] {
            let kr = root.scale_int(k as i64);
            expect = expect
                .add(&kr.exp_nilpotent().unwrap())
                .unwrap()
                .add(&kr.neg().exp_nilpotent().unwrap())
                .unwrap();
        }
        assert_eq!(
            set.ch_adams(k, &BundleExpr::atom(AtomKind::F1)).unwrap(),
            expect,
            "psi^{k}"
        );
    }
}

#[test]
fn exterior_and_symmetric_squares_match_brute_force_root_sums() {
    // Complexified roots of the rank-4 bundle: +-y1, +-y2.  The exterior
    // square has the six pairwise sums of distinct roots, the symmetric
    // square the ten with repetition.
    let set = chern_root_set(12, 4, 2).unwrap();
    let ring = set.ring();
    let y1 = GradedElement::generator(ring, "y1").unwrap();
    let y2 = GradedElement::generator(ring, "y2").unwrap();
    let e = |v: &GradedElement| v.exp_nilpotent().unwrap();
    let roots = [y1.clone(), y1.neg(), y2.clone(), y2.neg()];

    let mut lambda2 = GradedElement::zero(ring);
    for i in 0..4 {
        for j in (i + 1)..4 {
            lambda2 = lambda2.add(&e(&roots[i].add(&roots[j]).unwrap())).unwrap();
        }
    }
    let f1 = BundleExpr::atom(AtomKind::F1);
    assert_eq!(set.ch(&BundleExpr::lambda2(f1.clone())).unwrap(), lambda2);

    let mut sym2 = GradedElement::zero(ring);
    for i in 0..4 {
        for j in i..4 {
            sym2 = sym2.add(&e(&roots[i].add(&roots[j]).unwrap())).unwrap();
        }
    }
    assert_eq!(set.ch(&BundleExpr::sym2(f1.clone())).unwrap(), sym2);

    // Lambda^2 + Sym^2 = the full tensor square.
    let chf = set.ch(&f1).unwrap();
    assert_eq!(
        lambda2.add(&sym2).unwrap(),
        chf.mul(&chf).unwrap()
    );
}

#[test]
fn exterior_square_of_the_rank_two_bundle_is_its_determinant_pattern() {
    // Roots +-c pair to c + (-c) = 0: ch L2 = 1 exactly.
    let set = sset();
    assert_eq!(
        set.ch(&BundleExpr::lambda2(BundleExpr::atom(AtomKind::Xi)))
            .unwrap(),
        GradedElement::one(set.ring())
    );
}

#[test]
fn virtual_ranks_follow_the_square_formulas() {
    let set = sset();
    let ring = set.ring();
    let m = GradedElement::generator(ring, "m").unwrap();
    let f1 = BundleExpr::atom(AtomKind::F1);
    let r_l2 = set.rank(&BundleExpr::lambda2(f1.clone())).unwrap();
    let r_s2 = set.rank(&BundleExpr::sym2(f1.clone())).unwrap();
    let one = GradedElement::one(ring);
    assert_eq!(
        r_l2,
        m.mul(&m.sub(&one).unwrap()).unwrap().scale(&rat(1, 2))
    );
    assert_eq!(
        r_s2,
        m.mul(&m.add(&one).unwrap()).unwrap().scale(&rat(1, 2))
    );
    assert!(set
        .rank(&BundleExpr::tilde(f1))
        .unwrap()
        .is_zero());
}

// ---------------------------------------------------------------------------
// Euler factor.

#[test]
fn euler_factor_closed_forms() {
    let set = sset();
    let ring = set.ring();
    assert_eq!(
        euler_factor(&set, EulerMode::CoshHalf).unwrap(),
        GradedElement::parse(ring, "1 + 1/8*c^2 + 1/384*c^4 + 1/46080*c^6").unwrap()
    );
    assert_eq!(
        euler_factor(&set, EulerMode::ExpHalf).unwrap(),
        GradedElement::parse(
            ring,
            "1 + 1/2*c + 1/8*c^2 + 1/48*c^3 + 1/384*c^4 + 1/3840*c^5 + 1/46080*c^6"
        )
        .unwrap()
    );
    // The two modes differ only in degrees congruent to 2 mod 4 (odd
    // powers of c), which all even-degree extractions at 8 and 12 kill
    // after multiplication by even-degree classes.
    let diff = euler_factor(&set, EulerMode::ExpHalf)
        .unwrap()
        .sub(&euler_factor(&set, EulerMode::CoshHalf).unwrap())
        .unwrap();
    assert!(!diff.is_zero());
    let mut odd_part = GradedElement::zero(ring);
    for d in [2u32, 6, 10] {
        odd_part = odd_part.add(&diff.extract_degree(d)).unwrap();
    }
    assert_eq!(diff, odd_part);
}

// ---------------------------------------------------------------------------
// Infinite products: low-order closed forms of each factor.

fn coefficient(series: &QSeries<GradedElement>, h: u32) -> GradedElement {
    series.coefficient(h).unwrap()
}

#[test]
fn symmetric_product_of_the_reduced_tangent_bundle() {
    let set = sset();
    let tz = BundleExpr::tilde(BundleExpr::atom(AtomKind::Tz));
    let s = lambda_product_ch(&set, &tz, ProductFamily::SymWhole, 4).unwrap();
    assert_eq!(coefficient(&s, 0), GradedElement::one(set.ring()));
    assert!(coefficient(&s, 1).is_zero());
    // q^1 coefficient: ch(TcZ) - 10.
    let expect = set
        .ch(&BundleExpr::atom(AtomKind::Tz))
        .unwrap()
        .sub(&GradedElement::from_int(set.ring(), 10))
        .unwrap();
    assert_eq!(coefficient(&s, 2), expect);
}

#[test]
fn half_indexed_exterior_product_of_the_first_bundle() {
    let set = sset();
    let ring = set.ring();
    let m = set.atom(AtomKind::F1).rank().clone();
    let f1 = BundleExpr::atom(AtomKind::F1);
    let s = lambda_product_ch(
        &set,
        &BundleExpr::tilde(f1.clone()),
        ProductFamily::LambdaMinusHalf,
        4,
    )
    .unwrap();
    // q^(1/2): ch(m - F1); q^1: ch(L2 F1 - m F1 + m(m+1)/2).
    let h1 = m.sub(&set.ch(&f1).unwrap()).unwrap();
    assert_eq!(coefficient(&s, 1), h1);
    let mm1 = m
        .mul(&m.add(&GradedElement::one(ring)).unwrap())
        .unwrap()
        .scale(&rat(1, 2));
    let h2 = set
        .ch(&BundleExpr::lambda2(f1.clone()))
        .unwrap()
        .sub(&m.mul(&set.ch(&f1).unwrap()).unwrap())
        .unwrap()
        .add(&mm1)
        .unwrap();
    assert_eq!(coefficient(&s, 2), h2);
}

#[test]
fn reciprocal_half_indexed_exterior_product_of_the_second_bundle() {
    let set = sset();
    let ring = set.ring();
    let n = set.atom(AtomKind::F2).rank().clone();
    let f2 = BundleExpr::atom(AtomKind::F2);
    let minus = BundleExpr::constant(GradedElement::zero(ring)) - BundleExpr::tilde(f2.clone());
    let s = lambda_product_ch(&set, &minus, ProductFamily::LambdaMinusHalf, 4).unwrap();
    // q^(1/2): ch(F2 - n); q^1: ch(S2 F2 - n F2 + n(n-1)/2).
    assert_eq!(
        coefficient(&s, 1),
        set.ch(&f2).unwrap().sub(&n).unwrap()
    );
    let nn1 = n
        .mul(&n.sub(&GradedElement::one(ring)).unwrap())
        .unwrap()
        .scale(&rat(1, 2));
    let h2 = set
        .ch(&BundleExpr::sym2(f2.clone()))
        .unwrap()
        .sub(&n.mul(&set.ch(&f2).unwrap()).unwrap())
        .unwrap()
        .add(&nn1)
        .unwrap();
    assert_eq!(coefficient(&s, 2), h2);
}

#[test]
fn twist_factors_have_the_expected_low_coefficients() {
    let set = sset();
    let ring = set.ring();
    let xi = BundleExpr::tilde(BundleExpr::atom(AtomKind::Xi));
    let u = set.ch(&xi).unwrap();

    // 1 / Lam_{-q^(1/2)}(xi~)^2, i.e. the family applied to -2 xi~:
    // 1 + 2 xi~ q^(1/2) + (3 xi~ xi~ + 4 xi~) q + ...
    let two = BundleExpr::Const(GradedElement::from_int(ring, 2));
    let minus2 = BundleExpr::constant(GradedElement::zero(ring)) - two * xi.clone();
    let s = lambda_product_ch(&set, &minus2, ProductFamily::LambdaMinusHalf, 4).unwrap();
    assert_eq!(coefficient(&s, 1), u.scale_int(2));
    assert_eq!(
        coefficient(&s, 2),
        u.mul(&u).unwrap().scale_int(3).add(&u.scale_int(4)).unwrap()
    );

    // Lam_{+q^(1/2)}(xi~): 1 + xi~ q^(1/2) - 2 xi~ q + ...
    let s = lambda_product_ch(&set, &xi, ProductFamily::LambdaPlusHalf, 4).unwrap();
    assert_eq!(coefficient(&s, 1), u.clone());
    assert_eq!(coefficient(&s, 2), u.scale_int(-2));

    // Lam_{+q}(xi~): 1 + xi~ q + ...
    let s = lambda_product_ch(&set, &xi, ProductFamily::LambdaWhole, 4).unwrap();
    assert!(coefficient(&s, 1).is_zero());
    assert_eq!(coefficient(&s, 2), u);
}

#[test]
fn whole_exponent_theta_series_has_no_half_powers() {
    let set = sset();
    let v = BundleExpr::atom(AtomKind::F1) - BundleExpr::atom(AtomKind::F2);
    let s = theta1_expansion(&set, &v, 8).unwrap();
    for (h, coeff) in s.iter() {
        assert!(h % 2 == 0, "found a half power q^({h}/2): {coeff}");
    }
}

// ---------------------------------------------------------------------------
// The theta-quotient assembly against the direct one.

#[test]
fn theta_quotient_product_equals_genus_times_theta_expansion() {
    for (m, n) in [(2, 0), (4, 2)] {
        let set = chern_root_set(8, m, n).unwrap();
        let order = 4;
        let quotient = theta_quotient_expansion(&set, order).unwrap();
        let phi = GenusSpec::a_hat(8)
            .genus_form(set.atom(AtomKind::Tz))
            .unwrap()
            .mul(&euler_factor(&set, EulerMode::CoshHalf).unwrap())
            .unwrap();
        let direct = theta2_expansion(&set, order)
            .unwrap()
            .scale_elem(&phi)
            .unwrap();
        assert_eq!(quotient, direct, "(m, n) = ({m}, {n})");
    }
}

#[test]
fn theta_quotient_requires_explicit_roots() {
    let set = sset();
    assert!(theta_quotient_expansion(&set, 4).is_err());
}

// ---------------------------------------------------------------------------
// Expression grammar.

#[test]
fn expressions_round_trip_through_their_display_form() {
    let set = sset();
    let ring = set.ring();
    for text in [
        "L2(F1) + S2(F2) - F1*F2 + TZ - 2",
        "3*tilde(XI)*tilde(XI)",
        "psi2(F1 - F2)",
        "tilde(F1 - F2 - 2*tilde(XI))",
        "m*XI - n*F2",
        "const(m)*F1",
    ] {
        let parsed = BundleExpr::parse(ring, text).unwrap();
        let reparsed = BundleExpr::parse(ring, &parsed.to_string()).unwrap();
        // Associativity may differ structurally; compare semantically.
        assert_eq!(
            set.ch(&parsed).unwrap(),
            set.ch(&reparsed).unwrap(),
            "{text}"
        );
        assert_eq!(
            set.rank(&parsed).unwrap(),
            set.rank(&reparsed).unwrap(),
            "{text}"
        );
    }
}

#[test]
fn expression_parse_rejects_malformed_input() {
    let set = sset();
    let ring = set.ring();
    assert!(BundleExpr::parse(ring, "L2(").is_err());
    assert!(BundleExpr::parse(ring, "F1 +").is_err());
    assert!(BundleExpr::parse(ring, "F1 F2").is_err());
}

// ---------------------------------------------------------------------------
// Randomized lambda-ring contracts.

fn arb_expr() -> impl Strategy<Value = BundleExpr> {
    use AtomKind::*;
    let atom = prop::sample::select(vec![
        BundleExpr::atom(Tz),
        BundleExpr::atom(F1),
        BundleExpr::atom(F2),
        BundleExpr::atom(Xi),
    ]);
    atom.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            inner.clone().prop_map(BundleExpr::tilde),
            inner.prop_map(|e| BundleExpr::adams(2, e)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn symmetric_and_exterior_series_are_reciprocal(
        e in arb_expr(),
        t_exp in 1u32..3,
    ) {
        // S_t(E) * Lam_{-t}(E) = 1 term by term.
        let set = sset();
        let s = sym_t_ch(&set, &e, 1, t_exp, 7).unwrap();
        let l = lambda_t_ch(&set, &e, -1, t_exp, 7).unwrap();
        let one = QSeries::one(set.ring().clone(), 7);
        prop_assert_eq!(s.mul(&l).unwrap(), one);
    }

    #[test]
    fn exterior_series_respects_differences(
        f in arb_expr(),
        g in arb_expr(),
    ) {
        // Lam_t(F - G) * Lam_t(G) = Lam_t(F).
        let set = sset();
        let lhs = lambda_t_ch(&set, &(f.clone() - g.clone()), 1, 2, 7)
            .unwrap()
            .mul(&lambda_t_ch(&set, &g, 1, 2, 7).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, lambda_t_ch(&set, &f, 1, 2, 7).unwrap());
    }

    #[test]
    fn adams_operations_compose(e in arb_expr(), k in 1u32..3, l in 1u32..3) {
        let set = sset();
        let once = set.ch_adams(k * l, &e).unwrap();
        let twice = set.ch_adams(k, &BundleExpr::adams(l, e)).unwrap();
        prop_assert_eq!(once, twice);
    }
}
