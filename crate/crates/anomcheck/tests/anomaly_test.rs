//! End-to-end behavior of the verification engine: the full suite on the
//! default configuration, coherence of the specialized identities with the
//! fully symbolic one under rank substitution, Euler-mode agreement, the
//! whole-exponent series preconditions, determinism, fault injection, and
//! the report schema.

use anomcheck::anomaly::{
    build_p1, concrete_set, factorization_sides, rank32_set, rank_difference_set, root_cross_check,
    run_suite, self_test, single_bundle_set, summarize, symbolic_set, verify_identity,
    CheckStatus, EulerChoice, RankSpec, Target, VerificationConfig, XiMode,
};
use anomcheck::charclass::EulerMode;
use anomcheck::gradedring::GradedElement;
use anomcheck::Error;

fn default_config() -> VerificationConfig {
    VerificationConfig::default()
}

// ---------------------------------------------------------------------------
// The suite as a whole.

#[test]
fn the_default_suite_has_no_failures_and_one_informational_finding() {
    let reports = run_suite(&default_config()).unwrap();
    let summary = summarize(&reports);
    assert_eq!(summary.total, 29);
    assert_eq!(summary.failed, 0);
    assert_eq!(summary.info, 1);
    assert_eq!(summary.passed, 28);
    let info: Vec<&str> = reports
        .iter()
        .filter(|r| r.status == CheckStatus::Info)
        .map(|r| r.check_id.as_str())
        .collect();
    assert_eq!(info, ["coeff-q1-printed-sign"]);
}

#[test]
fn every_target_reports_the_expected_number_of_checks() {
    let config = default_config();
    for (target, count) in [
        (Target::Agw, 1usize),
        (Target::Gs, 2),
        (Target::Sw, 2),
        (Target::Remark, 1),
        (Target::Cor1, 2),
        (Target::Cor2, 2),
        (Target::Cor3, 2),
        (Target::Theorem1, 3),
        (Target::CoeffEqs, 10),
        (Target::P2Modularity, 2),
        (Target::P1Modularity, 2),
    ] {
        let reports = verify_identity(target, &config).unwrap();
        assert_eq!(reports.len(), count, "{target:?}");
        for r in &reports {
            assert!(r.passed(), "{}: {:?}", r.check_id, r.residual_sample);
        }
    }
}

#[test]
fn the_suite_is_deterministic() {
    let config = default_config();
    let key = |reports: &[anomcheck::VerificationReport]| -> Vec<(String, CheckStatus, Option<usize>)> {
        reports
            .iter()
            .map(|r| (r.check_id.clone(), r.status, r.residual_terms))
            .collect()
    };
    let first = key(&run_suite(&config).unwrap());
    let second = key(&run_suite(&config).unwrap());
    assert_eq!(first, second);
}

#[test]
fn invalid_configurations_are_rejected_up_front() {
    let mut config = default_config();
    config.max_degree = 13;
    assert!(matches!(
        verify_identity(Target::Agw, &config),
        Err(Error::Config(_))
    ));
    config.max_degree = 10;
    assert!(matches!(
        verify_identity(Target::Agw, &config),
        Err(Error::Config(_))
    ));
    config.max_degree = 12;
    config.q_order = 3;
    assert!(matches!(
        verify_identity(Target::Agw, &config),
        Err(Error::Config(_))
    ));
}

// ---------------------------------------------------------------------------
// Specialization coherence: substituting ranks into the fully symbolic
// identity must reproduce each specialized identity verbatim.

fn sides(
    set: &anomcheck::BundleSet,
) -> ((GradedElement, GradedElement), (GradedElement, GradedElement)) {
    (
        factorization_sides(set, EulerMode::CoshHalf).unwrap(),
        factorization_sides(set, EulerMode::ExpHalf).unwrap(),
    )
}

#[test]
fn rank_difference_32_is_the_symbolic_identity_with_m_substituted() {
    let general = symbolic_set(12, XiMode::Generic).unwrap();
    let special = rank_difference_set(12, XiMode::Generic).unwrap();
    let target = special.ring();
    let image = [(
        "m",
        GradedElement::parse(target, "n + 32").unwrap(),
    )];
    let (lhs_g, rhs_g) = factorization_sides(&general, EulerMode::CoshHalf).unwrap();
    let (lhs_s, rhs_s) = factorization_sides(&special, EulerMode::CoshHalf).unwrap();
    assert_eq!(lhs_g.substitute(target, &image).unwrap(), lhs_s);
    assert_eq!(rhs_g.substitute(target, &image).unwrap(), rhs_s);
}

#[test]
fn the_single_bundle_identity_is_the_symbolic_one_with_the_second_bundle_removed() {
    let general = symbolic_set(12, XiMode::Generic).unwrap();
    let special = single_bundle_set(12).unwrap();
    let target = special.ring();
    let zero = GradedElement::zero(target);
    let gen = |name: &str| GradedElement::generator(target, name).unwrap();
    let image = [
        ("n", zero.clone()),
        ("p1F1", gen("p1F")),
        ("p2F1", gen("p2F")),
        ("p3F1", gen("p3F")),
        ("p1F2", zero.clone()),
        ("p2F2", zero.clone()),
        ("p3F2", zero.clone()),
    ];
    let (lhs_g, rhs_g) = factorization_sides(&general, EulerMode::CoshHalf).unwrap();
    let (lhs_s, rhs_s) = factorization_sides(&special, EulerMode::CoshHalf).unwrap();
    assert_eq!(lhs_g.substitute(target, &image).unwrap(), lhs_s);
    assert_eq!(rhs_g.substitute(target, &image).unwrap(), rhs_s);
}

#[test]
fn the_rank_32_identity_is_the_single_bundle_one_at_m_equals_32() {
    let general = single_bundle_set(12).unwrap();
    let special = rank32_set(12, XiMode::Generic).unwrap();
    let target = special.ring();
    let image = [("m", GradedElement::from_int(target, 32))];
    let (lhs_g, rhs_g) = factorization_sides(&general, EulerMode::CoshHalf).unwrap();
    let (lhs_s, rhs_s) = factorization_sides(&special, EulerMode::CoshHalf).unwrap();
    assert_eq!(lhs_g.substitute(target, &image).unwrap(), lhs_s);
    assert_eq!(rhs_g.substitute(target, &image).unwrap(), rhs_s);
}

#[test]
fn the_green_schwarz_ring_is_the_rank_32_one_with_the_twist_switched_off() {
    let general = rank32_set(12, XiMode::Generic).unwrap();
    let special = rank32_set(12, XiMode::Trivial).unwrap();
    let target = special.ring();
    let image = [("c", GradedElement::zero(target))];
    let (lhs_g, rhs_g) = factorization_sides(&general, EulerMode::CoshHalf).unwrap();
    let (lhs_s, rhs_s) = factorization_sides(&special, EulerMode::CoshHalf).unwrap();
    assert_eq!(lhs_g.substitute(target, &image).unwrap(), lhs_s);
    assert_eq!(rhs_g.substitute(target, &image).unwrap(), rhs_s);
}

// ---------------------------------------------------------------------------
// Euler modes.

#[test]
fn both_euler_modes_produce_identical_extracted_sides() {
    // The two closed forms differ only in degrees 2 mod 4, which the
    // degree-8 and degree-12 extractions of even-degree products remove.
    for set in [
        symbolic_set(12, XiMode::Generic).unwrap(),
        rank32_set(12, XiMode::Generic).unwrap(),
    ] {
        let ((lhs_c, rhs_c), (lhs_e, rhs_e)) = sides(&set);
        assert_eq!(lhs_c, lhs_e);
        assert_eq!(rhs_c, rhs_e);
    }
}

// ---------------------------------------------------------------------------
// The whole-exponent series preconditions.

#[test]
fn the_whole_exponent_series_requires_concrete_even_rank_difference() {
    let symbolic = symbolic_set(12, XiMode::Generic).unwrap();
    assert!(matches!(
        build_p1(&symbolic, 8),
        Err(Error::UnsupportedConfiguration(_))
    ));
    let odd = concrete_set(12, 3, 0, XiMode::Generic).unwrap();
    assert!(matches!(
        build_p1(&odd, 8),
        Err(Error::UnsupportedConfiguration(_))
    ));
    let even = concrete_set(12, 4, 2, XiMode::Generic).unwrap();
    assert!(build_p1(&even, 8).is_ok());
}

// ---------------------------------------------------------------------------
// Cross-checks and fault injection.

#[test]
fn the_explicit_root_assembly_matches_at_small_ranks() {
    let report = root_cross_check(12, 2, 0, 4).unwrap();
    assert!(report.passed(), "{:?}", report.residual_sample);
    assert_eq!(report.residual_terms, Some(0));
}

#[test]
fn every_injected_fault_is_detected() {
    let reports = self_test(&default_config()).unwrap();
    assert_eq!(reports.len(), 5);
    for r in &reports {
        assert!(r.passed(), "{}: {:?}", r.check_id, r.note);
    }
}

// ---------------------------------------------------------------------------
// Report schema.

#[test]
fn reports_serialize_with_the_documented_field_order() {
    let config = default_config();
    let reports = verify_identity(Target::Agw, &config).unwrap();
    let json = serde_json::to_string(&reports[0]).unwrap();
    let fields = [
        "\"check_id\"",
        "\"paper_target\"",
        "\"status\"",
        "\"residual_terms\"",
        "\"residual_sample\"",
        "\"euler_mode\"",
        "\"ranks\"",
        "\"q_order\"",
        "\"max_degree\"",
        "\"elapsed_ms\"",
    ];
    let mut last = 0usize;
    for f in fields {
        let at = json.find(f).unwrap_or_else(|| panic!("{f} missing in {json}"));
        assert!(at >= last, "{f} out of order in {json}");
        last = at;
    }
    // Absent optional metrics are omitted rather than serialized as null.
    assert!(!json.contains("\"tolerance\""));
    assert!(!json.contains("null"));
}

#[test]
fn euler_choice_controls_which_modes_run() {
    let mut config = default_config();
    config.euler = EulerChoice::Cosh;
    let reports = verify_identity(Target::Cor3, &config).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].euler_mode, "cosh");
    config.euler = EulerChoice::Exp;
    let reports = verify_identity(Target::Cor3, &config).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].euler_mode, "exp");
}

#[test]
fn concrete_rank_configurations_run_the_same_identities() {
    let config = VerificationConfig {
        ranks: RankSpec::Concrete { m: 4, n: 2 },
        xi: XiMode::Generic,
        euler: EulerChoice::Cosh,
        max_degree: 12,
        q_order: 8,
    };
    for target in [Target::Theorem1, Target::P2Modularity, Target::P1Modularity] {
        for r in verify_identity(target, &config).unwrap() {
            assert!(r.passed(), "{}: {:?}", r.check_id, r.residual_sample);
            assert!(r.ranks.contains("m=4"), "{}", r.ranks);
        }
    }
}
