//! Exact symbolic verification of anomaly-cancellation and
//! Green-Schwarz-type factorization identities.
//!
//! The library works in a degree-truncated polynomial ring over the exact
//! rationals whose generators are Pontryagin classes, an Euler class, and
//! (optionally) symbolic ranks.  On top of that sit q-series with graded
//! coefficients, a lambda-ring Chern-character calculus for virtual
//! bundles, q-expansions of the level-2 modular forms, and a weight-6
//! basis decomposition.  Together these verify, term by term and with no
//! floating point anywhere near the identities, that the twisted
//! anomaly polynomials factor the way the modular structure says they
//! must.
//!
//! Layers, bottom to top:
//!
//! * [`ratseries`]: dense univariate rational power series (the defining
//!   series of the genera, cosh/sinh kernels).
//! * [`gradedring`]: the truncated graded polynomial ring.
//! * [`qseries`]: truncated q-series in half-integer exponents, generic
//!   over the coefficient ring.
//! * [`charclass`]: bundle atoms, virtual-bundle expressions, Chern
//!   characters, genera, and the infinite theta-style products.
//! * [`modforms`]: divisor-sum q-expansions, theta nulls, the weight-6
//!   bases, the decomposition, and floating-point transformation-law
//!   spot checks.
//! * [`anomaly`]: the verification targets themselves, with reports.

pub mod anomaly;
pub mod charclass;
pub mod error;
pub mod gradedring;
pub mod modforms;
pub mod qseries;
pub mod ratseries;

pub use anomaly::{
    anomaly_x, build_p1, build_p2, concrete_set, configured_set, factorization_sides,
    master_bundle_expr, numeric_reports, rank32_set, rank_difference_set, root_cross_check,
    run_suite, self_test, single_bundle_set, summarize, symbolic_set, tangent_only_set,
    theta_coefficient_b1, theta_coefficient_b2, verify_coefficient_equations, verify_identity,
    CheckStatus, EulerChoice, RankSpec, SuiteSummary, Target, VerificationConfig,
    VerificationReport, XiMode,
};
pub use charclass::{
    chern_root_set, euler_factor, lambda_product_ch, lambda_t_ch, sym_t_ch, theta1_expansion,
    theta2_expansion, theta_quotient_expansion, AtomData, AtomKind, BundleExpr, BundleSet,
    EulerMode, GenusSpec, ProductFamily,
};
pub use error::{Error, Result};
pub use gradedring::{GradedElement, RingContext};
pub use modforms::{
    basis_pair, decompose_weight6, delta_epsilon, eisenstein_e2, numeric_transform_checks,
    theta_null, theta_null_fourth, verify_theta_four_identities, DeltaEpsilonKind,
    ModularBasis, ModularDecomposition, NumericCheck, ThetaKind,
};
pub use qseries::{eval_scalar_series, lift_scalar_series, CoeffRing, QSeries, ScalarQSeries};
