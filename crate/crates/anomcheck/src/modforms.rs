//! Modular-form q-expansions, the two-dimensional weight-6 decomposition,
//! and floating-point spot checks of the theta/E2 transformation laws.
//!
//! Exact side: Jacobi theta nulls as finite products (theta1's q^(1/8)
//! prefactor is carried as a separate eighth-power offset so the series
//! itself stays in half-integer exponents), the quasi-modular E2, and the
//! four divisor-sum forms delta/epsilon of weight 2 and 4 for the two
//! level-2 groups, with their theta^4 identities.
//!
//! Weight-6 modular forms for each level-2 group form a rank-2 lattice in
//! our normalizations, spanned by delta^3 and delta*epsilon; decomposing a
//! series against that pair and inspecting the residual is how modularity
//! is certified exactly.

use std::sync::Arc;

use num::complex::Complex64;
use num::{BigRational, One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gradedring::{GradedElement, RingContext};
use crate::qseries::{lift_scalar_series, QSeries, ScalarQSeries};
use crate::ratseries::{rat, ratio};

// ---------------------------------------------------------------------------
// Divisor sums.

fn divisors(n: u64) -> impl Iterator<Item = u64> {
    (1..=n).filter(move |d| n.is_multiple_of(*d))
}

/// sum of odd divisors of n.
fn sigma_odd(n: u64) -> i64 {
    divisors(n).filter(|d| d % 2 == 1).map(|d| d as i64).sum()
}

/// sum of d for all divisors.
fn sigma1(n: u64) -> i64 {
    divisors(n).map(|d| d as i64).sum()
}

/// sum of (-1)^d d^3 over divisors.
fn sigma3_alternating(n: u64) -> i64 {
    divisors(n)
        .map(|d| {
            let c = (d as i64).pow(3);
            if d % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .sum()
}

/// sum of d^3 over divisors with odd cofactor n/d.
fn sigma3_odd_cofactor(n: u64) -> i64 {
    divisors(n)
        .filter(|d| (n / d) % 2 == 1)
        .map(|d| (d as i64).pow(3))
        .sum()
}

// ---------------------------------------------------------------------------
// Exact q-expansions.

/// The quasi-modular Eisenstein series E2 = 1 - 24 sum sigma_1(n) q^n.
pub fn eisenstein_e2(order: u32) -> ScalarQSeries {
    let mut terms = vec![(0u32, BigRational::one())];
    for n in 1..=(order.saturating_sub(1) / 2) as u64 {
        terms.push((2 * n as u32, rat(-24 * sigma1(n))));
    }
    ScalarQSeries::from_terms((), order, terms).expect("exponents checked in the loop")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaKind {
    Theta1,
    Theta2,
    Theta3,
}

/// A q-series together with a global q^(offset/8) prefactor, needed because
/// theta1's null value starts at q^(1/8).
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetSeries {
    pub eighth_offset: u32,
    pub series: ScalarQSeries,
}

/// prod over h = h0, h0+step, ... of (1 + sign q^(h/2)), exactly.
fn scalar_geometric(sign: i64, h0: u32, step: u32, order: u32) -> ScalarQSeries {
    let mut acc = ScalarQSeries::one((), order);
    let mut h = h0;
    while h < order {
        let factor = ScalarQSeries::from_terms(
            (),
            order,
            vec![(0, BigRational::one()), (h, rat(sign))],
        )
        .expect("h < order by the loop guard");
        acc = acc.mul(&factor).expect("scalar series always share a ring");
        h += step;
    }
    acc
}

/// Null values of the auxiliary Jacobi theta functions:
///
///   theta1(0) = 2 q^(1/8) prod (1-q^j)(1+q^j)^2
///   theta2(0) =           prod (1-q^j)(1-q^(j-1/2))^2
///   theta3(0) =           prod (1-q^j)(1+q^(j-1/2))^2
pub fn theta_null(kind: ThetaKind, order: u32) -> OffsetSeries {
    let whole_minus = scalar_geometric(-1, 2, 2, order);
    let (offset, series) = match kind {
        ThetaKind::Theta1 => {
            let plus = scalar_geometric(1, 2, 2, order);
            let s = whole_minus
                .mul(&plus)
                .and_then(|t| t.mul(&plus))
                .expect("scalar series share a ring")
                .scale_rational(&rat(2));
            (1, s)
        }
        ThetaKind::Theta2 => {
            let half_minus = scalar_geometric(-1, 1, 2, order);
            let s = whole_minus
                .mul(&half_minus)
                .and_then(|t| t.mul(&half_minus))
                .expect("scalar series share a ring");
            (0, s)
        }
        ThetaKind::Theta3 => {
            let half_plus = scalar_geometric(1, 1, 2, order);
            let s = whole_minus
                .mul(&half_plus)
                .and_then(|t| t.mul(&half_plus))
                .expect("scalar series share a ring");
            (0, s)
        }
    };
    OffsetSeries {
        eighth_offset: offset,
        series,
    }
}

/// Shift a series by dh half-units, dropping anything pushed past the
/// truncation order.
fn shift(s: &ScalarQSeries, dh: u32) -> ScalarQSeries {
    let order = s.order();
    let terms: Vec<(u32, BigRational)> = s
        .iter()
        .filter(|(h, _)| h + dh < order)
        .map(|(h, c)| (h + dh, c.clone()))
        .collect();
    ScalarQSeries::from_terms((), order, terms).expect("filtered to h < order")
}

///// Fourth power of a theta null as an honest half-exponent series: the
/// 4 * q^(1/8) offsets of theta1 fold into a whole q^(1/2) shift, i.e. one
/// half-unit per eighth of offset.
pub fn theta_null_fourth(kind: ThetaKind, order: u32) -> ScalarQSeries {
    let t = theta_null(kind, order);
    let sq = t.series.mul(&t.series).expect("scalar ring");
    let fourth = sq.mul(&sq).expect("scalar ring");
    shift(&fourth, t.eighth_offset)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaEpsilonKind {
    Delta1,
    Epsilon1,
    Delta2,
    Epsilon2,
}

/// The level-2 forms of weight 2 (delta) and weight 4 (epsilon):
///
///   delta1   = 1/4 + 6 sum (sum of odd d | n) q^n
///   epsilon1 = 1/16 + sum (sum (-1)^d d^3, d | n) q^n
///   delta2   = -1/8 - 3 sum (sum of odd d | n) q^(n/2)
///   epsilon2 = sum (sum d^3 over d | n with n/d odd) q^(n/2)
pub fn delta_epsilon(kind: DeltaEpsilonKind, order: u32) -> ScalarQSeries {
    let mut terms: Vec<(u32, BigRational)> = Vec::new();
    match kind {
        DeltaEpsilonKind::Delta1 => {
            terms.push((0, ratio(1, 4)));
            for n in 1..=(order.saturating_sub(1) / 2) as u64 {
                terms.push((2 * n as u32, rat(6 * sigma_odd(n))));
            }
        }
        DeltaEpsilonKind::Epsilon1 => {
            terms.push((0, ratio(1, 16)));
            for n in 1..=(order.saturating_sub(1) / 2) as u64 {
                terms.push((2 * n as u32, rat(sigma3_alternating(n))));
            }
        }
        DeltaEpsilonKind::Delta2 => {
            terms.push((0, ratio(-1, 8)));
            for n in 1..order as u64 {
                terms.push((n as u32, rat(-3 * sigma_odd(n))));
            }
        }
        DeltaEpsilonKind::Epsilon2 => {
            for n in 1..order as u64 {
                terms.push((n as u32, rat(sigma3_odd_cofactor(n))));
            }
        }
    }
    ScalarQSeries::from_terms((), order, terms).expect("exponents below order by construction")
}

/// Exact residuals of the four theta^4 identities
///
///   delta1 = (theta2(0)^4 + theta3(0)^4)/8     epsilon1 = theta2(0)^4 theta3(0)^4 / 16
///   delta2 = -(theta1(0)^4 + theta3(0)^4)/8    epsilon2 = theta1(0)^4 theta3(0)^4 / 16
pub fn verify_theta_four_identities(order: u32) -> Vec<(String, ScalarQSeries)> {
    let t1 = theta_null_fourth(ThetaKind::Theta1, order);
    let t2 = theta_null_fourth(ThetaKind::Theta2, order);
    let t3 = theta_null_fourth(ThetaKind::Theta3, order);
    let check = |name: &str, lhs: ScalarQSeries, rhs: ScalarQSeries| {
        (
            name.to_string(),
            lhs.sub(&rhs).expect("scalar series share a ring"),
        )
    };
    vec![
        check(
            "delta1 = (theta2^4 + theta3^4)/8",
            delta_epsilon(DeltaEpsilonKind::Delta1, order),
            t2.add(&t3).expect("scalar ring").scale_rational(&ratio(1, 8)),
        ),
        check(
            "epsilon1 = theta2^4*theta3^4/16",
            delta_epsilon(DeltaEpsilonKind::Epsilon1, order),
            t2.mul(&t3).expect("scalar ring").scale_rational(&ratio(1, 16)),
        ),
        check(
            "delta2 = -(theta1^4 + theta3^4)/8",
            delta_epsilon(DeltaEpsilonKind::Delta2, order),
            t1.add(&t3).expect("scalar ring").scale_rational(&ratio(-1, 8)),
        ),
        check(
            "epsilon2 = theta1^4*theta3^4/16",
            delta_epsilon(DeltaEpsilonKind::Epsilon2, order),
            t1.mul(&t3).expect("scalar ring").scale_rational(&ratio(1, 16)),
        ),
    ]
}

// ---------------------------------------------------------------------------
// Weight-6 decomposition.

/// Which level-2 family spans the weight-6 space:
/// `HalfIntegral` uses {(8 delta2)^3, (8 delta2) epsilon2} (forms with
/// half-integral exponents), `Integral` uses {delta1^3, delta1 epsilon1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModularBasis {
    HalfIntegral,
    Integral,
}

impl ModularBasis {
    pub fn label(self) -> &'static str {
        match self {
            ModularBasis::HalfIntegral => "{(8*delta2)^3, (8*delta2)*epsilon2}",
            ModularBasis::Integral => "{delta1^3, delta1*epsilon1}",
        }
    }
}

/// The two weight-6 basis series at the given truncation.
pub fn basis_pair(basis: ModularBasis, order: u32) -> (ScalarQSeries, ScalarQSeries) {
    match basis {
        ModularBasis::HalfIntegral => {
            let d = delta_epsilon(DeltaEpsilonKind::Delta2, order).scale_rational(&rat(8));
            let e = delta_epsilon(DeltaEpsilonKind::Epsilon2, order);
            let d3 = d.mul(&d).and_then(|s| s.mul(&d)).expect("scalar ring");
            let de = d.mul(&e).expect("scalar ring");
            (d3, de)
        }
        ModularBasis::Integral => {
            let d = delta_epsilon(DeltaEpsilonKind::Delta1, order);
            let e = delta_epsilon(DeltaEpsilonKind::Epsilon1, order);
            let d3 = d.mul(&d).and_then(|s| s.mul(&d)).expect("scalar ring");
            let de = d.mul(&e).expect("scalar ring");
            (d3, de)
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModularDecomposition {
    pub basis: ModularBasis,
    pub h0: GradedElement,
    pub h1: GradedElement,
    pub residual: QSeries<GradedElement>,
}

/// Solve `input = h0 * b1 + h1 * b2` for ring-valued h0, h1 using the first
/// two independent coefficient rows of the basis pair, then report the full
/// residual.  For a genuinely modular input the residual vanishes at every
/// retained exponent.
pub fn decompose_weight6(
    input: &QSeries<GradedElement>,
    basis: ModularBasis,
) -> Result<ModularDecomposition> {
    let order = input.order();
    if order < 4 {
        return Err(Error::Config(
            "weight-6 decomposition needs at least 4 half-exponent coefficients".into(),
        ));
    }
    let ring: Arc<RingContext> = input.ring_ctx().clone();
    let (b1, b2) = basis_pair(basis, order);
    let row = |h: u32| -> Result<(BigRational, BigRational)> {
        Ok((b1.coefficient(h)?, b2.coefficient(h)?))
    };
    type BasisRow = (u32, (BigRational, BigRational));
    let mut first: Option<BasisRow> = None;
    let mut pair: Option<(BasisRow, BasisRow)> = None;
    for h in 0..order {
        let r = row(h)?;
        if r.0.is_zero() && r.1.is_zero() {
            continue;
        }
        match &first {
            None => first = Some((h, r)),
            Some((ha, ra)) => {
                let det = &ra.0 * &r.1 - &ra.1 * &r.0;
                if !det.is_zero() {
                    pair = Some(((*ha, ra.clone()), (h, r)));
                    break;
                }
            }
        }
    }
    let ((ha, ra), (hb, rb)) = pair.ok_or_else(|| {
        Error::Config("basis series rows are singular through this truncation".into())
    })?;
    let det = &ra.0 * &rb.1 - &ra.1 * &rb.0;
    let aa = input.coefficient(ha)?;
    let ab = input.coefficient(hb)?;
    // Cramer's rule with ring-valued right-hand sides.
    let h0 = aa
        .scale(&(&rb.1 / &det))
        .sub(&ab.scale(&(&ra.1 / &det)))?;
    let h1 = ab
        .scale(&(&ra.0 / &det))
        .sub(&aa.scale(&(&rb.0 / &det)))?;
    let combo = lift_scalar_series(&b1, &ring)
        .scale_elem(&h0)?
        .add(&lift_scalar_series(&b2, &ring).scale_elem(&h1)?)?;
    let residual = input.sub(&combo)?;
    Ok(ModularDecomposition {
        basis,
        h0,
        h1,
        residual,
    })
}

// ---------------------------------------------------------------------------
// Numeric transformation checks.

#[derive(Debug, Clone, Serialize)]
pub struct NumericCheck {
    pub law: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Numeric Jacobi thetas from their product formulas, given v and
/// qh = exp(pi i tau).
fn theta_products(v: Complex64, tau: Complex64, terms: u32) -> [Complex64; 4] {
    use std::f64::consts::PI;
    let i = Complex64::new(0.0, 1.0);
    let qh = (i * PI * tau).exp();
    let q8 = (i * PI * tau / 4.0).exp();
    let e = (2.0 * PI * i * v).exp();
    let einv = (-2.0 * PI * i * v).exp();
    let mut theta = 2.0 * q8 * (PI * v).sin();
    let mut theta1 = 2.0 * q8 * (PI * v).cos();
    let mut theta2 = Complex64::new(1.0, 0.0);
    let mut theta3 = Complex64::new(1.0, 0.0);
    for j in 1..=terms {
        let qj = qh.powu(2 * j);
        let qjh = qh.powu(2 * j - 1);
        let common = 1.0 - qj;
        theta *= common * (1.0 - e * qj) * (1.0 - einv * qj);
        theta1 *= common * (1.0 + e * qj) * (1.0 + einv * qj);
        theta2 *= common * (1.0 - e * qjh) * (1.0 - einv * qjh);
        theta3 *= common * (1.0 + e * qjh) * (1.0 + einv * qjh);
    }
    [theta, theta1, theta2, theta3]
}

fn e2_numeric(tau: Complex64, terms: u32) -> Complex64 {
    use std::f64::consts::PI;
    let i = Complex64::new(0.0, 1.0);
    let q = (2.0 * PI * i * tau).exp();
    let mut acc = Complex64::new(1.0, 0.0);
    for n in 1..=terms as u64 {
        acc -= 24.0 * sigma1(n) as f64 * q.powu(n as u32);
    }
    acc
}

fn delta_epsilon_numeric(kind: DeltaEpsilonKind, tau: Complex64, terms: u32) -> Complex64 {
    use std::f64::consts::PI;
    let i = Complex64::new(0.0, 1.0);
    let qh = (i * PI * tau).exp();
    let q = qh * qh;
    match kind {
        DeltaEpsilonKind::Delta1 => {
            let mut acc = Complex64::new(0.25, 0.0);
            for n in 1..=terms as u64 {
                acc += 6.0 * sigma_odd(n) as f64 * q.powu(n as u32);
            }
            acc
        }
        DeltaEpsilonKind::Epsilon1 => {
            let mut acc = Complex64::new(1.0 / 16.0, 0.0);
            for n in 1..=terms as u64 {
                acc += sigma3_alternating(n) as f64 * q.powu(n as u32);
            }
            acc
        }
        DeltaEpsilonKind::Delta2 => {
            let mut acc = Complex64::new(-0.125, 0.0);
            for n in 1..=terms as u64 {
                acc -= 3.0 * sigma_odd(n) as f64 * qh.powu(n as u32);
            }
            acc
        }
        DeltaEpsilonKind::Epsilon2 => {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 1..=terms as u64 {
                acc += sigma3_odd_cofactor(n) as f64 * qh.powu(n as u32);
            }
            acc
        }
    }
}

/// Spot-check the S and T transformation laws of the four thetas, of E2
/// (including its value 3/pi at tau = i), and of the delta/epsilon pairs at
/// one point in the upper half plane.
pub fn numeric_transform_checks(
    tau: Complex64,
    v: Complex64,
    terms: u32,
    tol_theta: f64,
    tol_e2: f64,
) -> Result<Vec<NumericCheck>> {
    use std::f64::consts::PI;
    if tau.im <= 0.0 {
        return Err(Error::Config(format!(
            "tau must lie in the upper half plane, got {tau}"
        )));
    }
    let i = Complex64::new(0.0, 1.0);
    let mut checks = Vec::new();
    let mut push = |law: &str, lhs: Complex64, rhs: Complex64, tol: f64| {
        let residual = (lhs - rhs).norm();
        checks.push(NumericCheck {
            law: law.to_string(),
            residual,
            tolerance: tol,
            pass: residual.is_finite() && residual < tol,
        });
    };

    let at_tau = theta_products(v, tau, terms);
    let at_tau_plus = theta_products(v, tau + 1.0, terms);
    let stau = -1.0 / tau;
    let at_stau = theta_products(v, stau, terms);
    let at_tv = theta_products(tau * v, tau, terms);
    let phase_t = (i * PI / 4.0).exp();
    let root = (tau / i).sqrt();
    let gauss = (i * PI * tau * v * v).exp();

    push(
        "theta(v, tau+1) = e^(i pi/4) theta(v, tau)",
        at_tau_plus[0],
        phase_t * at_tau[0],
        tol_theta,
    );
    push(
        "theta1(v, tau+1) = e^(i pi/4) theta1(v, tau)",
        at_tau_plus[1],
        phase_t * at_tau[1],
        tol_theta,
    );
    push(
        "theta2(v, tau+1) = theta3(v, tau)",
        at_tau_plus[2],
        at_tau[3],
        tol_theta,
    );
    push(
        "theta3(v, tau+1) = theta2(v, tau)",
        at_tau_plus[3],
        at_tau[2],
        tol_theta,
    );
    push(
        "theta(v, -1/tau) = (1/i) sqrt(tau/i) e^(i pi tau v^2) theta(tau v, tau)",
        at_stau[0],
        root / i * gauss * at_tv[0],
        tol_theta,
    );
    push(
        "theta1(v, -1/tau) = sqrt(tau/i) e^(i pi tau v^2) theta2(tau v, tau)",
        at_stau[1],
        root * gauss * at_tv[2],
        tol_theta,
    );
    push(
        "theta2(v, -1/tau) = sqrt(tau/i) e^(i pi tau v^2) theta1(tau v, tau)",
        at_stau[2],
        root * gauss * at_tv[1],
        tol_theta,
    );
    push(
        "theta3(v, -1/tau) = sqrt(tau/i) e^(i pi tau v^2) theta3(tau v, tau)",
        at_stau[3],
        root * gauss * at_tv[3],
        tol_theta,
    );
    push(
        "E2(tau+1) = E2(tau)",
        e2_numeric(tau + 1.0, terms),
        e2_numeric(tau, terms),
        tol_e2,
    );
    push(
        "E2(-1/tau) = tau^2 E2(tau) - 6 i tau / pi",
        e2_numeric(stau, terms),
        tau * tau * e2_numeric(tau, terms) - 6.0 * i * tau / PI,
        tol_e2,
    );
    push(
        "E2(i) = 3/pi",
        e2_numeric(i, terms),
        Complex64::new(3.0 / PI, 0.0),
        tol_e2,
    );
    push(
        "delta2(-1/tau) = tau^2 delta1(tau)",
        delta_epsilon_numeric(DeltaEpsilonKind::Delta2, stau, terms),
        tau * tau * delta_epsilon_numeric(DeltaEpsilonKind::Delta1, tau, terms),
        tol_theta,
    );
    push(
        "epsilon2(-1/tau) = tau^4 epsilon1(tau)",
        delta_epsilon_numeric(DeltaEpsilonKind::Epsilon2, stau, terms),
        tau * tau * tau * tau * delta_epsilon_numeric(DeltaEpsilonKind::Epsilon1, tau, terms),
        tol_theta,
    );
    Ok(checks)
}
