//! Truncated q-series with coefficients in a pluggable commutative ring.
//!
//! Exponents are tracked in half-integer units: the key `h` stands for
//! q^(h/2), so theta-like products with genuinely half-integral exponents
//! need no fractional arithmetic.  A series knows the exponents `h <
//! order`; asking for anything at or beyond `order` is a hard error —
//! truncation never masquerades as zero.  Binary operations truncate to the
//! shorter operand.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::complex::Complex64;
use num::{BigRational, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gradedring::{GradedElement, RingContext};

/// The coefficient-ring interface: exact rationals, graded ring elements,
/// and complex doubles all implement it.  `Ctx` carries whatever ambient
/// data elements need to agree on (the polynomial ring for graded
/// coefficients, nothing for scalars).
pub trait CoeffRing: Clone + PartialEq + fmt::Debug {
    type Ctx: Clone + PartialEq + fmt::Debug;

    fn ctx(&self) -> Self::Ctx;
    fn ring_zero(ctx: &Self::Ctx) -> Self;
    fn ring_one(ctx: &Self::Ctx) -> Self;
    fn is_ring_zero(&self) -> bool;
    fn ring_add(&self, rhs: &Self) -> Self;
    fn ring_mul(&self, rhs: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    fn scale_rat(&self, a: &BigRational) -> Self;
    /// Exponential, where the ring defines one (nilpotent graded elements,
    /// zero rationals, any complex number).
    fn try_exp(&self) -> Result<Self>;
    /// Multiplicative inverse, where the element is a unit.
    fn try_reciprocal(&self) -> Result<Self>;
}

impl CoeffRing for BigRational {
    type Ctx = ();

    fn ctx(&self) -> Self::Ctx {}

    fn ring_zero(_: &Self::Ctx) -> Self {
        BigRational::zero()
    }

    fn ring_one(_: &Self::Ctx) -> Self {
        BigRational::one()
    }

    fn is_ring_zero(&self) -> bool {
        self.is_zero()
    }

    fn ring_add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn ring_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn ring_neg(&self) -> Self {
        -self
    }

    fn scale_rat(&self, a: &BigRational) -> Self {
        self * a
    }

    fn try_exp(&self) -> Result<Self> {
        if self.is_zero() {
            Ok(BigRational::one())
        } else {
            Err(Error::NotNilpotent)
        }
    }

    fn try_reciprocal(&self) -> Result<Self> {
        if self.is_zero() {
            Err(Error::NonInvertibleConstant)
        } else {
            Ok(self.recip())
        }
    }
}

impl CoeffRing for GradedElement {
    type Ctx = Arc<RingContext>;

    fn ctx(&self) -> Self::Ctx {
        Arc::clone(GradedElement::ctx(self))
    }

    fn ring_zero(ctx: &Self::Ctx) -> Self {
        GradedElement::zero(ctx)
    }

    fn ring_one(ctx: &Self::Ctx) -> Self {
        GradedElement::one(ctx)
    }

    fn is_ring_zero(&self) -> bool {
        self.is_zero()
    }

    fn ring_add(&self, rhs: &Self) -> Self {
        self.add(rhs).expect("series coefficients share one ring context")
    }

    fn ring_mul(&self, rhs: &Self) -> Self {
        self.mul(rhs).expect("series coefficients share one ring context")
    }

    fn ring_neg(&self) -> Self {
        self.neg()
    }

    fn scale_rat(&self, a: &BigRational) -> Self {
        self.scale(a)
    }

    fn try_exp(&self) -> Result<Self> {
        self.exp_nilpotent()
    }

    fn try_reciprocal(&self) -> Result<Self> {
        GradedElement::try_reciprocal(self)
    }
}

impl CoeffRing for Complex64 {
    type Ctx = ();

    fn ctx(&self) -> Self::Ctx {}

    fn ring_zero(_: &Self::Ctx) -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn ring_one(_: &Self::Ctx) -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn is_ring_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn ring_add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn ring_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn ring_neg(&self) -> Self {
        -self
    }

    fn scale_rat(&self, a: &BigRational) -> Self {
        self * a.to_f64().expect("rational fits in f64")
    }

    fn try_exp(&self) -> Result<Self> {
        Ok(self.exp())
    }

    fn try_reciprocal(&self) -> Result<Self> {
        if self.is_ring_zero() {
            Err(Error::NonInvertibleConstant)
        } else {
            Ok(self.inv())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QSeries<R: CoeffRing> {
    ctx: R::Ctx,
    order: u32,
    coeffs: BTreeMap<u32, R>,
}

pub type ScalarQSeries = QSeries<BigRational>;

impl<R: CoeffRing> QSeries<R> {
    pub fn zero(ctx: R::Ctx, order: u32) -> Self {
        assert!(order > 0, "truncation order must be positive");
        QSeries {
            ctx,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(ctx: R::Ctx, order: u32) -> Self {
        let one = R::ring_one(&ctx);
        let mut s = Self::zero(ctx, order);
        s.coeffs.insert(0, one);
        s
    }

    /// A single term `value * q^(h/2)`.
    pub fn monomial(ctx: R::Ctx, order: u32, h: u32, value: R) -> Result<Self> {
        Self::from_terms(ctx, order, vec![(h, value)])
    }

    pub fn from_terms(ctx: R::Ctx, order: u32, terms: Vec<(u32, R)>) -> Result<Self> {
        let mut s = Self::zero(ctx, order);
        for (h, v) in terms {
            if h >= order {
                return Err(Error::CoefficientOutOfRange { h, order });
            }
            if v.ctx() != s.ctx {
                return Err(Error::RingMismatch);
            }
            s.add_term(h, v);
        }
        Ok(s)
    }

    pub fn ring_ctx(&self) -> &R::Ctx {
        &self.ctx
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// The retained coefficient of q^(h/2); an error for h >= order.
    pub fn coefficient(&self, h: u32) -> Result<R> {
        if h >= self.order {
            return Err(Error::CoefficientOutOfRange {
                h,
                order: self.order,
            });
        }
        Ok(self
            .coeffs
            .get(&h)
            .cloned()
            .unwrap_or_else(|| R::ring_zero(&self.ctx)))
    }

    /// Iterate the stored (nonzero) coefficients in exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &R)> {
        self.coeffs.iter().map(|(&h, v)| (h, v))
    }

    /// Smallest exponent with a nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_term(&mut self, h: u32, v: R) {
        if v.is_ring_zero() || h >= self.order {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(h) {
            Entry::Vacant(slot) => {
                slot.insert(v);
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get().ring_add(&v);
                if sum.is_ring_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    fn same_ring(&self, rhs: &Self) -> Result<()> {
        if self.ctx == rhs.ctx {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn truncate(&self, order: u32) -> Self {
        assert!(order > 0, "truncation order must be positive");
        let order = order.min(self.order);
        let mut s = Self::zero(self.ctx.clone(), order);
        for (&h, v) in self.coeffs.range(..order) {
            s.coeffs.insert(h, v.clone());
        }
        s
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.same_ring(rhs)?;
        let order = self.order.min(rhs.order);
        let mut out = self.truncate(order);
        for (&h, v) in rhs.coeffs.range(..order) {
            out.add_term(h, v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v = v.ring_neg();
        }
        out
    }

    /// Multiply every coefficient by a fixed ring element.
    pub fn scale_elem(&self, a: &R) -> Result<Self> {
        if a.ctx() != self.ctx {
            return Err(Error::RingMismatch);
        }
        let mut out = Self::zero(self.ctx.clone(), self.order);
        for (&h, v) in &self.coeffs {
            out.add_term(h, v.ring_mul(a));
        }
        Ok(out)
    }

    pub fn scale_rational(&self, a: &BigRational) -> Self {
        let mut out = Self::zero(self.ctx.clone(), self.order);
        for (&h, v) in &self.coeffs {
            out.add_term(h, v.scale_rat(a));
        }
        out
    }

    /// Cauchy product, truncated to the shorter operand.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.same_ring(rhs)?;
        let order = self.order.min(rhs.order);
        let mut out = Self::zero(self.ctx.clone(), order);
        for (&ha, va) in self.coeffs.range(..order) {
            for (&hb, vb) in rhs.coeffs.range(..order - ha) {
                out.add_term(ha + hb, va.ring_mul(vb));
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse; the constant coefficient must be a unit.
    pub fn invert(&self) -> Result<Self> {
        let a0 = self.coefficient(0)?;
        let r0 = a0.try_reciprocal()?;
        let mut out = Self::zero(self.ctx.clone(), self.order);
        let mut inv: Vec<R> = Vec::with_capacity(self.order as usize);
        inv.push(r0.clone());
        for h in 1..self.order {
            let mut s = R::ring_zero(&self.ctx);
            for (&j, aj) in self.coeffs.range(1..=h) {
                let b = &inv[(h - j) as usize];
                if !b.is_ring_zero() {
                    s = s.ring_add(&aj.ring_mul(b));
                }
            }
            inv.push(r0.ring_mul(&s).ring_neg());
        }
        for (h, v) in inv.into_iter().enumerate() {
            out.add_term(h as u32, v);
        }
        Ok(out)
    }

    /// Series exponential.  The constant coefficient goes through the
    /// ring's own exponential (so it must be nilpotent for graded
    /// coefficients); the strictly positive part terminates by q-valuation.
    pub fn exp(&self) -> Result<Self> {
        let e0 = self.coefficient(0)?.try_exp()?;
        let mut rest = self.clone();
        rest.coeffs.remove(&0);
        let mut acc = Self::one(self.ctx.clone(), self.order);
        let mut term = Self::one(self.ctx.clone(), self.order);
        let mut k: i64 = 0;
        loop {
            k += 1;
            term = term
                .mul(&rest)?
                .scale_rational(&BigRational::new(1.into(), k.into()));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term)?;
        }
        acc.scale_elem(&e0)
    }

    /// Apply a coefficient-wise map into another coefficient ring.
    pub fn map_coefficients<S: CoeffRing>(
        &self,
        ctx: S::Ctx,
        mut f: impl FnMut(u32, &R) -> Result<S>,
    ) -> Result<QSeries<S>> {
        let mut out = QSeries::<S>::zero(ctx, self.order);
        for (&h, v) in &self.coeffs {
            let w = f(h, v)?;
            if w.ctx() != *out.ring_ctx() {
                return Err(Error::RingMismatch);
            }
            out.add_term(h, w);
        }
        Ok(out)
    }

    /// Number of nonzero retained coefficients.
    pub fn terms_len(&self) -> usize {
        self.coeffs.len()
    }
}

/// Embed an exact scalar series into a graded-coefficient series as
/// constants.
pub fn lift_scalar_series(
    s: &ScalarQSeries,
    ctx: &Arc<RingContext>,
) -> QSeries<GradedElement> {
    let mut out = QSeries::zero(Arc::clone(ctx), s.order());
    for (h, c) in s.iter() {
        out.add_term(h, GradedElement::constant(ctx, c.clone()));
    }
    out
}

/// Evaluate a scalar series numerically given qh = q^(1/2) = exp(pi i tau).
pub fn eval_scalar_series(s: &ScalarQSeries, qh: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (h, c) in s.iter() {
        acc += qh.powu(h) * c.to_f64().expect("coefficient fits in f64");
    }
    acc
}

fn exponent_string(h: u32) -> String {
    if h.is_multiple_of(2) {
        format!("{}", h / 2)
    } else {
        format!("({h}/2)")
    }
}

impl<R: CoeffRing + fmt::Display> fmt::Display for QSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0 + O(q^{})", exponent_string(self.order));
        }
        let mut first = true;
        for (h, v) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            let coeff = v.to_string();
            let wrapped = if coeff.contains(' ') || coeff.starts_with('-') {
                format!("({coeff})")
            } else {
                coeff
            };
            if h == 0 {
                write!(f, "{wrapped}")?;
            } else {
                write!(f, "{wrapped}*q^{}", exponent_string(h))?;
            }
            first = false;
        }
        write!(f, " + O(q^{})", exponent_string(self.order))
    }
}
