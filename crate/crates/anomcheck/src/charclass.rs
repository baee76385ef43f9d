//! Chern-character and lambda-ring calculus for real bundles presented by
//! Pontryagin data.
//!
//! An atom stores the rank and the even power sums pi_k = sum omega_i^(2k)
//! of its formal half-roots; everything else — Chern characters of Adams
//! operations, exterior/symmetric squares, multiplicative genera, and the
//! Witten-style infinite q-products — is computed from those by exact
//! universal formulas:
//!
//!   ch(E_C)        = rank + sum_k 2 pi_k / (2k)!
//!   ch(psi^k E_C)  = rank + sum_j 2 k^(2j) pi_j / (2j)!
//!   ch(L^2 E)      = (ch(psi^1 E)^2 - ch(psi^2 E)) / 2        (and S^2 with +)
//!   log prod-genus = sum_k a_{2k} pi_k for a defining even series g(x)
//!   log ch Lam_t(E)= sum_k (-1)^(k-1) (t^k/k) ch(psi^k E)      (S_t without signs)
//!
//! The q-products are assembled per family of Witten indices: symmetric
//! powers at whole exponents, exterior powers at whole or half exponents
//! with either sign of t.  Working through exp/log keeps every coefficient
//! a terminating nilpotent exponential.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num::{BigInt, BigRational, Signed, Zero};

use crate::error::{Error, Result};
use crate::gradedring::{GradedElement, RingContext};
use crate::qseries::QSeries;
use crate::ratseries::{factorial, ratio, RatSeries};

/// A real bundle given by exact characteristic data: a degree-0 rank and
/// the even power sums pi_k of its formal half-roots, k = 1 .. D/4.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomData {
    name: String,
    rank: GradedElement,
    power_sums: Vec<GradedElement>,
    roots: Option<Vec<GradedElement>>,
}

impl AtomData {
    fn check(ring: &Arc<RingContext>, name: &str, rank: &GradedElement, sums: &[GradedElement]) -> Result<()> {
        if rank.ctx().as_ref() != ring.as_ref() {
            return Err(Error::ContextMismatch);
        }
        if !rank.is_homogeneous(0) {
            return Err(Error::Config(format!(
                "rank of atom `{name}` must be a degree-0 element"
            )));
        }
        for (i, s) in sums.iter().enumerate() {
            if s.ctx().as_ref() != ring.as_ref() {
                return Err(Error::ContextMismatch);
            }
            let want = 4 * (i as u32 + 1);
            if !s.is_homogeneous(want) {
                return Err(Error::Config(format!(
                    "power sum pi_{} of atom `{name}` must be homogeneous of degree {want}",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Number of power sums a context retains: pi_k vanishes past degree D.
    fn sums_len(ring: &RingContext) -> usize {
        (ring.max_degree() / 4) as usize
    }

    /// Build an atom from its Pontryagin classes p_1, p_2, ... (classes
    /// beyond the supplied list are taken to be zero).  Power sums come
    /// from the Newton identities with e_i = p_i.
    pub fn from_pontryagin(
        ring: &Arc<RingContext>,
        name: &str,
        rank: GradedElement,
        pontryagin: &[GradedElement],
    ) -> Result<Self> {
        for (i, p) in pontryagin.iter().enumerate() {
            if p.ctx().as_ref() != ring.as_ref() {
                return Err(Error::ContextMismatch);
            }
            let want = 4 * (i as u32 + 1);
            if !p.is_homogeneous(want) {
                return Err(Error::Config(format!(
                    "p_{} of atom `{name}` must be homogeneous of degree {want}",
                    i + 1
                )));
            }
        }
        let count = Self::sums_len(ring);
        let e = |i: usize| -> GradedElement {
            pontryagin
                .get(i - 1)
                .cloned()
                .unwrap_or_else(|| GradedElement::zero(ring))
        };
        let mut sums: Vec<GradedElement> = Vec::with_capacity(count);
        for k in 1..=count {
            // Newton: pi_k = sum_{i<k} (-1)^(i-1) e_i pi_{k-i} + (-1)^(k-1) k e_k.
            let mut acc = e(k).scale(&ratio(
                if k % 2 == 1 { k as i64 } else { -(k as i64) },
                1,
            ));
            for i in 1..k {
                let term = e(i).mul(&sums[k - i - 1])?;
                acc = if i % 2 == 1 {
                    acc.add(&term)?
                } else {
                    acc.sub(&term)?
                };
            }
            sums.push(acc);
        }
        Self::check(ring, name, &rank, &sums)?;
        Ok(AtomData {
            name: name.to_string(),
            rank,
            power_sums: sums,
            roots: None,
        })
    }

    /// Build an atom of rank `2 * roots.len()` from explicit half-roots
    /// (each homogeneous of degree 2): pi_k = sum_i roots_i^(2k).
    pub fn from_roots(
        ring: &Arc<RingContext>,
        name: &str,
        roots: Vec<GradedElement>,
    ) -> Result<Self> {
        for r in &roots {
            if r.ctx().as_ref() != ring.as_ref() {
                return Err(Error::ContextMismatch);
            }
            if !r.is_homogeneous(2) {
                return Err(Error::Config(format!(
                    "roots of atom `{name}` must be homogeneous of degree 2"
                )));
            }
        }
        let count = Self::sums_len(ring);
        let mut sums = Vec::with_capacity(count);
        for k in 1..=count {
            let mut acc = GradedElement::zero(ring);
            for r in &roots {
                acc = acc.add(&r.pow(2 * k as u32)?)?;
            }
            sums.push(acc);
        }
        let rank = GradedElement::from_int(ring, 2 * roots.len() as i64);
        Self::check(ring, name, &rank, &sums)?;
        Ok(AtomData {
            name: name.to_string(),
            rank,
            power_sums: sums,
            roots: Some(roots),
        })
    }

    /// A flat bundle of the given rank: all power sums vanish.
    pub fn trivial(ring: &Arc<RingContext>, name: &str, rank: GradedElement) -> Result<Self> {
        let sums = vec![GradedElement::zero(ring); Self::sums_len(ring)];
        Self::check(ring, name, &rank, &sums)?;
        Ok(AtomData {
            name: name.to_string(),
            rank,
            power_sums: sums,
            roots: None,
        })
    }

    /// Direct sum: ranks and power sums add, explicit roots concatenate.
    pub fn direct_sum(&self, other: &AtomData, name: &str) -> Result<AtomData> {
        let rank = self.rank.add(&other.rank)?;
        let mut sums = Vec::with_capacity(self.power_sums.len());
        if self.power_sums.len() != other.power_sums.len() {
            return Err(Error::ContextMismatch);
        }
        for (a, b) in self.power_sums.iter().zip(&other.power_sums) {
            sums.push(a.add(b)?);
        }
        let roots = match (&self.roots, &other.roots) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        Ok(AtomData {
            name: name.to_string(),
            rank,
            power_sums: sums,
            roots,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> &GradedElement {
        &self.rank
    }

    /// pi_k, the k-th even power sum (k >= 1).
    pub fn power_sum(&self, k: usize) -> &GradedElement {
        &self.power_sums[k - 1]
    }

    pub fn power_sums(&self) -> &[GradedElement] {
        &self.power_sums
    }

    pub fn roots(&self) -> Option<&[GradedElement]> {
        self.roots.as_deref()
    }
}

/// The four named bundles every verification manipulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomKind {
    Tz,
    F1,
    F2,
    Xi,
}

impl AtomKind {
    pub fn label(self) -> &'static str {
        match self {
            AtomKind::Tz => "TZ",
            AtomKind::F1 => "F1",
            AtomKind::F2 => "F2",
            AtomKind::Xi => "XI",
        }
    }
}

/// Virtual-bundle expressions over the four atoms, evaluated at the level
/// of Chern characters.  `Const` is a degree-0 coefficient standing for a
/// flat virtual bundle of that (possibly symbolic) rank.
#[derive(Debug, Clone, PartialEq)]
pub enum BundleExpr {
    Atom(AtomKind),
    Const(GradedElement),
    Sum(Box<BundleExpr>, Box<BundleExpr>),
    Diff(Box<BundleExpr>, Box<BundleExpr>),
    Tensor(Box<BundleExpr>, Box<BundleExpr>),
    Lambda2(Box<BundleExpr>),
    Sym2(Box<BundleExpr>),
    Adams(u32, Box<BundleExpr>),
    Tilde(Box<BundleExpr>),
}

impl BundleExpr {
    pub fn atom(kind: AtomKind) -> Self {
        BundleExpr::Atom(kind)
    }

    pub fn constant(g: GradedElement) -> Self {
        BundleExpr::Const(g)
    }

    pub fn lambda2(e: BundleExpr) -> Self {
        BundleExpr::Lambda2(Box::new(e))
    }

    pub fn sym2(e: BundleExpr) -> Self {
        BundleExpr::Sym2(Box::new(e))
    }

    pub fn adams(k: u32, e: BundleExpr) -> Self {
        BundleExpr::Adams(k, Box::new(e))
    }

    /// The reduced bundle E - rank(E).
    pub fn tilde(e: BundleExpr) -> Self {
        BundleExpr::Tilde(Box::new(e))
    }

    /// Parse the textual grammar, e.g.
    /// `L2(F1) + S2(F2) - F1*F2 + TZ - 2` or `3*tilde(XI)`.
    /// Identifiers that are not atoms resolve to degree-0 ring generators.
    pub fn parse(ctx: &Arc<RingContext>, input: &str) -> Result<Self> {
        ExprParser {
            ctx,
            bytes: input.as_bytes(),
            pos: 0,
        }
        .parse_toplevel()
    }
}

impl Add for BundleExpr {
    type Output = BundleExpr;
    fn add(self, rhs: BundleExpr) -> BundleExpr {
        BundleExpr::Sum(Box::new(self), Box::new(rhs))
    }
}

impl Sub for BundleExpr {
    type Output = BundleExpr;
    fn sub(self, rhs: BundleExpr) -> BundleExpr {
        BundleExpr::Diff(Box::new(self), Box::new(rhs))
    }
}

impl Mul for BundleExpr {
    type Output = BundleExpr;
    fn mul(self, rhs: BundleExpr) -> BundleExpr {
        BundleExpr::Tensor(Box::new(self), Box::new(rhs))
    }
}

fn display_const(g: &GradedElement) -> String {
    if g.is_constant() {
        let c = g.constant_term();
        if !c.is_negative() && c.is_integer() {
            return c.to_string();
        }
    }
    format!("const({g})")
}

impl BundleExpr {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, in_product: bool) -> fmt::Result {
        match self {
            BundleExpr::Atom(a) => write!(f, "{}", a.label()),
            BundleExpr::Const(g) => write!(f, "{}", display_const(g)),
            BundleExpr::Sum(a, b) => {
                if in_product {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, false)?;
                write!(f, " + ")?;
                b.fmt_prec(f, false)?;
                if in_product {
                    write!(f, ")")?;
                }
                Ok(())
            }
            BundleExpr::Diff(a, b) => {
                if in_product {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, false)?;
                write!(f, " - ")?;
                match **b {
                    BundleExpr::Sum(..) | BundleExpr::Diff(..) => {
                        write!(f, "(")?;
                        b.fmt_prec(f, false)?;
                        write!(f, ")")?;
                    }
                    _ => b.fmt_prec(f, true)?,
                }
                if in_product {
                    write!(f, ")")?;
                }
                Ok(())
            }
            BundleExpr::Tensor(a, b) => {
                a.fmt_prec(f, true)?;
                write!(f, "*")?;
                b.fmt_prec(f, true)
            }
            BundleExpr::Lambda2(e) => {
                write!(f, "L2(")?;
                e.fmt_prec(f, false)?;
                write!(f, ")")
            }
            BundleExpr::Sym2(e) => {
                write!(f, "S2(")?;
                e.fmt_prec(f, false)?;
                write!(f, ")")
            }
            BundleExpr::Adams(k, e) => {
                write!(f, "psi{k}(")?;
                e.fmt_prec(f, false)?;
                write!(f, ")")
            }
            BundleExpr::Tilde(e) => {
                write!(f, "tilde(")?;
                e.fmt_prec(f, false)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for BundleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

struct ExprParser<'a> {
    ctx: &'a Arc<RingContext>,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            at: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn parse_toplevel(&mut self) -> Result<BundleExpr> {
        let e = self.parse_expr()?;
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return self.err("trailing input after expression");
        }
        Ok(e)
    }

    fn parse_expr(&mut self) -> Result<BundleExpr> {
        let mut acc = self.parse_term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.parse_term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.parse_term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<BundleExpr> {
        let mut acc = self.parse_factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                acc = acc * self.parse_factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_factor(&mut self) -> Result<BundleExpr> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.parse_uint()?;
                Ok(BundleExpr::Const(GradedElement::constant(
                    self.ctx,
                    BigRational::from_integer(BigInt::from(n)),
                )))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.parse_expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.parse_name();
                match name.as_str() {
                    "TZ" => Ok(BundleExpr::Atom(AtomKind::Tz)),
                    "F1" => Ok(BundleExpr::Atom(AtomKind::F1)),
                    "F2" => Ok(BundleExpr::Atom(AtomKind::F2)),
                    "XI" => Ok(BundleExpr::Atom(AtomKind::Xi)),
                    "L2" => Ok(BundleExpr::lambda2(self.parse_parenthesized()?)),
                    "S2" => Ok(BundleExpr::sym2(self.parse_parenthesized()?)),
                    "tilde" => Ok(BundleExpr::tilde(self.parse_parenthesized()?)),
                    "const" => {
                        self.skip_ws();
                        self.expect(b'(')?;
                        let start = self.pos;
                        let mut depth = 1usize;
                        while self.pos < self.bytes.len() && depth > 0 {
                            match self.bytes[self.pos] {
                                b'(' => depth += 1,
                                b')' => depth -= 1,
                                _ => {}
                            }
                            self.pos += 1;
                        }
                        if depth != 0 {
                            return self.err("unclosed `const(`");
                        }
                        let inner = std::str::from_utf8(&self.bytes[start..self.pos - 1])
                            .expect("input is utf-8");
                        Ok(BundleExpr::Const(GradedElement::parse(self.ctx, inner)?))
                    }
                    _ if name.starts_with("psi")
                        && name.len() > 3
                        && name[3..].bytes().all(|b| b.is_ascii_digit()) =>
                    {
                        let k: u32 = name[3..].parse().map_err(|_| Error::Parse {
                            at: self.pos,
                            msg: "Adams index out of range".into(),
                        })?;
                        if k == 0 {
                            return self.err("Adams operation psi0 is not supported");
                        }
                        Ok(BundleExpr::adams(k, self.parse_parenthesized()?))
                    }
                    _ => {
                        let idx = self
                            .ctx
                            .index_of(&name)
                            .ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
                        if self.ctx.generators()[idx].degree != 0 {
                            return self.err(format!(
                                "generator `{name}` has positive degree and is not a rank"
                            ));
                        }
                        Ok(BundleExpr::Const(GradedElement::generator(
                            self.ctx, &name,
                        )?))
                    }
                }
            }
            Some(_) => self.err("expected a factor"),
            None => self.err("unexpected end of input"),
        }
    }

    fn parse_parenthesized(&mut self) -> Result<BundleExpr> {
        self.skip_ws();
        self.expect(b'(')?;
        let e = self.parse_expr()?;
        self.expect(b')')?;
        Ok(e)
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{}`", b as char))
        }
    }

    fn parse_name(&mut self) -> String {
        let start = self.pos;
        while self
            .peek()
            .map(|c| c.is_ascii_alphanumeric())
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned()
    }

    fn parse_uint(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("digits are ascii")
            .parse::<u64>()
            .map_err(|e| Error::Parse {
                at: start,
                msg: e.to_string(),
            })
    }
}

/// The four atoms of a verification instance, tied to one ring context.
/// `xi` always has exactly one half-root (its Euler class, possibly zero).
#[derive(Debug, Clone)]
pub struct BundleSet {
    ring: Arc<RingContext>,
    tz: AtomData,
    f1: AtomData,
    f2: AtomData,
    xi: AtomData,
}

impl BundleSet {
    pub fn new(
        ring: Arc<RingContext>,
        tz: AtomData,
        f1: AtomData,
        f2: AtomData,
        xi: AtomData,
    ) -> Result<Self> {
        match xi.roots() {
            Some(roots) if roots.len() == 1 => {}
            _ => {
                return Err(Error::Config(
                    "the rank-2 bundle must be given by a single half-root".into(),
                ))
            }
        }
        Ok(BundleSet {
            ring,
            tz,
            f1,
            f2,
            xi,
        })
    }

    pub fn ring(&self) -> &Arc<RingContext> {
        &self.ring
    }

    pub fn atom(&self, kind: AtomKind) -> &AtomData {
        match kind {
            AtomKind::Tz => &self.tz,
            AtomKind::F1 => &self.f1,
            AtomKind::F2 => &self.f2,
            AtomKind::Xi => &self.xi,
        }
    }

    /// The Euler class of the rank-2 bundle (zero when it is trivial).
    pub fn xi_euler(&self) -> &GradedElement {
        &self.xi.roots().expect("validated at construction")[0]
    }

    /// Virtual rank of an expression.
    pub fn rank(&self, expr: &BundleExpr) -> Result<GradedElement> {
        match expr {
            BundleExpr::Atom(a) => Ok(self.atom(*a).rank().clone()),
            BundleExpr::Const(g) => {
                if g.ctx().as_ref() != self.ring.as_ref() {
                    return Err(Error::ContextMismatch);
                }
                if !g.is_homogeneous(0) {
                    return Err(Error::Config(
                        "constant virtual bundles must have degree-0 rank".into(),
                    ));
                }
                Ok(g.clone())
            }
            BundleExpr::Sum(a, b) => self.rank(a)?.add(&self.rank(b)?),
            BundleExpr::Diff(a, b) => self.rank(a)?.sub(&self.rank(b)?),
            BundleExpr::Tensor(a, b) => self.rank(a)?.mul(&self.rank(b)?),
            BundleExpr::Lambda2(e) => {
                let r = self.rank(e)?;
                Ok(r.mul(&r.sub(&GradedElement::one(&self.ring))?)?.scale(&ratio(1, 2)))
            }
            BundleExpr::Sym2(e) => {
                let r = self.rank(e)?;
                Ok(r.mul(&r.add(&GradedElement::one(&self.ring))?)?.scale(&ratio(1, 2)))
            }
            BundleExpr::Adams(_, e) => self.rank(e),
            BundleExpr::Tilde(_) => Ok(GradedElement::zero(&self.ring)),
        }
    }

    /// Chern character of the complexification.
    pub fn ch(&self, expr: &BundleExpr) -> Result<GradedElement> {
        self.ch_adams(1, expr)
    }

    /// Chern character of the k-th Adams operation, k >= 1.
    pub fn ch_adams(&self, k: u32, expr: &BundleExpr) -> Result<GradedElement> {
        if k == 0 {
            return Err(Error::Config("Adams operations require k >= 1".into()));
        }
        match expr {
            BundleExpr::Atom(a) => {
                let atom = self.atom(*a);
                let mut acc = atom.rank().clone();
                for (j, pi) in atom.power_sums().iter().enumerate() {
                    let jj = (j + 1) as u32;
                    let num = BigInt::from(2) * BigInt::from(k).pow(2 * jj);
                    let coeff = BigRational::new(num, factorial(2 * jj));
                    acc = acc.add(&pi.scale(&coeff))?;
                }
                Ok(acc)
            }
            BundleExpr::Const(g) => self.rank(expr).map(|_| g.clone()),
            BundleExpr::Sum(a, b) => self.ch_adams(k, a)?.add(&self.ch_adams(k, b)?),
            BundleExpr::Diff(a, b) => self.ch_adams(k, a)?.sub(&self.ch_adams(k, b)?),
            BundleExpr::Tensor(a, b) => self.ch_adams(k, a)?.mul(&self.ch_adams(k, b)?),
            BundleExpr::Lambda2(e) => {
                let x = self.ch_adams(k, e)?;
                let y = self.ch_adams(2 * k, e)?;
                Ok(x.mul(&x)?.sub(&y)?.scale(&ratio(1, 2)))
            }
            BundleExpr::Sym2(e) => {
                let x = self.ch_adams(k, e)?;
                let y = self.ch_adams(2 * k, e)?;
                Ok(x.mul(&x)?.add(&y)?.scale(&ratio(1, 2)))
            }
            BundleExpr::Adams(l, e) => self.ch_adams(k * l, e),
            BundleExpr::Tilde(e) => self.ch_adams(k, e)?.sub(&self.rank(e)?),
        }
    }
}

/// A multiplicative genus, stored as the log-coefficients a_{2k} of its
/// defining even series g(x) = exp(sum a_{2k} x^(2k)).
#[derive(Debug, Clone, PartialEq)]
pub struct GenusSpec {
    name: String,
    log_coeffs: Vec<BigRational>,
}

impl GenusSpec {
    /// Derive the log-coefficients from a defining series with g(0) = 1 and
    /// only even powers.
    pub fn from_even_series(name: &str, g: &RatSeries, max_degree: u32) -> Result<Self> {
        for k in (1..g.len()).step_by(2) {
            if !g.coeff(k).is_zero() {
                return Err(Error::Config(format!(
                    "defining series of genus `{name}` has an odd term at x^{k}"
                )));
            }
        }
        let count = (max_degree / 4) as usize;
        let log_coeffs = g.log()?.even_coeffs_from_two(count)?;
        Ok(GenusSpec {
            name: name.to_string(),
            log_coeffs,
        })
    }

    /// The A-hat genus, defined by (x/2)/sinh(x/2).
    pub fn a_hat(max_degree: u32) -> Self {
        let len = max_degree as usize / 2 + 2;
        Self::from_even_series("A-hat", &RatSeries::half_x_over_sinh_half_x(len), max_degree)
            .expect("the A-hat defining series is even with constant term 1")
    }

    /// The L-genus (signature), defined by x/tanh(x).
    pub fn l_genus(max_degree: u32) -> Self {
        let len = max_degree as usize / 2 + 2;
        Self::from_even_series("L", &RatSeries::x_over_tanh_x(len), max_degree)
            .expect("the L defining series is even with constant term 1")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// a_{2k} for k = 1 .. D/4.
    pub fn log_coeffs(&self) -> &[BigRational] {
        &self.log_coeffs
    }

    /// The genus of an atom: exp(sum_k a_{2k} pi_k).
    pub fn genus_form(&self, atom: &AtomData) -> Result<GradedElement> {
        let ring = atom.rank().ctx().clone();
        let mut logpart = GradedElement::zero(&ring);
        for (k, pi) in atom.power_sums().iter().enumerate() {
            if k < self.log_coeffs.len() {
                logpart = logpart.add(&pi.scale(&self.log_coeffs[k]))?;
            }
        }
        logpart.exp_nilpotent()
    }
}

/// Which closed form of the Euler-class contribution to use: the two agree
/// inside all degree-8 and degree-12 extractions because sinh(c/2) only
/// feeds degrees congruent to 2 mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EulerMode {
    CoshHalf,
    ExpHalf,
}

impl EulerMode {
    pub fn label(self) -> &'static str {
        match self {
            EulerMode::CoshHalf => "cosh",
            EulerMode::ExpHalf => "exp",
        }
    }
}

/// cosh(c/2) or e^(c/2) for the Euler class c of the rank-2 bundle.
pub fn euler_factor(set: &BundleSet, mode: EulerMode) -> Result<GradedElement> {
    let c = set.xi_euler();
    let len = (set.ring().max_degree() / 2 + 1) as usize;
    let coeffs = match mode {
        EulerMode::CoshHalf => RatSeries::cosh_half(len),
        EulerMode::ExpHalf => RatSeries::exp_linear(len, &ratio(1, 2)),
    };
    c.apply_univariate_series(coeffs.coeffs())
}

/// The four infinite-product families, classified by which power operation
/// runs over which exponents:
///
/// * `SymWhole`:        prod_{u>=1} S_{q^u}
/// * `LambdaMinusHalf`: prod_{v>=1} Lam_{-q^(v-1/2)}
/// * `LambdaPlusHalf`:  prod_{r>=1} Lam_{+q^(r-1/2)}
/// * `LambdaWhole`:     prod_{s>=1} Lam_{+q^s}
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductFamily {
    SymWhole,
    LambdaMinusHalf,
    LambdaPlusHalf,
    LambdaWhole,
}

impl ProductFamily {
    /// Weight of ch(psi^k ..) in the log, and whether exponents step by
    /// whole or half powers of q.
    fn weight(self, k: u32) -> BigRational {
        match self {
            ProductFamily::SymWhole => ratio(1, k as i64),
            ProductFamily::LambdaMinusHalf => ratio(-1, k as i64),
            ProductFamily::LambdaPlusHalf | ProductFamily::LambdaWhole => {
                ratio(if k % 2 == 1 { 1 } else { -1 }, k as i64)
            }
        }
    }

    fn half_steps(self) -> bool {
        matches!(
            self,
            ProductFamily::LambdaMinusHalf | ProductFamily::LambdaPlusHalf
        )
    }
}

/// ch of the whole infinite product of a family applied to `expr`,
/// truncated below q^(order/2).  Computed as exp of
/// sum_{index j, power k} weight(k) q^(e(j,k)) ch(psi^k expr).
pub fn lambda_product_ch(
    set: &BundleSet,
    expr: &BundleExpr,
    family: ProductFamily,
    order: u32,
) -> Result<QSeries<GradedElement>> {
    let ring = Arc::clone(set.ring());
    let mut log = QSeries::<GradedElement>::zero(Arc::clone(&ring), order);
    for k in 1..order {
        // Smallest exponent this k can reach: j = 1.
        let base = if family.half_steps() { k } else { 2 * k };
        if base >= order {
            break;
        }
        let chk = set.ch_adams(k, expr)?.scale(&family.weight(k));
        if chk.is_zero() {
            continue;
        }
        let mut j = 1u32;
        loop {
            let h = if family.half_steps() {
                (2 * j - 1) * k
            } else {
                2 * j * k
            };
            if h >= order {
                break;
            }
            log = log.add(&QSeries::monomial(
                Arc::clone(&ring),
                order,
                h,
                chk.clone(),
            )?)?;
            j += 1;
        }
    }
    log.exp()
}

/// ch Lam_t(expr) for the single value t = sign * q^(h/2), h >= 1.
pub fn lambda_t_ch(
    set: &BundleSet,
    expr: &BundleExpr,
    sign: i64,
    t_half_exp: u32,
    order: u32,
) -> Result<QSeries<GradedElement>> {
    single_product_ch(set, expr, sign, t_half_exp, order, true)
}

/// ch S_t(expr) for the single value t = sign * q^(h/2), h >= 1.
pub fn sym_t_ch(
    set: &BundleSet,
    expr: &BundleExpr,
    sign: i64,
    t_half_exp: u32,
    order: u32,
) -> Result<QSeries<GradedElement>> {
    single_product_ch(set, expr, sign, t_half_exp, order, false)
}

fn single_product_ch(
    set: &BundleSet,
    expr: &BundleExpr,
    sign: i64,
    t_half_exp: u32,
    order: u32,
    exterior: bool,
) -> Result<QSeries<GradedElement>> {
    if t_half_exp == 0 {
        return Err(Error::Config(
            "lambda/sym series need t with positive q-valuation".into(),
        ));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::Config("t sign must be +1 or -1".into()));
    }
    let ring = Arc::clone(set.ring());
    let mut log = QSeries::<GradedElement>::zero(Arc::clone(&ring), order);
    let mut k = 1u32;
    while k * t_half_exp < order {
        // log Lam_t = sum (-1)^(k-1) t^k/k ch psi^k; log S_t drops the sign.
        let mut w = ratio(if sign < 0 && k % 2 == 1 { -1 } else { 1 }, k as i64);
        if exterior && k.is_multiple_of(2) {
            w = -w;
        }
        let chk = set.ch_adams(k, expr)?.scale(&w);
        if !chk.is_zero() {
            log = log.add(&QSeries::monomial(
                Arc::clone(&ring),
                order,
                k * t_half_exp,
                chk,
            )?)?;
        }
        k += 1;
    }
    log.exp()
}

/// The q-expansion of ch Theta(T~Z, F~1, F~2, xi~) for the half-exponent
/// theta series: S over whole powers on the reduced tangent bundle, Lambda
/// at -q^(half) on F~1 - F~2 - 2 xi~, and Lambda at +q^(half) and +q^(whole)
/// on xi~.
pub fn theta2_expansion(set: &BundleSet, order: u32) -> Result<QSeries<GradedElement>> {
    use AtomKind::*;
    let t = BundleExpr::tilde;
    let a = BundleExpr::atom;
    let two = BundleExpr::Const(GradedElement::from_int(set.ring(), 2));
    let mixed = t(a(F1)) - t(a(F2)) - two * t(a(Xi));
    let s = lambda_product_ch(set, &t(a(Tz)), ProductFamily::SymWhole, order)?;
    let l1 = lambda_product_ch(set, &mixed, ProductFamily::LambdaMinusHalf, order)?;
    let l2 = lambda_product_ch(set, &t(a(Xi)), ProductFamily::LambdaPlusHalf, order)?;
    let l3 = lambda_product_ch(set, &t(a(Xi)), ProductFamily::LambdaWhole, order)?;
    s.mul(&l1)?.mul(&l2)?.mul(&l3)
}

/// The companion whole-exponent theta series for a virtual bundle `v`:
/// S over whole powers on T~Z, Lambda at +q^(whole) on v~ - 2 xi~, and the
/// two half-indexed Lambda families on xi~.  Only whole powers of q
/// survive: the two xi~ families cancel at odd half-exponents.
pub fn theta1_expansion(
    set: &BundleSet,
    v: &BundleExpr,
    order: u32,
) -> Result<QSeries<GradedElement>> {
    use AtomKind::*;
    let t = BundleExpr::tilde;
    let a = BundleExpr::atom;
    let two = BundleExpr::Const(GradedElement::from_int(set.ring(), 2));
    let arg = t(v.clone()) - two * t(a(Xi));
    let s = lambda_product_ch(set, &t(a(Tz)), ProductFamily::SymWhole, order)?;
    let l1 = lambda_product_ch(set, &arg, ProductFamily::LambdaWhole, order)?;
    let l2 = lambda_product_ch(set, &t(a(Xi)), ProductFamily::LambdaPlusHalf, order)?;
    let l3 = lambda_product_ch(set, &t(a(Xi)), ProductFamily::LambdaMinusHalf, order)?;
    s.mul(&l1)?.mul(&l2)?.mul(&l3)
}

/// A ring context carrying explicit degree-2 Chern roots: x1..x5 for the
/// rank-10 tangent bundle, y-roots for a rank-m bundle, z-roots for a
/// rank-n bundle (m, n even), and the Euler class c of the rank-2 bundle.
pub fn chern_root_set(max_degree: u32, m: u32, n: u32) -> Result<BundleSet> {
    if !m.is_multiple_of(2) || !n.is_multiple_of(2) {
        return Err(Error::UnsupportedConfiguration(
            "explicit-root contexts need even concrete ranks".into(),
        ));
    }
    let mut gens: Vec<(String, u32)> = Vec::new();
    for j in 1..=5 {
        gens.push((format!("x{j}"), 2));
    }
    for j in 1..=(m / 2) {
        gens.push((format!("y{j}"), 2));
    }
    for j in 1..=(n / 2) {
        gens.push((format!("z{j}"), 2));
    }
    gens.push(("c".to_string(), 2));
    let named: Vec<(&str, u32)> = gens.iter().map(|(s, d)| (s.as_str(), *d)).collect();
    let ring = RingContext::new(&named, max_degree)?;
    let root = |name: &str| GradedElement::generator(&ring, name);
    let mut tz_roots = Vec::new();
    for j in 1..=5 {
        tz_roots.push(root(&format!("x{j}"))?);
    }
    let mut y_roots = Vec::new();
    for j in 1..=(m / 2) {
        y_roots.push(root(&format!("y{j}"))?);
    }
    let mut z_roots = Vec::new();
    for j in 1..=(n / 2) {
        z_roots.push(root(&format!("z{j}"))?);
    }
    let tz = AtomData::from_roots(&ring, "TZ", tz_roots)?;
    let f1 = AtomData::from_roots(&ring, "F1", y_roots)?;
    let f2 = AtomData::from_roots(&ring, "F2", z_roots)?;
    let xi = AtomData::from_roots(&ring, "XI", vec![root("c")?])?;
    BundleSet::new(ring, tz, f1, f2, xi)
}

/// Normalized Jacobi theta quotients, assembled root by root.  With the
/// substitution e^(2 pi i v) -> e^x the five quotient shapes become exact
/// q-series with graded coefficients:
///
///   x theta'(0)/theta(x)    -> (x/2)/sinh(x/2) prod (1-q^j)^2 / ((1-e^x q^j)(1-e^-x q^j))
///   theta2(y)/theta2(0)     -> prod (1-e^y q^(j-1/2))(1-e^-y q^(j-1/2)) / (1-q^(j-1/2))^2
///   theta3(u)/theta3(0)     -> same with + signs at half exponents
///   theta1(u)/theta1(0)     -> cosh(u/2) prod (1+e^u q^j)(1+e^-u q^j) / (1+q^j)^2
///
/// and the full product over the tangent x-roots, the y/z-roots, and the
/// Euler class reproduces A-hat(TZ) cosh(c/2) ch Theta.
pub fn theta_quotient_expansion(set: &BundleSet, order: u32) -> Result<QSeries<GradedElement>> {
    let ring = Arc::clone(set.ring());
    let missing = || {
        Error::UnsupportedConfiguration(
            "theta-quotient expansion needs atoms with explicit roots".into(),
        )
    };
    let tz_roots = set.atom(AtomKind::Tz).roots().ok_or_else(missing)?;
    let f1_roots = set.atom(AtomKind::F1).roots().ok_or_else(missing)?;
    let f2_roots = set.atom(AtomKind::F2).roots().ok_or_else(missing)?;
    let c = set.xi_euler().clone();

    let mut acc = QSeries::<GradedElement>::one(Arc::clone(&ring), order);
    for x in tz_roots {
        acc = acc.mul(&q_theta_prime_quotient(&ring, x, order)?)?;
    }
    for y in f1_roots {
        acc = acc.mul(&q_theta2_quotient(&ring, y, order)?)?;
    }
    for z in f2_roots {
        acc = acc.mul(&q_theta2_quotient(&ring, z, order)?.invert()?)?;
    }
    let t2c = q_theta2_quotient(&ring, &c, order)?;
    acc = acc.mul(&t2c.mul(&t2c)?.invert()?)?;
    acc = acc.mul(&q_theta3_quotient(&ring, &c, order)?)?;
    acc.mul(&q_theta1_quotient(&ring, &c, order)?)
}

/// prod over j of (1 + sign * e * q^(h0 + step*j)) for j = 0, 1, ... while
/// the exponent stays below the truncation order.
fn geometric_product(
    ring: &Arc<RingContext>,
    e: &GradedElement,
    sign: i64,
    h0: u32,
    step: u32,
    order: u32,
) -> Result<QSeries<GradedElement>> {
    let mut acc = QSeries::<GradedElement>::one(Arc::clone(ring), order);
    let mut h = h0;
    while h < order {
        let factor = QSeries::one(Arc::clone(ring), order).add(&QSeries::monomial(
            Arc::clone(ring),
            order,
            h,
            e.scale_int(sign),
        )?)?;
        acc = acc.mul(&factor)?;
        h += step;
    }
    Ok(acc)
}

fn exp_pm(x: &GradedElement) -> Result<(GradedElement, GradedElement)> {
    Ok((x.exp_nilpotent()?, x.neg().exp_nilpotent()?))
}

fn q_theta_prime_quotient(
    ring: &Arc<RingContext>,
    x: &GradedElement,
    order: u32,
) -> Result<QSeries<GradedElement>> {
    let (ep, em) = exp_pm(x)?;
    let len = (ring.max_degree() / 2 + 1) as usize;
    let head = x.apply_univariate_series(RatSeries::half_x_over_sinh_half_x(len).coeffs())?;
    let one = GradedElement::one(ring);
    let num = geometric_product(ring, &one, -1, 2, 2, order)?;
    let den_p = geometric_product(ring, &ep, -1, 2, 2, order)?;
    let den_m = geometric_product(ring, &em, -1, 2, 2, order)?;
    num.mul(&num)?
        .mul(&den_p.mul(&den_m)?.invert()?)?
        .scale_elem(&head)
}

fn q_theta2_quotient(
    ring: &Arc<RingContext>,
    y: &GradedElement,
    order: u32,
) -> Result<QSeries<GradedElement>> {
    let (ep, em) = exp_pm(y)?;
    let one = GradedElement::one(ring);
    let num_p = geometric_product(ring, &ep, -1, 1, 2, order)?;
    let num_m = geometric_product(ring, &em, -1, 1, 2, order)?;
    let den = geometric_product(ring, &one, -1, 1, 2, order)?;
    num_p.mul(&num_m)?.mul(&den.mul(&den)?.invert()?)
}

fn q_theta3_quotient(
    ring: &Arc<RingContext>,
    u: &GradedElement,
    order: u32,
) -> Result<QSeries<GradedElement>> {
    let (ep, em) = exp_pm(u)?;
    let one = GradedElement::one(ring);
    let num_p = geometric_product(ring, &ep, 1, 1, 2, order)?;
    let num_m = geometric_product(ring, &em, 1, 1, 2, order)?;
    let den = geometric_product(ring, &one, 1, 1, 2, order)?;
    num_p.mul(&num_m)?.mul(&den.mul(&den)?.invert()?)
}

fn q_theta1_quotient(
    ring: &Arc<RingContext>,
    u: &GradedElement,
    order: u32,
) -> Result<QSeries<GradedElement>> {
    let (ep, em) = exp_pm(u)?;
    let len = (ring.max_degree() / 2 + 1) as usize;
    let head = u.apply_univariate_series(RatSeries::cosh_half(len).coeffs())?;
    let one = GradedElement::one(ring);
    let num_p = geometric_product(ring, &ep, 1, 2, 2, order)?;
    let num_m = geometric_product(ring, &em, 1, 2, 2, order)?;
    let den = geometric_product(ring, &one, 1, 2, 2, order)?;
    num_p
        .mul(&num_m)?
        .mul(&den.mul(&den)?.invert()?)?
        .scale_elem(&head)
}
