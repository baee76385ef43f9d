//! Degree-truncated graded-commutative polynomial algebra over exact
//! rationals.
//!
//! A `RingContext` fixes a finite list of named generators with even
//! cohomological degrees and a global even truncation degree D; every
//! monomial of degree > D is identically zero.  Elements are canonical maps
//! from exponent vectors (ordered by the fixed generator list) to nonzero
//! rational coefficients, so equality is literal map equality and zero never
//! hides in an unnormalized term.
//!
//! Degree-0 generators (such as symbolic ranks) make the degree-0 component
//! a polynomial ring itself, which is why "nilpotent" is a real check here:
//! an element is nilpotent iff its degree-0 component vanishes, not merely
//! its constant term.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{BigRational, One, Signed, Zero};
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};
use crate::ratseries::rat;

/// Exponent vector, indexed by the context's generator list.
pub type Expts = SmallVec<[u16; 12]>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

#[derive(Debug, PartialEq, Eq)]
pub struct RingContext {
    generators: Vec<Generator>,
    max_degree: u32,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric())
}

impl RingContext {
    /// A context with the given `(name, degree)` generators and truncation
    /// degree.  Degrees and the truncation bound must be even, names must be
    /// unique identifiers.
    pub fn new(gens: &[(&str, u32)], max_degree: u32) -> Result<Arc<Self>> {
        if max_degree == 0 || !max_degree.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "truncation degree must be a positive even integer, got {max_degree}"
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut generators = Vec::with_capacity(gens.len());
        for &(name, degree) in gens {
            if !valid_name(name) {
                return Err(Error::Config(format!("invalid generator name `{name}`")));
            }
            if !seen.insert(name) {
                return Err(Error::Config(format!("duplicate generator name `{name}`")));
            }
            if degree % 2 != 0 {
                return Err(Error::Config(format!(
                    "generator `{name}` has odd degree {degree}; only even degrees are supported"
                )));
            }
            generators.push(Generator {
                name: name.to_string(),
                degree,
            });
        }
        Ok(Arc::new(RingContext {
            generators,
            max_degree,
        }))
    }

    /// The standard context used for the symbolic-rank verifications: ranks
    /// m, n in degree 0, an Euler class c in degree 2, and Pontryagin
    /// generators for the tangent bundle and two auxiliary bundles.
    pub fn standard(max_degree: u32) -> Arc<Self> {
        Self::new(
            &[
                ("m", 0),
                ("n", 0),
                ("c", 2),
                ("p1T", 4),
                ("p2T", 8),
                ("p3T", 12),
                ("p1F1", 4),
                ("p2F1", 8),
                ("p3F1", 12),
                ("p1F2", 4),
                ("p2F2", 8),
                ("p3F2", 12),
            ],
            max_degree,
        )
        .expect("the standard generator list is valid")
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    fn monomial_degree(&self, e: &Expts) -> u32 {
        e.iter()
            .zip(&self.generators)
            .map(|(&k, g)| k as u32 * g.degree)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedElement {
    ctx: Arc<RingContext>,
    terms: BTreeMap<Expts, BigRational>,
}

impl GradedElement {
    pub fn zero(ctx: &Arc<RingContext>) -> Self {
        GradedElement {
            ctx: Arc::clone(ctx),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Arc<RingContext>) -> Self {
        Self::constant(ctx, BigRational::one())
    }

    pub fn constant(ctx: &Arc<RingContext>, value: BigRational) -> Self {
        let mut el = Self::zero(ctx);
        if !value.is_zero() {
            el.terms.insert(smallvec![0; ctx.len()], value);
        }
        el
    }

    pub fn from_int(ctx: &Arc<RingContext>, value: i64) -> Self {
        Self::constant(ctx, rat(value))
    }

    pub fn generator(ctx: &Arc<RingContext>, name: &str) -> Result<Self> {
        let idx = ctx
            .index_of(name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        let mut e: Expts = smallvec![0; ctx.len()];
        e[idx] = 1;
        let mut el = Self::zero(ctx);
        if ctx.generators()[idx].degree <= ctx.max_degree() {
            el.terms.insert(e, BigRational::one());
        }
        Ok(el)
    }

    /// A single monomial `coeff * prod name^exp`, mainly for tests.
    pub fn monomial(
        ctx: &Arc<RingContext>,
        factors: &[(&str, u16)],
        coeff: BigRational,
    ) -> Result<Self> {
        let mut e: Expts = smallvec![0; ctx.len()];
        for &(name, exp) in factors {
            let idx = ctx
                .index_of(name)
                .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
            e[idx] += exp;
        }
        let mut el = Self::zero(ctx);
        if !coeff.is_zero() && ctx.monomial_degree(&e) <= ctx.max_degree() {
            el.terms.insert(e, coeff);
        }
        Ok(el)
    }

    pub fn ctx(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms_len(&self) -> usize {
        self.terms.len()
    }

    pub fn iter_terms(&self) -> impl Iterator<Item = (&Expts, &BigRational)> {
        self.terms.iter()
    }

    fn same_ctx(&self, rhs: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &rhs.ctx) || *self.ctx == *rhs.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn add_term(&mut self, e: Expts, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.same_ctx(rhs)?;
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.same_ctx(rhs)?;
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, a: &BigRational) -> Self {
        if a.is_zero() {
            return Self::zero(&self.ctx);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= a;
        }
        out
    }

    pub fn scale_int(&self, a: i64) -> Self {
        self.scale(&rat(a))
    }

    /// Product, discarding every monomial of degree > D.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.same_ctx(rhs)?;
        let max = self.ctx.max_degree();
        let left: Vec<(&Expts, &BigRational, u32)> = self
            .terms
            .iter()
            .map(|(e, c)| (e, c, self.ctx.monomial_degree(e)))
            .collect();
        let right: Vec<(&Expts, &BigRational, u32)> = rhs
            .terms
            .iter()
            .map(|(e, c)| (e, c, self.ctx.monomial_degree(e)))
            .collect();
        let mut out = Self::zero(&self.ctx);
        for &(ea, ca, da) in &left {
            for &(eb, cb, db) in &right {
                if da + db > max {
                    continue;
                }
                let e: Expts = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::one(&self.ctx);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// The homogeneous component of the given degree.
    pub fn extract_degree(&self, degree: u32) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (e, c) in &self.terms {
            if self.ctx.monomial_degree(e) == degree {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// True when every term has exactly the given degree (vacuously true
    /// for zero).
    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.terms
            .keys()
            .all(|e| self.ctx.monomial_degree(e) == degree)
    }

    /// The coefficient of the empty monomial.
    pub fn constant_term(&self) -> BigRational {
        let e: Expts = smallvec![0; self.ctx.len()];
        self.terms.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }

    /// True when the element is a rational multiple of 1 (including 0).
    pub fn is_constant(&self) -> bool {
        match self.terms.len() {
            0 => true,
            1 => self.terms.keys().next().unwrap().iter().all(|&k| k == 0),
            _ => false,
        }
    }

    /// True when the degree-0 component vanishes, i.e. the element is
    /// nilpotent under degree truncation.
    pub fn is_nilpotent(&self) -> bool {
        self.extract_degree(0).is_zero()
    }

    /// exp(x) = sum x^k / k! for nilpotent x; the sum terminates because
    /// every monomial of x has positive degree.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        if !self.is_nilpotent() {
            return Err(Error::NotNilpotent);
        }
        let mut out = Self::one(&self.ctx);
        let mut term = Self::one(&self.ctx);
        let mut k: i64 = 0;
        loop {
            k += 1;
            term = term.mul(self)?.scale(&BigRational::new(1.into(), k.into()));
            if term.is_zero() {
                break;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Inverse of 1 + nu with nu of strictly positive degree, via the
    /// terminating geometric series.
    pub fn invert_unit(&self) -> Result<Self> {
        if self.extract_degree(0) != Self::one(&self.ctx) {
            return Err(Error::NotUnit);
        }
        let nu = self.sub(&Self::one(&self.ctx))?;
        let mut out = Self::one(&self.ctx);
        let mut term = Self::one(&self.ctx);
        loop {
            term = term.mul(&nu)?.neg();
            if term.is_zero() {
                break;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Inverse of c + nu with c a nonzero rational constant and nu of
    /// strictly positive degree.  This is the general unit test used for
    /// q-series coefficient inversion.
    pub fn try_reciprocal(&self) -> Result<Self> {
        let deg0 = self.extract_degree(0);
        if !deg0.is_constant() {
            return Err(Error::NonInvertibleConstant);
        }
        let c = deg0.constant_term();
        if c.is_zero() {
            return Err(Error::NonInvertibleConstant);
        }
        let unit = self.scale(&c.recip());
        Ok(unit.invert_unit()?.scale(&c.recip()))
    }

    /// Evaluate a univariate power series (given by its coefficient list
    /// `c_0, c_1, ...`) at a nilpotent element.  The list must cover every
    /// power that survives truncation.
    pub fn apply_univariate_series(&self, coeffs: &[BigRational]) -> Result<Self> {
        if !self.is_nilpotent() {
            return Err(Error::NotNilpotent);
        }
        let mut out = Self::zero(&self.ctx);
        let mut pow = Self::one(&self.ctx);
        let mut k = 0usize;
        loop {
            if k >= coeffs.len() {
                if pow.is_zero() {
                    break;
                }
                return Err(Error::SeriesTooShort { power: k });
            }
            out = out.add(&pow.scale(&coeffs[k]))?;
            pow = pow.mul(self)?;
            if pow.is_zero() {
                break;
            }
            k += 1;
        }
        Ok(out)
    }

    /// Substitute generators by homogeneous elements of a (possibly
    /// different) context.  Every generator of the source context must
    /// either appear in `assignment` or exist in the target context with
    /// the same name and degree.
    pub fn substitute(
        &self,
        target: &Arc<RingContext>,
        assignment: &[(&str, GradedElement)],
    ) -> Result<GradedElement> {
        for (name, _) in assignment {
            if self.ctx.index_of(name).is_none() {
                return Err(Error::UnknownGenerator((*name).to_string()));
            }
        }
        let mut images: Vec<GradedElement> = Vec::with_capacity(self.ctx.len());
        for gen in self.ctx.generators() {
            let assigned = assignment.iter().find(|(n, _)| *n == gen.name);
            let image = match assigned {
                Some((_, value)) => {
                    if !(Arc::ptr_eq(value.ctx(), target) || *value.ctx.as_ref() == **target) {
                        return Err(Error::ContextMismatch);
                    }
                    if !value.is_homogeneous(gen.degree) {
                        return Err(Error::InhomogeneousSubstitution {
                            generator: gen.name.clone(),
                            degree: gen.degree,
                        });
                    }
                    value.clone()
                }
                None => {
                    let idx = target
                        .index_of(&gen.name)
                        .ok_or_else(|| Error::UnknownGenerator(gen.name.clone()))?;
                    if target.generators()[idx].degree != gen.degree {
                        return Err(Error::InhomogeneousSubstitution {
                            generator: gen.name.clone(),
                            degree: gen.degree,
                        });
                    }
                    GradedElement::generator(target, &gen.name)?
                }
            };
            images.push(image);
        }

        // Memoize powers of each image: symbolic ranks show up with high
        // exponents across many terms.
        let mut powers: Vec<BTreeMap<u16, GradedElement>> =
            vec![BTreeMap::new(); self.ctx.len()];
        let mut out = GradedElement::zero(target);
        for (e, c) in &self.terms {
            let mut prod = GradedElement::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !powers[i].contains_key(&k) {
                    let p = images[i].pow(k as u32)?;
                    powers[i].insert(k, p);
                }
                prod = prod.mul(&powers[i][&k])?;
                if prod.is_zero() {
                    break;
                }
            }
            out = out.add(&prod)?;
        }
        Ok(out)
    }

    /// Same-context substitution convenience.
    pub fn substitute_same(&self, assignment: &[(&str, GradedElement)]) -> Result<GradedElement> {
        let ctx = Arc::clone(&self.ctx);
        self.substitute(&ctx, assignment)
    }

    /// The individual terms, formatted like the `Display` output, highest
    /// monomial first, at most `limit` of them.
    pub fn term_strings(&self, limit: usize) -> Vec<String> {
        self.terms
            .iter()
            .rev()
            .take(limit)
            .map(|(e, c)| {
                let mut s = String::new();
                if c.is_negative() {
                    s.push('-');
                }
                push_term(&mut s, &self.ctx, e, &c.abs());
                s
            })
            .collect()
    }

    /// Parse the `Display` format: signed terms `coeff*gen^exp*...` joined
    /// by `+`/`-`, e.g. `-1/24*p1T + m*c^2`.
    pub fn parse(ctx: &Arc<RingContext>, input: &str) -> Result<Self> {
        Parser {
            ctx,
            bytes: input.as_bytes(),
            pos: 0,
        }
        .parse_element()
    }
}

fn push_term(out: &mut String, ctx: &RingContext, e: &Expts, abs_coeff: &BigRational) {
    let mut factors: Vec<String> = Vec::new();
    if !abs_coeff.is_one() || e.iter().all(|&k| k == 0) {
        factors.push(abs_coeff.to_string());
    }
    for (i, &k) in e.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let name = &ctx.generators()[i].name;
        if k == 1 {
            factors.push(name.clone());
        } else {
            factors.push(format!("{name}^{k}"));
        }
    }
    out.push_str(&factors.join("*"));
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut s = String::new();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            if idx == 0 {
                if c.is_negative() {
                    s.push('-');
                }
            } else {
                s.push_str(if c.is_negative() { " - " } else { " + " });
            }
            push_term(&mut s, &self.ctx, e, &c.abs());
        }
        write!(f, "{s}")
    }
}

struct Parser<'a> {
    ctx: &'a Arc<RingContext>,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
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

    fn parse_element(&mut self) -> Result<GradedElement> {
        let mut out = GradedElement::zero(self.ctx);
        self.skip_ws();
        if self.peek().is_none() {
            return self.err("empty input");
        }
        let mut first = true;
        loop {
            self.skip_ws();
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                None if !first => break,
                _ if first => 1,
                _ => return self.err("expected `+` or `-` between terms"),
            };
            let term = self.parse_term()?;
            out = out.add(&if sign < 0 { term.neg() } else { term })?;
            first = false;
            self.skip_ws();
            if self.peek().is_none() {
                break;
            }
        }
        Ok(out)
    }

    fn parse_term(&mut self) -> Result<GradedElement> {
        let mut prod = GradedElement::one(self.ctx);
        loop {
            self.skip_ws();
            let factor = self.parse_factor()?;
            prod = prod.mul(&factor)?;
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                return Ok(prod);
            }
        }
    }

    fn parse_factor(&mut self) -> Result<GradedElement> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let value = self.parse_rational()?;
                Ok(GradedElement::constant(self.ctx, value))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.parse_name();
                let gen = GradedElement::generator(self.ctx, &name)?;
                self.skip_ws();
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    let exp = self.parse_uint()?;
                    if exp > u16::MAX as u64 {
                        return self.err("exponent too large");
                    }
                    gen.pow(exp as u32)
                } else {
                    Ok(gen)
                }
            }
            Some(_) => self.err("expected a rational number or generator name"),
            None => self.err("unexpected end of input"),
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

    fn parse_rational(&mut self) -> Result<BigRational> {
        let numer = self.parse_uint()?;
        self.skip_ws();
        let mut value = rat(numer as i64);
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let denom = self.parse_uint()?;
            if denom == 0 {
                return self.err("zero denominator");
            }
            value /= rat(denom as i64);
        }
        Ok(value)
    }
}
