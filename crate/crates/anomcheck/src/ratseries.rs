//! Exact univariate power series over the rationals, truncated at a fixed
//! number of terms.
//!
//! This is deliberately minimal: it exists to turn closed-form defining
//! series such as (x/2)/sinh(x/2) or x/tanh(x) into the finitely many exact
//! Taylor/log coefficients that the characteristic-class machinery consumes.
//! Index `k` of `coeffs` is the coefficient of x^k; all arithmetic truncates
//! to the shorter operand.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

/// Shorthand for an exact rational from an integer.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for the exact rational n/d.
pub fn ratio(n: i64, d: i64) -> BigRational {
    assert!(d != 0, "rational denominator must be nonzero");
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// k! as an exact big integer.
pub fn factorial(k: u32) -> BigInt {
    (1..=k as u64).map(BigInt::from).product()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatSeries {
    coeffs: Vec<BigRational>,
}

impl RatSeries {
    pub fn zero(len: usize) -> Self {
        RatSeries {
            coeffs: vec![BigRational::zero(); len],
        }
    }

    pub fn one(len: usize) -> Self {
        let mut s = Self::zero(len);
        if len > 0 {
            s.coeffs[0] = BigRational::one();
        }
        s
    }

    /// Build a series from a coefficient rule `k -> c_k`.
    pub fn from_fn(len: usize, f: impl FnMut(usize) -> BigRational) -> Self {
        RatSeries {
            coeffs: (0..len).map(f).collect(),
        }
    }

    /// sinh(x/2)/(x/2) = sum x^(2k) / (4^k (2k+1)!).
    pub fn sinh_half_over_half(len: usize) -> Self {
        Self::from_fn(len, |k| {
            if k % 2 != 0 {
                return BigRational::zero();
            }
            let j = (k / 2) as u32;
            BigRational::new(BigInt::one(), BigInt::from(4u32).pow(j) * factorial(2 * j + 1))
        })
    }

    /// cosh(x/2) = sum x^(2k) / (4^k (2k)!).
    pub fn cosh_half(len: usize) -> Self {
        Self::from_fn(len, |k| {
            if k % 2 != 0 {
                return BigRational::zero();
            }
            let j = (k / 2) as u32;
            BigRational::new(BigInt::one(), BigInt::from(4u32).pow(j) * factorial(2 * j))
        })
    }

    /// sinh(x/2) = sum x^(2k+1) / (2 * 4^k (2k+1)!).
    pub fn sinh_half(len: usize) -> Self {
        Self::from_fn(len, |k| {
            if k % 2 != 1 {
                return BigRational::zero();
            }
            let j = ((k - 1) / 2) as u32;
            BigRational::new(
                BigInt::one(),
                BigInt::from(2) * BigInt::from(4u32).pow(j) * factorial(2 * j + 1),
            )
        })
    }

    /// exp(a*x) = sum a^k x^k / k!.
    pub fn exp_linear(len: usize, a: &BigRational) -> Self {
        let mut c = BigRational::one();
        Self::from_fn(len, |k| {
            if k > 0 {
                c = &c * a / rat(k as i64);
            }
            c.clone()
        })
    }

    /// tanh-based defining series x/tanh(x) = x*cosh(x)/sinh(x).
    pub fn x_over_tanh_x(len: usize) -> Self {
        // cosh(x) and sinh(x)/x share only even powers of x.
        let cosh = Self::from_fn(len, |k| {
            if k % 2 != 0 {
                BigRational::zero()
            } else {
                BigRational::new(BigInt::one(), factorial(k as u32))
            }
        });
        let sinh_over_x = Self::from_fn(len, |k| {
            if k % 2 != 0 {
                BigRational::zero()
            } else {
                BigRational::new(BigInt::one(), factorial(k as u32 + 1))
            }
        });
        cosh.mul(&sinh_over_x.invert().expect("sinh(x)/x has constant term 1"))
    }

    /// (x/2)/sinh(x/2), the defining series of the A-hat genus.
    pub fn half_x_over_sinh_half_x(len: usize) -> Self {
        Self::sinh_half_over_half(len)
            .invert()
            .expect("sinh(x/2)/(x/2) has constant term 1")
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let len = self.len().min(rhs.len());
        Self::from_fn(len, |k| &self.coeffs[k] + &rhs.coeffs[k])
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let len = self.len().min(rhs.len());
        Self::from_fn(len, |k| &self.coeffs[k] - &rhs.coeffs[k])
    }

    pub fn scale(&self, a: &BigRational) -> Self {
        Self::from_fn(self.len(), |k| &self.coeffs[k] * a)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let len = self.len().min(rhs.len());
        let mut out = Self::zero(len);
        for (i, a) in self.coeffs.iter().take(len).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(len - i).enumerate() {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        out
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn invert(&self) -> Result<Self> {
        if self.is_empty() || self.coeffs[0].is_zero() {
            return Err(Error::NonInvertibleConstant);
        }
        let r0 = self.coeffs[0].recip();
        let mut out = Self::zero(self.len());
        out.coeffs[0] = r0.clone();
        for k in 1..self.len() {
            let mut s = BigRational::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    s += &self.coeffs[j] * &out.coeffs[k - j];
                }
            }
            out.coeffs[k] = -&r0 * s;
        }
        Ok(out)
    }

    /// log of a series with constant term 1, via log(1+v) = sum (-1)^(k-1) v^k / k.
    pub fn log(&self) -> Result<Self> {
        if self.is_empty() || !self.coeffs[0].is_one() {
            return Err(Error::NotUnit);
        }
        let mut v = self.clone();
        v.coeffs[0] = BigRational::zero();
        let mut out = Self::zero(self.len());
        let mut pow = Self::one(self.len());
        for k in 1..self.len() {
            pow = pow.mul(&v);
            if pow.coeffs.iter().all(Zero::is_zero) {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out = out.add(&pow.scale(&ratio(sign, k as i64)));
        }
        Ok(out)
    }

    /// True when every retained coefficient vanishes.
    pub fn is_zero_series(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The coefficients of even powers x^2, x^4, ... (those of x^(2k) at
    /// position k-1), as consumed by the multiplicative-genus construction.
    pub fn even_coeffs_from_two(&self, count: usize) -> Result<Vec<BigRational>> {
        let mut out = Vec::with_capacity(count);
        for k in 1..=count {
            if 2 * k >= self.len() {
                return Err(Error::SeriesTooShort { power: 2 * k });
            }
            out.push(self.coeffs[2 * k].clone());
        }
        Ok(out)
    }
}

impl std::fmt::Display for RatSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if wrote {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let a = c.abs();
            if k == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "x^{k}")?;
            } else {
                write!(f, "{a}*x^{k}")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}
