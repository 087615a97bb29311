use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Coeff;

/// Laurent polynomial in the symbol `a`, with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentA {
    terms: BTreeMap<i32, BigRational>,
}

impl LaurentA {
    pub fn monomial(c: BigRational, exponent: i32) -> Self {
        let mut out = Self::default();
        out.push(exponent, c);
        out
    }

    /// The symbol `a` itself.
    pub fn a() -> Self {
        Self::monomial(BigRational::one(), 1)
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn coeff(&self, exponent: i32) -> BigRational {
        self.terms.get(&exponent).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Nonzero terms as (exponent, coefficient), exponents ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigRational)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn eval(&self, a: f64) -> f64 {
        self.terms().map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * a.powi(e)).sum()
    }

    fn push(&mut self, exponent: i32, c: BigRational) {
        let slot = self.terms.entry(exponent).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    fn single(&self) -> Option<(i32, &BigRational)> {
        (self.terms.len() == 1).then(|| self.terms().next().unwrap())
    }
}

impl Add for LaurentA {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (e, c) in rhs.terms {
            self.push(e, c);
        }
        self
    }
}

impl Sub for LaurentA {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for LaurentA {
    type Output = Self;
    fn neg(self) -> Self {
        Self { terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl Mul for LaurentA {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.push(ea + eb, ca * cb);
            }
        }
        out
    }
}

impl Zero for LaurentA {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for LaurentA {
    fn one() -> Self {
        Self::from_rational(BigRational::one())
    }
}

impl Coeff for LaurentA {
    fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(&e, c)| (e, c * q)).collect() }
    }

    /// Only monomials are units.
    fn try_inv(&self) -> Option<Self> {
        let (e, c) = self.single()?;
        Some(Self::monomial(c.recip(), -e))
    }

    fn log_in_a(&self) -> Option<BigRational> {
        let (e, c) = self.single()?;
        c.is_one().then(|| BigRational::from_integer(BigInt::from(e)))
    }
}

/// Signed `p/q * a^e` terms, exponents descending; the zero polynomial prints `0`.
impl fmt::Display for LaurentA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write!(f, "{} * a^{}", c.abs(), e)?;
        }
        Ok(())
    }
}
