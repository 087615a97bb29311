//! Dense truncated power series over exact coefficient rings.
//!
//! A `Series<R>` of order K stores the coefficients of `z^0..=z^K`; every
//! operation truncates to the smallest order among its operands.

mod coefficients;
mod laurent;

pub use coefficients::{
    build_f, corollary2_coeffs, corollary2_log_estimate, corollary3_coeffs, corollary3_log_estimate, CoeffList,
    CoeffReport, Variant, MAX_BARRED_ORDER, MAX_UNBARRED_ORDER,
};
pub use laurent::LaurentA;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact coefficient ring: a commutative ring containing ℚ, with a partial inverse.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Multiplication by a rational scalar.
    fn scale(&self, q: &BigRational) -> Self;

    /// Multiplicative inverse when it exists in the ring.
    fn try_inv(&self) -> Option<Self>;

    /// For a unit `u`, the rational `e` with `log u = e · log a`, if `log u` is
    /// of that form (so `log 1 = 0`).
    fn log_in_a(&self) -> Option<BigRational>;
}

impl Coeff for BigRational {
    fn scale(&self, q: &BigRational) -> Self {
        self * q
    }

    fn try_inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn log_in_a(&self) -> Option<BigRational> {
        self.is_one().then(BigRational::zero)
    }
}

pub(crate) fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series<R> {
    coeffs: Vec<R>,
}

impl<R: Coeff> Series<R> {
    /// Series of the given order; missing coefficients are zero, extra ones dropped.
    pub fn new(mut coeffs: Vec<R>, order: usize) -> Self {
        coeffs.resize(order + 1, R::zero());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn constant(c: R, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// The formal variable `z`.
    pub fn variable(order: usize) -> Self {
        Self::new(vec![R::zero(), R::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec(), order.min(self.order()))
    }

    /// Re-declares the order, padding with zeros. Only sound where the caller
    /// knows the padded coefficients cannot reach the retained range.
    pub(crate) fn with_order(&self, order: usize) -> Self {
        Self::new(self.coeffs.clone(), order)
    }

    pub fn map<S: Coeff>(&self, f: impl Fn(&R) -> S) -> Series<S> {
        Series { coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        self.map(|c| c.scale(q))
    }

    pub fn scale_by(&self, c: &R) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self::new((0..=n).map(|k| self.coeffs[k].clone() + other.coeffs[k].clone()).collect(), n)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = vec![R::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self { coeffs: out }
    }

    pub fn inv(&self) -> Result<Self> {
        Self::constant(R::one(), self.order()).div(self)
    }

    /// `self / other`; the constant term of `other` must be a unit.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let n = self.order().min(other.order());
        let lead_inv = other.coeffs[0]
            .try_inv()
            .ok_or_else(|| Error::Algebra(format!("constant term {:?} is not invertible", other.coeffs[0])))?;
        let mut q: Vec<R> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[k].clone();
            for i in 1..=k {
                acc = acc - other.coeffs[i].clone() * q[k - i].clone();
            }
            q.push(acc * lead_inv.clone());
        }
        Ok(Self { coeffs: q })
    }

    /// `d/dz`; the result has order one less.
    pub fn derivative(&self) -> Self {
        let n = self.order().max(1) - 1;
        let coeffs = (1..=self.order())
            .map(|k| self.coeffs[k].scale(&BigRational::from_integer(BigInt::from(k))))
            .collect();
        Self::new(coeffs, n)
    }

    /// `z·d/dz`; unlike [`Series::derivative`] this keeps the order.
    pub fn euler_derivative(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.scale(&BigRational::from_integer(BigInt::from(k))))
                .collect(),
        }
    }

    /// Antiderivative with zero constant term; the result has order one more.
    pub fn integral(&self) -> Self {
        let mut coeffs = vec![R::zero()];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.scale(&rational(1, k as i64 + 1)));
        }
        let n = self.order() + 1;
        Self::new(coeffs, n)
    }

    /// Multiplication by `z^n`; the order is kept, top coefficients drop out.
    pub fn shift_up(&self, n: usize) -> Self {
        let mut coeffs = vec![R::zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs, self.order())
    }

    /// Division by `z^n`; the first `n` coefficients must vanish.
    pub fn shift_down(&self, n: usize) -> Result<Self> {
        if n > self.order() || self.coeffs[..n].iter().any(|c| !c.is_zero()) {
            return Err(Error::Algebra(format!("series is not divisible by z^{n}")));
        }
        Ok(Self::new(self.coeffs[n..].to_vec(), self.order() - n))
    }

    /// `log(self)` for a series with constant term one.
    pub fn log_of_unit(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Algebra("log needs constant term 1".into()));
        }
        if self.order() == 0 {
            return Ok(Self::zero(0));
        }
        let ratio = self.derivative().div(&self.truncate(self.order() - 1))?;
        Ok(ratio.integral())
    }

    /// `√self` for a series with constant term one.
    pub fn sqrt_of_unit(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Algebra("sqrt needs constant term 1".into()));
        }
        let half = rational(1, 2);
        let mut s: Vec<R> = vec![R::one()];
        for n in 1..=self.order() {
            let mut acc = self.coeffs[n].clone();
            for k in 1..n {
                acc = acc - s[k].clone() * s[n - k].clone();
            }
            s.push(acc.scale(&half));
        }
        Ok(Self { coeffs: s })
    }

    /// `self(inner(z))`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::Algebra("composition needs an inner series without constant term".into()));
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        let mut acc = Self::constant(self.coeffs[n].clone(), n);
        for k in (0..n).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] = acc.coeffs[0].clone() + self.coeffs[k].clone();
        }
        Ok(acc)
    }

    /// Compositional inverse: the series `z(w)` with `self(z(w)) = w`.
    ///
    /// Requires zero constant term and an invertible linear coefficient.
    /// Newton iteration `z ← z − (g(z) − w)/g′(z)`.
    pub fn reverse(&self, order: usize) -> Result<Self> {
        let order = order.min(self.order());
        let g = self.truncate(order);
        if !g.coeffs[0].is_zero() {
            return Err(Error::Algebra("reversion needs zero constant term".into()));
        }
        let lin_inv = g
            .coeff(1)
            .try_inv()
            .ok_or_else(|| Error::Algebra("reversion needs an invertible linear coefficient".into()))?;
        let w = Self::variable(order);
        let dg = g.derivative();
        let mut z = w.scale_by(&lin_inv);
        for _ in 0..=order + 1 {
            let defect = g.compose(&z)?.sub(&w);
            if defect.coeffs.iter().all(Zero::is_zero) {
                return Ok(z);
            }
            // defect has no constant term, so padding g′(z) to full order
            // cannot affect the retained coefficients of the quotient
            let slope = dg.compose(&z.truncate(order.saturating_sub(1)))?.with_order(order);
            z = z.sub(&defect.div(&slope)?);
        }
        Err(Error::Algebra("series reversion did not reach a fixed point".into()))
    }
}

/// A series plus symbolic multiples of `log w` and `log a`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogTagged<R> {
    pub series: Series<R>,
    pub log_w: BigRational,
    pub log_a: BigRational,
}

impl<R: Coeff> LogTagged<R> {
    pub fn plain(series: Series<R>) -> Self {
        Self { series, log_w: BigRational::zero(), log_a: BigRational::zero() }
    }

    /// `log z(w)` for `z(w) = c w^v (1 + O(w))` with `log c` a multiple of `log a`.
    pub fn log_of(z: &Series<R>) -> Result<Self> {
        let v = z
            .coeffs()
            .iter()
            .position(|c| !c.is_zero())
            .ok_or_else(|| Error::Algebra("log of the zero series".into()))?;
        let lead = z.coeff(v);
        let log_a = lead
            .log_in_a()
            .ok_or_else(|| Error::Algebra(format!("log of leading coefficient {lead:?} is not a multiple of log a")))?;
        let lead_inv = lead.try_inv().expect("unit leading coefficient");
        let unit = z.shift_down(v)?.scale_by(&lead_inv);
        Ok(Self {
            series: unit.log_of_unit()?,
            log_w: BigRational::from_integer(BigInt::from(v)),
            log_a,
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            series: self.series.add(&other.series),
            log_w: &self.log_w + &other.log_w,
            log_a: &self.log_a + &other.log_a,
        }
    }

    pub fn neg(&self) -> Self {
        Self { series: self.series.neg(), log_w: -&self.log_w, log_a: -&self.log_a }
    }

    /// The series part, provided both logarithmic tags cancelled.
    pub fn into_series(self) -> Result<Series<R>> {
        if !self.log_w.is_zero() || !self.log_a.is_zero() {
            return Err(Error::Algebra(format!(
                "logarithmic terms did not cancel: {} log w + {} log a",
                self.log_w, self.log_a
            )));
        }
        Ok(self.series)
    }
}
