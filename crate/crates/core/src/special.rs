//! Auxiliary functions of the shape parameter α: the Dirichlet series
//! `D_α(s) = Σ_r r^{-s} e^{-αr} / (1 - e^{-αr})` and everything built on it
//! (Φ, Ψ, Θ, Δ and their barred variants), plus exact ζ(-k).
//!
//! Every evaluator sums its defining r-series directly and stops on an
//! a-priori tail bound, so the returned value is within the requested
//! absolute tolerance of the exact series (up to floating rounding).
//! Derivatives in α come from the differentiated series.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::truncation::{decay_pair, eulerian_sup, geometric_moment, sum_r_series, TermBound};

/// Target absolute truncation error, `0 < abs_tol <= 1e-6`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalTolerance<T>(T);

impl<T: Real> EvalTolerance<T> {
    pub fn new(abs_tol: T) -> Result<Self> {
        if abs_tol > T::zero() && abs_tol <= T::lit(1e-6) {
            Ok(Self(abs_tol))
        } else {
            Err(Error::domain("tolerance must lie in (0, 1e-6]", abs_tol.to_f64_lossy()))
        }
    }

    pub fn abs(self) -> T {
        self.0
    }

    pub fn halved(self) -> Self {
        Self(self.0 / T::lit(2.0))
    }
}

impl<T: Real> Default for EvalTolerance<T> {
    fn default() -> Self {
        Self(T::lit(1e-12))
    }
}

/// ζ(2) = π²/6, the constant separating Φ̄ from Φ.
pub fn zeta2<T: Real>() -> T {
    T::PI() * T::PI() / T::lit(6.0)
}

pub(crate) fn check_positive<T: Real>(x: T, what: &'static str) -> Result<T> {
    if x.is_finite() && x > T::zero() {
        Ok(x)
    } else {
        Err(Error::domain(what, x.to_f64_lossy()))
    }
}

/// `∂_α^p D_α(s)`, summed from the differentiated series
/// `(-1)^p Σ_r r^{p-s} Σ_k k^p e^{-αkr}`.
pub fn dirichlet_deriv<T: Real>(alpha: T, s: T, order: u32, tol: EvalTolerance<T>) -> Result<T> {
    let alpha = check_positive(alpha, "alpha must be positive and finite")?;
    if !s.is_finite() {
        return Err(Error::domain("s must be finite", s.to_f64_lossy()));
    }
    let power = T::from_u32(order).unwrap() - s;
    let (_, first_gap) = decay_pair(alpha);
    let bound = TermBound {
        scale: T::lit(eulerian_sup(order)) / first_gap.powi(order as i32 + 1),
        power,
        decay: alpha,
    };
    let sum: T = sum_r_series(tol.abs(), bound, |r| {
        let rr = T::from_count(r);
        let (u, gap) = decay_pair(alpha * rr);
        rr.powf(power) * geometric_moment(u, gap, order)
    })?;
    Ok(if order.is_multiple_of(2) { sum } else { -sum })
}

/// `D_α(s)`.
pub fn dirichlet<T: Real>(alpha: T, s: T, tol: EvalTolerance<T>) -> Result<T> {
    dirichlet_deriv(alpha, s, 0, tol)
}

/// `Φ(α) = D_α(2)`.
pub fn phi<T: Real>(alpha: T, tol: EvalTolerance<T>) -> Result<T> {
    dirichlet(alpha, T::lit(2.0), tol)
}

/// Φ′ (order 1) or Φ″ (order 2). Φ̄ has the same derivatives.
pub fn phi_derivative<T: Real>(alpha: T, order: u32, tol: EvalTolerance<T>) -> Result<T> {
    if !(1..=2).contains(&order) {
        return Err(Error::domain("derivative order must be 1 or 2", order));
    }
    dirichlet_deriv(alpha, T::lit(2.0), order, tol)
}

/// `Ψ(α) = D_α(1)`.
pub fn psi<T: Real>(alpha: T, tol: EvalTolerance<T>) -> Result<T> {
    dirichlet(alpha, T::one(), tol)
}

/// Sum of squared divisors.
pub fn sigma2(m: u64) -> Result<u128> {
    if m == 0 {
        return Err(Error::domain("sigma2 needs m >= 1", 0));
    }
    let mut total: u128 = 0;
    let mut d = 1u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            total += u128::from(d) * u128::from(d);
            let other = m / d;
            if other != d {
                total += u128::from(other) * u128::from(other);
            }
        }
        d += 1;
    }
    Ok(total)
}

/// Φ through its Lambert form `Σ_m σ₂(m) m^{-2} e^{-αm}`.
pub fn phi_lambert<T: Real>(alpha: T, tol: EvalTolerance<T>) -> Result<T> {
    let alpha = check_positive(alpha, "alpha must be positive and finite")?;
    // σ₂(m)/m² = Σ_{d|m} d^{-2} < ζ(2)
    let (_, gap) = decay_pair(alpha);
    let bound = TermBound { scale: zeta2::<T>() / gap, power: T::zero(), decay: alpha };
    let sum: T = sum_r_series(tol.abs(), bound, |m| {
        let mm = T::from_count(m);
        let weight = T::from_u128(sigma2(m as u64).expect("m >= 1")).unwrap() / (mm * mm);
        weight * (-alpha * mm).exp()
    })?;
    Ok(sum)
}

/// Φ, Φ′, Φ″ at one point, optionally shifted to the barred family Φ̄ = Φ + ζ(2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiJet<T> {
    pub value: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Real> PhiJet<T> {
    pub fn at(alpha: T, barred: bool, tol: EvalTolerance<T>) -> Result<Self> {
        let two = T::lit(2.0);
        let mut value = dirichlet_deriv(alpha, two, 0, tol)?;
        if barred {
            value += zeta2::<T>();
        }
        Ok(Self {
            value,
            d1: dirichlet_deriv(alpha, two, 1, tol)?,
            d2: dirichlet_deriv(alpha, two, 2, tol)?,
        })
    }

    /// `Θ = -Φ′ / √Φ`.
    pub fn theta(&self) -> T {
        -self.d1 / self.value.sqrt()
    }

    /// `Δ = 2ΦΦ″ − Φ′²`.
    pub fn delta(&self) -> T {
        T::lit(2.0) * self.value * self.d2 - self.d1 * self.d1
    }

    /// `dΘ/dα = −Δ / (2 Φ^{3/2})`.
    pub fn theta_slope(&self) -> T {
        -self.delta() / (T::lit(2.0) * self.value.powf(T::lit(1.5)))
    }
}

/// Θ(α), or Θ̄(α) when `barred`.
pub fn theta<T: Real>(alpha: T, barred: bool, tol: EvalTolerance<T>) -> Result<T> {
    Ok(PhiJet::at(alpha, barred, tol)?.theta())
}

/// Δ(α), or Δ̄(α) when `barred`.
pub fn delta<T: Real>(alpha: T, barred: bool, tol: EvalTolerance<T>) -> Result<T> {
    Ok(PhiJet::at(alpha, barred, tol)?.delta())
}

/// Exact ζ(−k).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalZetaValue {
    pub k: u32,
    pub value: BigRational,
}

/// Bernoulli numbers `B_0..=B_n` from `Σ_{j=0}^{m} C(m+1, j) B_j = 0`, so B₁ = −1/2.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n {
        // binom(m+1, j) for j = 0..m
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += bj * BigRational::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// `ζ(−k) = (−1)^k B_{k+1} / (k+1)`.
pub fn zeta_neg(k: u32) -> RationalZetaValue {
    let b = bernoulli_numbers(k as usize + 1);
    let mut value = b[k as usize + 1].clone() / BigRational::from_integer(BigInt::from(k + 1));
    if k % 2 == 1 {
        value = -value;
    }
    RationalZetaValue { k, value }
}

pub(crate) fn rational_to_real<T: Real>(q: &BigRational) -> T {
    use num_traits::ToPrimitive;
    T::lit(q.to_f64().unwrap_or(f64::NAN))
}
