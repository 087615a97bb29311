use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::{Coeff, LaurentA, LogTagged, Series};
use crate::error::{Error, Result};
use crate::special::sigma2;

pub const MAX_UNBARRED_ORDER: usize = 8;
pub const MAX_BARRED_ORDER: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Unbarred,
    Barred,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CoeffList {
    Rational(Vec<BigRational>),
    Laurent(Vec<LaurentA>),
}

impl CoeffList {
    pub fn len(&self) -> usize {
        match self {
            Self::Rational(v) => v.len(),
            Self::Laurent(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Exponent coefficients `c_1..c_{K-1}` (or their barred analogues).
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffReport {
    pub variant: Variant,
    pub order: usize,
    pub coefficients: CoeffList,
}

impl CoeffReport {
    /// Coefficients as floats, with `a = √ζ(2)` substituted in the barred case.
    pub fn to_f64(&self) -> Vec<f64> {
        match &self.coefficients {
            CoeffList::Rational(v) => v.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect(),
            CoeffList::Laurent(v) => {
                let a = PI / 6f64.sqrt();
                v.iter().map(|c| c.eval(a)).collect()
            }
        }
    }
}

impl fmt::Display for CoeffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.coefficients {
            CoeffList::Rational(v) => {
                for (k, c) in v.iter().enumerate() {
                    writeln!(f, "c_{} = {}", k + 1, c)?;
                }
            }
            CoeffList::Laurent(v) => {
                for (k, c) in v.iter().enumerate() {
                    writeln!(f, "cbar_{} = {}", k + 1, c)?;
                }
            }
        }
        Ok(())
    }
}

fn check_order(k: usize, max: usize) -> Result<()> {
    if k == 0 || k > max {
        return Err(Error::Config(format!("expansion order must be in 1..={max}, got {k}")));
    }
    Ok(())
}

/// `f(z) = Σ σ₂(m)/m² z^m` through `z^K`.
pub fn build_f(k: usize) -> Result<Series<BigRational>> {
    if k == 0 {
        return Err(Error::Config("series order must be at least 1".into()));
    }
    let mut coeffs = vec![BigRational::zero()];
    for m in 1..=k as u64 {
        let s = BigInt::from(sigma2(m)?);
        coeffs.push(BigRational::new(s, BigInt::from(m * m)));
    }
    Ok(Series::new(coeffs, k))
}

/// Coefficients of the exponent correction in the small-`n1` expansion of
/// `p(n1, n2)` over ℕ², in the variable `w = n1²/n2`.
pub fn corollary2_coeffs(k: usize) -> Result<CoeffReport> {
    check_order(k, MAX_UNBARRED_ORDER)?;
    let n = k + 2;
    let f = build_f(n)?;
    let zf = f.euler_derivative();
    let g = zf.mul(&zf).shift_down(1)?.div(&f.shift_down(1)?)?;
    let z = g.reverse(g.order())?;
    debug_assert_eq!(g.compose(&z)?, Series::variable(z.order()));

    let w = 1;
    let neg_log_z = LogTagged::log_of(&z)?.neg();
    let root = f.compose(&z)?.shift_down(w)?.sqrt_of_unit()?.scale(&BigRational::from_integer(2.into()));
    let log_w = LogTagged {
        series: Series::zero(root.order()),
        log_w: BigRational::one(),
        log_a: BigRational::zero(),
    };
    let e = neg_log_z.add(&LogTagged::plain(root)).add(&log_w).into_series()?;
    let e = e.sub(&Series::constant(BigRational::from_integer(2.into()), e.order()));
    if !e.coeff(0).is_zero() {
        return Err(Error::Algebra(format!("constant term {} survived", e.coeff(0))));
    }
    Ok(CoeffReport {
        variant: Variant::Unbarred,
        order: k,
        coefficients: CoeffList::Rational((1..k).map(|i| e.coeff(i)).collect()),
    })
}

/// Barred analogue over ℤ₊²∖{0} in the variable `w = n1/√n2`, with
/// coefficients in ℚ[a, 1/a] for `a = √ζ(2)`.
pub fn corollary3_coeffs(k: usize) -> Result<CoeffReport> {
    check_order(k, MAX_BARRED_ORDER)?;
    let n = k + 2;
    let f = build_f(n)?.map(|c| LaurentA::from_rational(c.clone()));
    let a = LaurentA::a();
    let a_inv = a.try_inv().expect("a is a unit");
    let a_inv2 = a_inv.clone() * a_inv.clone();

    // ḡ = (zf′)²/(a² + f); solve √ḡ(z) = w with the branch z ~ a w
    let unit = Series::constant(LaurentA::one(), n).add(&f.scale_by(&a_inv2));
    let root_unit = unit.sqrt_of_unit()?;
    let big_g = f.euler_derivative().div(&root_unit)?.scale_by(&a_inv);
    let z = big_g.reverse(big_g.order())?;

    let neg_log_z = LogTagged::log_of(&z)?.neg();
    let s = Series::constant(LaurentA::one(), n)
        .add(&f.compose(&z)?.scale_by(&a_inv2))
        .sqrt_of_unit()?;
    let two_a = a.scale(&BigRational::from_integer(2.into()));
    let tail = s.sub(&Series::constant(LaurentA::one(), s.order())).shift_down(1)?.scale_by(&two_a);
    let logs = LogTagged {
        series: Series::zero(tail.order()),
        log_w: BigRational::one(),
        log_a: BigRational::one(),
    };
    let e = neg_log_z.add(&LogTagged::plain(tail)).add(&logs).into_series()?;
    let e = e.sub(&Series::constant(LaurentA::one(), e.order()));
    if !e.coeff(0).is_zero() {
        return Err(Error::Algebra(format!("constant term {} survived", e.coeff(0))));
    }
    Ok(CoeffReport {
        variant: Variant::Barred,
        order: k,
        coefficients: CoeffList::Laurent((1..k).map(|i| e.coeff(i)).collect()),
    })
}

fn require_variant(report: &CoeffReport, variant: Variant) -> Result<()> {
    if report.variant != variant {
        return Err(Error::Config(format!("expected {variant:?} coefficients, got {:?}", report.variant)));
    }
    Ok(())
}

/// `log` of the small-`n1` formula for `p(n1, n2)` over ℕ², using every
/// coefficient in `report`.
pub fn corollary2_log_estimate(n1: u64, n2: u64, report: &CoeffReport) -> Result<f64> {
    require_variant(report, Variant::Unbarred)?;
    let (x, y) = (n1 as f64, n2 as f64);
    let w = x * x / y;
    let correction: f64 = report.to_f64().iter().enumerate().map(|(i, c)| c * x * w.powi(i as i32 + 1)).sum();
    Ok(x.ln() - y.ln() + x * y.ln() - 2.0 * ln_gamma(x + 1.0) + correction)
}

/// `log` of the small-`n1` formula for `p(n1, n2)` over ℤ₊²∖{0}.
pub fn corollary3_log_estimate(n1: u64, n2: u64, report: &CoeffReport) -> Result<f64> {
    require_variant(report, Variant::Barred)?;
    let (x, y) = (n1 as f64, n2 as f64);
    let w = x / y.sqrt();
    let correction: f64 = report.to_f64().iter().enumerate().map(|(i, c)| c * x * w.powi(i as i32 + 1)).sum();
    Ok(-ln_gamma(x + 1.0) + x * ((6.0 * y).sqrt() / PI).ln() - (4.0 * y * 3f64.sqrt()).ln()
        + PI * (2.0 * y / 3.0).sqrt()
        + correction)
}
