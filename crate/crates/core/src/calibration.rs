//! Calibration of the shape parameters: given `(n1, n2)`, find `(α, β)` with
//! `−Φ′(α)/β = n1` and `Φ(α)/β² = n2` (Φ̄ for the nonzero part set).
//!
//! Eliminating β leaves `Θ(α) = n1/√n2`. Θ decreases strictly from +∞ to 0,
//! so the root is bracketed by geometric expansion from α = 1, narrowed by
//! bisection and finished with safeguarded Newton steps on `log Θ`.

use serde::Serialize;

use crate::count::{PartSet, Target};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::{check_positive, EvalTolerance, PhiJet};

pub const MAX_ITERATIONS: usize = 200;

/// Bracket width at which bisection hands over to Newton.
const NEWTON_WIDTH: f64 = 1e-2;

/// Gibbs shape parameters `λ = (α, β)`, both positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShapeParams<T> {
    alpha: T,
    beta: T,
}

impl<T: Real> ShapeParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        check_positive(alpha, "alpha must be positive and finite")?;
        check_positive(beta, "beta must be positive and finite")?;
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// The same parameters with the coordinates exchanged.
    pub fn swapped(&self) -> Self {
        Self { alpha: self.beta, beta: self.alpha }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalibrationResult<T> {
    pub params: ShapeParams<T>,
    pub target: Target,
    pub part_set: PartSet,
    /// Relative defects `(−Φ′/β − n1)/n1` and `(Φ/β² − n2)/n2`.
    pub residuals: (T, T),
}

/// Φ, Φ′, Φ″ to a tolerance relative to `e^{−α}`, the size of all three at large α.
pub(crate) fn scaled_jet<T: Real>(alpha: T, barred: bool, tol: EvalTolerance<T>) -> Result<PhiJet<T>> {
    let scale = (-alpha).exp().min(T::one());
    let tol = if scale < T::one() {
        EvalTolerance::new(tol.abs() * scale.max(T::min_positive_value()))?
    } else {
        tol
    };
    PhiJet::at(alpha, barred, tol)
}

/// Solves `Θ(α) = ratio` (Θ̄ when `barred`) to relative accuracy `rel_tol`.
pub fn solve_theta<T: Real>(ratio: T, barred: bool, rel_tol: T, tol: EvalTolerance<T>) -> Result<T> {
    check_positive(ratio, "target ratio n1/sqrt(n2) must be positive")?;
    let target_log = ratio.ln();
    // g(α) = log Θ(α) − log ratio, decreasing in α
    let eval = |alpha: T| -> Result<(T, T)> {
        let jet = scaled_jet(alpha, barred, tol)?;
        let th = jet.theta();
        Ok((th.ln() - target_log, jet.theta_slope() / th))
    };

    let two = T::lit(2.0);
    let mut iterations = 0usize;
    let (mut lo, mut hi);
    let (g1, _) = eval(T::one())?;
    if g1 > T::zero() {
        lo = T::one();
        hi = two;
        while eval(hi)?.0 > T::zero() {
            lo = hi;
            hi = hi * two;
            iterations += 1;
            if iterations >= MAX_ITERATIONS || !hi.is_finite() {
                return Err(no_convergence(lo, hi, iterations));
            }
        }
    } else {
        hi = T::one();
        lo = T::lit(0.5);
        while eval(lo)?.0 < T::zero() {
            hi = lo;
            lo = lo / two;
            iterations += 1;
            if iterations >= MAX_ITERATIONS || lo <= T::min_positive_value() {
                return Err(no_convergence(lo, hi, iterations));
            }
        }
    }

    while hi - lo > T::lit(NEWTON_WIDTH) {
        let mid = (lo + hi) / two;
        if eval(mid)?.0 > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations >= MAX_ITERATIONS {
            return Err(no_convergence(lo, hi, iterations));
        }
    }

    // |Θ/ratio − 1| ≤ rel_tol  ⇐  |g| ≤ log(1 + rel_tol)
    let accept = (T::one() + rel_tol).ln();
    let mut alpha = (lo + hi) / two;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (g, slope) = eval(alpha)?;
        if g.abs() <= accept {
            return Ok(alpha);
        }
        if g > T::zero() {
            lo = alpha;
        } else {
            hi = alpha;
        }
        let step = alpha - g / slope;
        alpha = if step > lo && step < hi && step.is_finite() { step } else { (lo + hi) / two };
        if hi - lo <= T::epsilon() * hi {
            let (g, _) = eval(alpha)?;
            if g.abs() <= accept {
                return Ok(alpha);
            }
            return Err(no_convergence(lo, hi, iterations));
        }
    }
    Err(no_convergence(lo, hi, iterations))
}

fn no_convergence<T: Real>(lo: T, hi: T, iterations: usize) -> Error {
    Error::NoConvergence { lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy(), iterations }
}

/// Default relative tolerance used by the higher-level evaluators.
pub fn default_rel_tol<T: Real>() -> T {
    (T::epsilon() * T::lit(1e4)).max(T::lit(1e-12))
}

/// Calibrates `(α, β)` for `target`; β is taken from `Φ(α)/β² = n2`.
pub fn calibrate<T: Real>(target: Target, part_set: PartSet, rel_tol: T) -> Result<CalibrationResult<T>> {
    calibrate_with(target, part_set, rel_tol, EvalTolerance::default())
}

pub fn calibrate_with<T: Real>(
    target: Target,
    part_set: PartSet,
    rel_tol: T,
    tol: EvalTolerance<T>,
) -> Result<CalibrationResult<T>> {
    if target.n1 == 0 || target.n2 == 0 {
        return Err(Error::domain(
            "calibration needs n1 >= 1 and n2 >= 1",
            target.n1.min(target.n2) as f64,
        ));
    }
    let n1 = T::from_count(target.n1);
    let n2 = T::from_count(target.n2);
    let barred = part_set.is_barred();
    let alpha = solve_theta(n1 / n2.sqrt(), barred, rel_tol, tol)?;
    let jet = scaled_jet(alpha, barred, tol)?;
    let beta = (jet.value / n2).sqrt();
    let residuals = (-jet.d1 / beta / n1 - T::one(), jet.value / (beta * beta) / n2 - T::one());
    Ok(CalibrationResult { params: ShapeParams::new(alpha, beta)?, target, part_set, residuals })
}

/// Order-of-magnitude diagnostics of calibrated parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderReport<T> {
    /// `e^{−α}/(β n1)`, `e^{−α}/(β² n2)`, `β n2 / n1`.
    pub ratios: [T; 3],
    /// Per ratio: true when it falls outside `[1/50, 50]`.
    pub flagged: [bool; 3],
}

impl<T: Real> OrderReport<T> {
    pub fn any_flagged(&self) -> bool {
        self.flagged.iter().any(|&f| f)
    }
}

pub fn order_checks<T: Real>(result: &CalibrationResult<T>) -> OrderReport<T> {
    let a = result.params.alpha();
    let b = result.params.beta();
    let n1 = T::from_count(result.target.n1);
    let n2 = T::from_count(result.target.n2);
    let e = (-a).exp();
    let ratios = [e / (b * n1), e / (b * b * n2), b * n2 / n1];
    let (low, high) = (T::lit(1.0 / 50.0), T::lit(50.0));
    let flagged = ratios.map(|r| !(r >= low && r <= high));
    OrderReport { ratios, flagged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::phi_derivative;

    fn tol() -> EvalTolerance<f64> {
        EvalTolerance::default()
    }

    /// Plain bisection on Θ, no derivative information.
    fn bisection_oracle(ratio: f64, barred: bool) -> f64 {
        let (mut lo, mut hi) = (1e-3, 60.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if crate::special::theta(mid, barred, tol()).unwrap() > ratio {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn calibrates_subcritical_target() {
        let res = calibrate::<f64>(Target::new(10, 10000), PartSet::StrictPositive, 1e-12).unwrap();
        let a = res.params.alpha();
        assert!((a - 4.598).abs() < 0.05, "alpha = {a}");
        assert!((a - bisection_oracle(0.1, false)).abs() < 1e-9);
        assert!(((-a).exp() / 0.01 - 1.0).abs() < 0.2);
        let b = res.params.beta();
        let phi_a = crate::special::phi(a, tol()).unwrap();
        assert!((-phi_derivative(a, 1, tol()).unwrap() / b - 10.0).abs() < 1e-8);
        assert!((phi_a / (b * b) - 10000.0).abs() < 1e-6);
        assert!(res.residuals.0.abs() < 1e-10 && res.residuals.1.abs() < 1e-10);
    }

    #[test]
    fn depends_only_on_ratio() {
        let a = calibrate::<f64>(Target::new(30, 900), PartSet::StrictPositive, 1e-12).unwrap();
        let b = calibrate::<f64>(Target::new(100, 10000), PartSet::StrictPositive, 1e-12).unwrap();
        assert!((a.params.alpha() - b.params.alpha()).abs() < 1e-10);
    }

    #[test]
    fn barred_calibration_matches_oracle() {
        let res = calibrate::<f64>(Target::new(30, 900), PartSet::NonzeroVectors, 1e-12).unwrap();
        assert!((res.params.alpha() - bisection_oracle(1.0, true)).abs() < 1e-9);
        assert!((res.params.alpha() - 0.8260637084168721).abs() < 1e-9);
    }

    #[test]
    fn extreme_ratios_bracket() {
        for ratio in [1e-6, 1e-3, 1.0, 50.0] {
            let a = solve_theta(ratio, false, 1e-12, tol()).unwrap();
            let th = scaled_jet(a, false, tol()).unwrap().theta();
            assert!((th / ratio - 1.0).abs() < 1e-9, "ratio {ratio}: theta {th}");
        }
    }

    #[test]
    fn order_report() {
        let res = calibrate::<f64>(Target::new(10, 10000), PartSet::StrictPositive, 1e-12).unwrap();
        let report = order_checks(&res);
        assert!(!report.any_flagged());
        for r in report.ratios {
            assert!((0.1..=10.0).contains(&r), "{r}");
        }
    }

    #[test]
    fn rejects_empty_targets() {
        assert!(calibrate::<f64>(Target::new(0, 5), PartSet::StrictPositive, 1e-12).is_err());
        assert!(calibrate::<f64>(Target::new(5, 0), PartSet::NonzeroVectors, 1e-12).is_err());
    }
}
