//! The logarithmic partition function, its residue expansion in β, the Gibbs
//! moments, the asymptotic count estimates and the exponential rate functions.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::calibration::{calibrate_with, default_rel_tol, scaled_jet, solve_theta, CalibrationResult, ShapeParams};
use crate::count::{PartSet, Target};
use crate::error::{Error, Result};
use crate::format::sig12;
use crate::scalar::Real;
use crate::special::{check_positive, dirichlet, dirichlet_deriv, rational_to_real, zeta2, zeta_neg, EvalTolerance};
use crate::truncation::{decay_pair, eulerian_sup, geometric_moment, sum_r_series, TermBound};

/// Highest expansion order accepted by [`log_z_expansion`].
pub const MAX_EXPANSION_ORDER: usize = 8;

/// `∂_α^p ∂_β^q` of `Σ_{x ∈ ℕ²} −log(1 − e^{−⟨λ,x⟩})`, summed over r after the
/// geometric sums in x1 and x2 are done in closed form.
fn lattice_partial<T: Real>(params: ShapeParams<T>, p: u32, q: u32, tol: EvalTolerance<T>) -> Result<T> {
    let (a, b) = (params.alpha(), params.beta());
    let (_, gap_a) = decay_pair(a);
    let (_, gap_b) = decay_pair(b);
    let bound = TermBound {
        scale: T::lit(eulerian_sup(p) * eulerian_sup(q))
            / (gap_a.powi(p as i32 + 1) * gap_b.powi(q as i32 + 1)),
        power: T::from_u32(p + q).unwrap() - T::one(),
        decay: a + b,
    };
    let power = bound.power;
    let sum: T = sum_r_series(tol.abs(), bound, |r| {
        let rr = T::from_count(r);
        let (ua, ga) = decay_pair(a * rr);
        let (ub, gb) = decay_pair(b * rr);
        rr.powf(power) * geometric_moment(ua, ga, p) * geometric_moment(ub, gb, q)
    })?;
    Ok(if (p + q).is_multiple_of(2) { sum } else { -sum })
}

/// `∂_α^p ∂_β^q log Z_λ`, including the axis terms `Ψ(α) + Ψ(β)` for the nonzero part set.
pub fn log_z_partial<T: Real>(
    params: ShapeParams<T>,
    part_set: PartSet,
    p: u32,
    q: u32,
    tol: EvalTolerance<T>,
) -> Result<T> {
    let mut value = lattice_partial(params, p, q, tol)?;
    if part_set == PartSet::NonzeroVectors {
        if q == 0 {
            value += dirichlet_deriv(params.alpha(), T::one(), p, tol)?;
        }
        if p == 0 {
            value += dirichlet_deriv(params.beta(), T::one(), q, tol)?;
        }
    }
    Ok(value)
}

/// `log Z_λ`.
pub fn log_z_direct<T: Real>(params: ShapeParams<T>, part_set: PartSet, tol: EvalTolerance<T>) -> Result<T> {
    log_z_partial(params, part_set, 0, 0, tol)
}

/// `E_λ(N) = −∇ log Z_λ`.
pub fn gibbs_mean<T: Real>(params: ShapeParams<T>, part_set: PartSet, tol: EvalTolerance<T>) -> Result<[T; 2]> {
    Ok([
        -log_z_partial(params, part_set, 1, 0, tol)?,
        -log_z_partial(params, part_set, 0, 1, tol)?,
    ])
}

/// Covariance of N, the Hessian of `log Z_λ`.
pub fn gibbs_covariance<T: Real>(
    params: ShapeParams<T>,
    part_set: PartSet,
    tol: EvalTolerance<T>,
) -> Result<[[T; 2]; 2]> {
    let aa = log_z_partial(params, part_set, 2, 0, tol)?;
    let ab = log_z_partial(params, part_set, 1, 1, tol)?;
    let bb = log_z_partial(params, part_set, 0, 2, tol)?;
    Ok([[aa, ab], [ab, bb]])
}

/// Closed-form approximation of the covariance,
/// `[[Φ″/β, −Φ′/β²], [−Φ′/β², 2Φ/β³]]` (Φ̄ in the corner for the nonzero part set).
pub fn covariance_approx<T: Real>(
    params: ShapeParams<T>,
    part_set: PartSet,
    tol: EvalTolerance<T>,
) -> Result<[[T; 2]; 2]> {
    let jet = scaled_jet(params.alpha(), part_set.is_barred(), tol)?;
    let b = params.beta();
    let off = -jet.d1 / (b * b);
    Ok([[jet.d2 / b, off], [off, T::lit(2.0) * jet.value / (b * b * b)]])
}

/// Truncated residue expansion of `log Z_λ` in powers of β.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogZExpansion<T> {
    pub alpha: T,
    pub beta: T,
    pub order: usize,
    /// `D_α(2)/β`.
    pub leading: T,
    /// `(−1)^k ζ(−k) D_α(1−k) β^k / k!` for k = 0..=order.
    pub terms: Vec<T>,
    /// `Ψ(α) + Ψ(β)` for the nonzero part set, evaluated directly; zero otherwise.
    pub axis: T,
    pub value: T,
}

pub fn log_z_expansion<T: Real>(
    params: ShapeParams<T>,
    part_set: PartSet,
    order: usize,
    tol: EvalTolerance<T>,
) -> Result<LogZExpansion<T>> {
    if order > MAX_EXPANSION_ORDER {
        return Err(Error::domain("expansion order must be <= 8", order as f64));
    }
    let (a, b) = (params.alpha(), params.beta());
    let leading = dirichlet(a, T::lit(2.0), tol)? / b;
    let mut terms = Vec::with_capacity(order + 1);
    let mut factorial = T::one();
    for k in 0..=order {
        if k > 0 {
            factorial = factorial * T::from_count(k);
        }
        let zeta: T = rational_to_real(&zeta_neg(k as u32).value);
        let term = if zeta == T::zero() {
            T::zero()
        } else {
            let sign = if k % 2 == 0 { T::one() } else { -T::one() };
            let d = dirichlet(a, T::one() - T::from_count(k), tol)?;
            sign * zeta * d * b.powi(k as i32) / factorial
        };
        terms.push(term);
    }
    let axis = match part_set {
        PartSet::StrictPositive => T::zero(),
        PartSet::NonzeroVectors => dirichlet(a, T::one(), tol)? + dirichlet(b, T::one(), tol)?,
    };
    let value = terms.iter().fold(leading, |acc, &t| acc + t) + axis;
    Ok(LogZExpansion { alpha: a, beta: b, order, leading, terms, axis, value })
}

/// Small-β form of `log Z̄` for the nonzero part set through the β¹ term:
/// `Φ̄(α)/β + ½ log β + Ψ(α)/2 − ½ log 2π + (D_α(0)/12 − 1/24) β`.
/// Diagnostic only.
pub fn log_z_informal_barred<T: Real>(params: ShapeParams<T>, tol: EvalTolerance<T>) -> Result<T> {
    let (a, b) = (params.alpha(), params.beta());
    let half = T::lit(0.5);
    let phi_bar = dirichlet(a, T::lit(2.0), tol)? + zeta2::<T>();
    Ok(phi_bar / b + half * b.ln() + half * dirichlet(a, T::one(), tol)?
        - half * (T::lit(2.0) * T::PI()).ln()
        + (dirichlet(a, T::zero(), tol)? / T::lit(12.0) - T::one() / T::lit(24.0)) * b)
}

/// Logarithm of the predicted count from the main asymptotic formula.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticEstimate<T> {
    pub log_value: T,
    pub exponent: T,
    pub log_prefactor: T,
    pub part_set: PartSet,
    pub calibration: CalibrationResult<T>,
}

/// Calibrates and evaluates the asymptotic formula for `p_X(n1, n2)` in log space.
///
/// Strict parts: `Φ/(2π n2) · e^{−Ψ/2} / √Δ · exp{(αΘ + 2√Φ)√n2}`.
/// Nonzero parts: `(2π)^{−3/2} (Φ̄/n2)^{5/4} · e^{+Ψ/2} / √Δ̄ · exp{(αΘ̄ + 2√Φ̄)√n2}`.
pub fn theorem_estimate<T: Real>(target: Target, part_set: PartSet) -> Result<AsymptoticEstimate<T>> {
    theorem_estimate_with(target, part_set, EvalTolerance::default())
}

pub fn theorem_estimate_with<T: Real>(
    target: Target,
    part_set: PartSet,
    tol: EvalTolerance<T>,
) -> Result<AsymptoticEstimate<T>> {
    let calibration = calibrate_with(target, part_set, default_rel_tol(), tol)?;
    let alpha = calibration.params.alpha();
    let barred = part_set.is_barred();
    let jet = scaled_jet(alpha, barred, tol)?;
    let psi = dirichlet(alpha, T::one(), tol)?;
    let n2 = T::from_count(target.n2);
    let half = T::lit(0.5);
    let two_pi_ln = (T::lit(2.0) * T::PI()).ln();

    let exponent = (alpha * jet.theta() + T::lit(2.0) * jet.value.sqrt()) * n2.sqrt();
    let log_prefactor = if barred {
        -T::lit(1.5) * two_pi_ln + T::lit(1.25) * (jet.value / n2).ln() + half * psi - half * jet.delta().ln()
    } else {
        -two_pi_ln + (jet.value / n2).ln() - half * psi - half * jet.delta().ln()
    };
    Ok(AsymptoticEstimate {
        log_value: exponent + log_prefactor,
        exponent,
        log_prefactor,
        part_set,
        calibration,
    })
}

/// Exponential rate `h(t)` (strict parts) or `h̄(t)` (nonzero parts):
/// `α t + 2√Φ(α)` with `Θ(α) = t`.
pub fn rate_function<T: Real>(t: T, part_set: PartSet) -> Result<T> {
    let t = check_positive(t, "rate function needs t > 0")?;
    let tol = EvalTolerance::default();
    let barred = part_set.is_barred();
    let alpha = solve_theta(t, barred, default_rel_tol(), tol)?;
    let jet = scaled_jet(alpha, barred, tol)?;
    Ok(alpha * t + T::lit(2.0) * jet.value.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateRow<T> {
    pub t: T,
    pub h: T,
    pub hbar: T,
}

/// Tabulates `h` and `h̄` over `grid`; rows come back in grid order.
pub fn rate_table<T: Real>(grid: &[T]) -> Result<Vec<RateRow<T>>> {
    grid.par_iter()
        .map(|&t| {
            Ok(RateRow {
                t,
                h: rate_function(t, PartSet::StrictPositive)?,
                hbar: rate_function(t, PartSet::NonzeroVectors)?,
            })
        })
        .collect()
}

pub fn write_rate_csv<T: Real, W: Write>(rows: &[RateRow<T>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "h", "hbar"])?;
    for row in rows {
        w.write_record([sig12(row.t), sig12(row.h), sig12(row.hbar)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> EvalTolerance<f64> {
        EvalTolerance::default()
    }

    fn params(a: f64, b: f64) -> ShapeParams<f64> {
        ShapeParams::new(a, b).unwrap()
    }

    /// `Σ_{x1,x2 ≥ 1} −log(1 − e^{−αx1−βx2})`, summed over the lattice.
    fn lattice_oracle(a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        for x1 in 1..200 {
            for x2 in 1..2000 {
                let e = a * x1 as f64 + b * x2 as f64;
                if e > 60.0 {
                    break;
                }
                total += -(-(-e).exp()).ln_1p();
            }
        }
        total
    }

    #[test]
    fn log_z_values() {
        let v = log_z_direct(params(1.0, 0.1), PartSet::StrictPositive, tol()).unwrap();
        assert!((v - 5.9492715108869).abs() < 1e-10, "{v}");
        assert!((v - lattice_oracle(1.0, 0.1)).abs() < 1e-9);
        let tiny = log_z_direct(params(30.0, 30.0), PartSet::StrictPositive, tol()).unwrap();
        assert!((tiny / (-60.0_f64).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn axis_terms_for_nonzero_parts() {
        let p = params(1.0, 0.1);
        let strict = log_z_direct(p, PartSet::StrictPositive, tol()).unwrap();
        let nonzero = log_z_direct(p, PartSet::NonzeroVectors, tol()).unwrap();
        let psi_sum = dirichlet(1.0, 1.0, tol()).unwrap() + dirichlet(0.1, 1.0, tol()).unwrap();
        assert!((nonzero - strict - psi_sum).abs() < 1e-12);
    }

    #[test]
    fn expansion_zeroth_term() {
        let exp = log_z_expansion(params(2.0, 0.05), PartSet::StrictPositive, 0, tol()).unwrap();
        let d1 = dirichlet(2.0, 1.0, tol()).unwrap();
        assert!((exp.terms[0] + d1 / 2.0).abs() < 1e-15);
        let direct = log_z_direct(params(2.0, 0.05), PartSet::StrictPositive, tol()).unwrap();
        let c = (exp.value - direct).abs() / ((-2.0_f64).exp() * 0.05_f64.sqrt());
        assert!(c <= 10.0, "{c}");
    }

    #[test]
    fn expansion_slope_at_order_one() {
        // m = 1 as spelled out: the next nonzero term is β³, so halving β
        // shrinks the defect by ≈ 8, not by the 2^{1.5} of the generic bound.
        let defect = |b: f64| {
            let p = params(2.0, b);
            let e = log_z_expansion(p, PartSet::StrictPositive, 1, tol()).unwrap().value;
            (e - log_z_direct(p, PartSet::StrictPositive, tol()).unwrap()).abs()
        };
        let ratio = defect(0.04) / defect(0.02);
        assert!((7.0..9.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn expansion_order_cap() {
        assert!(log_z_expansion(params(1.0, 0.1), PartSet::StrictPositive, 9, tol()).is_err());
    }

    #[test]
    fn informal_barred_expansion_is_close() {
        let p = params(2.0, 0.01);
        let direct = log_z_direct(p, PartSet::NonzeroVectors, tol()).unwrap();
        let informal = log_z_informal_barred(p, tol()).unwrap();
        assert!((direct - informal).abs() < 1e-4, "{}", direct - informal);
    }

    #[test]
    fn mean_symmetry_for_strict_parts() {
        let m1 = gibbs_mean(params(0.7, 0.3), PartSet::StrictPositive, tol()).unwrap();
        let m2 = gibbs_mean(params(0.3, 0.7), PartSet::StrictPositive, tol()).unwrap();
        assert!((m1[0] - m2[1]).abs() < 1e-10 * m1[0]);
        assert!((m1[1] - m2[0]).abs() < 1e-10 * m1[1]);
    }

    #[test]
    fn mean_matches_target_after_calibration() {
        let cal = crate::calibration::calibrate::<f64>(Target::new(10, 10000), PartSet::StrictPositive, 1e-12).unwrap();
        let m = gibbs_mean(cal.params, PartSet::StrictPositive, tol()).unwrap();
        assert!((m[0] / 10.0 - 1.0).abs() < 0.02, "{m:?}");
        assert!((m[1] / 10000.0 - 1.0).abs() < 0.02, "{m:?}");
    }

    #[test]
    fn rate_endpoints() {
        let h = rate_function(1e-3, PartSet::StrictPositive).unwrap();
        assert!(h < 0.02, "{h}");
        let hbar = rate_function(1e-3_f64, PartSet::NonzeroVectors).unwrap();
        // mpmath reference; the t·log(1/t) term keeps it above π√(2/3)
        assert!((hbar - 2.5727599710365).abs() < 1e-9, "{hbar}");
        let hbar1 = rate_function(1.0_f64, PartSet::NonzeroVectors).unwrap();
        assert!((hbar1 - 3.986023084507661).abs() < 1e-9, "{hbar1}");
        assert!(rate_function(0.0_f64, PartSet::StrictPositive).is_err());
    }

    #[test]
    fn rate_csv_layout() {
        let rows = rate_table(&[0.5_f64, 1.0]).unwrap();
        let mut buf = Vec::new();
        write_rate_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,h,hbar");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("5.00000000000e-1,"));
    }
}
