use num_complex::Complex64;

use crate::calibration::ShapeParams;
use crate::count::PartSet;
use crate::error::{Error, Result};
use crate::special::EvalTolerance;
use crate::truncation::{sum_r_series, TermBound};

/// `e^{−s}/(1 − e^{−s})` for `Re s > 0`, accurate for small `|s|` and free of overflow.
fn bose(s: Complex64) -> Complex64 {
    let (a, b) = (s.re, s.im);
    let decay = (-a).exp();
    let half = (b / 2.0).sin();
    let den = Complex64::new(-(-a).exp_m1() * b.cos() + 2.0 * half * half, decay * b.sin());
    Complex64::from_polar(decay, -b) / den
}

fn bose_real(x: f64) -> f64 {
    (-x).exp() / -(-x).exp_m1()
}

/// `φ_λ(t) = E_λ e^{i⟨t,N⟩}` within `tol`.
pub fn char_fn(params: ShapeParams<f64>, part_set: PartSet, t: [f64; 2], tol: EvalTolerance<f64>) -> Result<Complex64> {
    if let Some(&bad) = t.iter().find(|x| !x.is_finite()) {
        return Err(Error::domain("t must be finite", bad));
    }
    Ok(log_char_fn(params, part_set, t, tol)?.exp())
}

/// `log φ_λ(t) = Σ_r r⁻¹ [Π G(r(λ_j − i t_j)) − Π G(r λ_j)]`, plus one-dimensional
/// axis terms for the nonzero part set.
pub fn log_char_fn(
    params: ShapeParams<f64>,
    part_set: PartSet,
    t: [f64; 2],
    tol: EvalTolerance<f64>,
) -> Result<Complex64> {
    let (a, b) = (params.alpha(), params.beta());
    let gap_a = -(-a).exp_m1();
    let gap_b = -(-b).exp_m1();
    let za = Complex64::new(a, -t[0]);
    let zb = Complex64::new(b, -t[1]);
    let axes = part_set == PartSet::NonzeroVectors;
    // |G(r z)| ≤ e^{−r Re z} / (1 − e^{−Re z})
    let lattice_scale = 2.0 / (gap_a * gap_b);
    let axis_scale = if axes { 2.0 / gap_a + 2.0 / gap_b } else { 0.0 };
    let bound = TermBound { scale: lattice_scale + axis_scale, power: -1.0, decay: a.min(b) };
    sum_r_series(tol.abs(), bound, |r| {
        let rr = r as f64;
        let (ca, cb) = (bose(za * rr), bose(zb * rr));
        let (ra, rb) = (bose_real(a * rr), bose_real(b * rr));
        let mut term = ca * cb - ra * rb;
        if axes {
            term += ca - ra + cb - rb;
        }
        term / rr
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bose_matches_naive() {
        for &s in &[Complex64::new(0.3, 1.2), Complex64::new(2.0, -0.5), Complex64::new(1e-3, 1e-3), Complex64::new(40.0, 2.0)] {
            let naive = (s.exp() - 1.0).inv();
            assert!(bose(s * 30.0).is_finite());
            assert!((bose(s) - naive).norm() < 1e-9 * naive.norm());
        }
    }

    #[test]
    fn product_oracle() {
        let params = ShapeParams::new(0.8, 0.6).unwrap();
        let t = [0.7, -1.3];
        for part_set in PartSet::ALL {
            let mut prod = Complex64::new(0.0, 0.0);
            for x1 in 0..120 {
                for x2 in 0..120 {
                    if part_set.contains(x1, x2) {
                        let q = (-0.8 * x1 as f64 - 0.6 * x2 as f64).exp();
                        let phase = Complex64::from_polar(1.0, t[0] * x1 as f64 + t[1] * x2 as f64);
                        prod += ((1.0 - q) / (1.0 - q * phase)).ln();
                    }
                }
            }
            let ours = log_char_fn(params, part_set, t, EvalTolerance::default()).unwrap();
            assert!((ours - prod).norm() < 1e-10, "{part_set}: {ours} vs {prod}");
        }
    }
}
