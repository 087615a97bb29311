use nalgebra::{Matrix2, Vector2};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use super::charfn::char_fn;
use crate::asymptotics::{gibbs_covariance, gibbs_mean, log_z_direct};
use crate::calibration::{calibrate, default_rel_tol, ShapeParams};
use crate::count::{ln_biguint, CountTable, PartSet, Target, DEFAULT_CELL_BUDGET};
use crate::error::{Error, Result};
use crate::special::EvalTolerance;

/// Directions on the half circle used for the Lyapunov supremum.
pub const LYAPUNOV_DIRECTIONS: usize = 360;

/// `Γ_λ` with its eigen-decomposition.
#[derive(Clone, Copy, Debug)]
pub struct Whitening {
    pub gamma: Matrix2<f64>,
    pub eigenvalues: [f64; 2],
    inv_sqrt: Matrix2<f64>,
    sqrt: Matrix2<f64>,
}

impl Whitening {
    pub fn new(gamma: [[f64; 2]; 2]) -> Result<Self> {
        let g = Matrix2::new(gamma[0][0], gamma[0][1], gamma[1][0], gamma[1][1]);
        let eig = g.symmetric_eigen();
        let (l0, l1) = (eig.eigenvalues[0], eig.eigenvalues[1]);
        if !(l0 > 0.0 && l1 > 0.0) {
            return Err(Error::domain("covariance is not positive definite", l0.min(l1)));
        }
        let v = eig.eigenvectors;
        let inv_sqrt = v * Matrix2::new(l0.powf(-0.5), 0.0, 0.0, l1.powf(-0.5)) * v.transpose();
        let sqrt = v * Matrix2::new(l0.sqrt(), 0.0, 0.0, l1.sqrt()) * v.transpose();
        Ok(Self { gamma: g, eigenvalues: [l0.min(l1), l0.max(l1)], inv_sqrt, sqrt })
    }

    pub fn det(&self) -> f64 {
        self.eigenvalues[0] * self.eigenvalues[1]
    }

    /// `‖Γ^{1/2} t‖`
    pub fn norm(&self, t: [f64; 2]) -> f64 {
        (self.sqrt * Vector2::new(t[0], t[1])).norm()
    }

    /// `‖Γ^{−1/2} d‖²`
    pub fn mahalanobis_sq(&self, d: [f64; 2]) -> f64 {
        (self.inv_sqrt * Vector2::new(d[0], d[1])).norm_squared()
    }

    fn unwhiten(&self, u: [f64; 2]) -> [f64; 2] {
        let t = self.inv_sqrt * Vector2::new(u[0], u[1]);
        [t[0], t[1]]
    }
}

/// Level `C` with `C⁴e^{−C}/24 ≤ rel_tol`: the share of the cubic moment sum
/// carried by parts with `⟨λ,x⟩ > C`, in the continuum approximation.
fn cubic_cutoff(rel_tol: f64) -> f64 {
    let mut c: f64 = 10.0;
    while c.powi(4) * (-c).exp() / 24.0 > rel_tol {
        c += 1.0;
    }
    c
}

/// Upper bound on the Lyapunov ratio
/// `sup_t Σ_x E|ω̄(x)|³ |⟨t,x⟩|³ / ‖Γ^{1/2} t‖³`, with the third absolute
/// moments replaced by `3q/(1−q)³`, `q = e^{−⟨λ,x⟩}`.
pub fn lyapunov_bound(params: ShapeParams<f64>, part_set: PartSet, tol: EvalTolerance<f64>) -> Result<f64> {
    let w = Whitening::new(gibbs_covariance(params, part_set, tol)?)?;
    Ok(lyapunov_with(params, part_set, &w, LYAPUNOV_DIRECTIONS, tol.abs()))
}

/// As [`lyapunov_bound`] with an explicit whitening and direction count;
/// `rel_tol` controls the truncation of the part sum.
pub fn lyapunov_with(
    params: ShapeParams<f64>,
    part_set: PartSet,
    whitening: &Whitening,
    directions: usize,
    rel_tol: f64,
) -> f64 {
    let (a, b) = (params.alpha(), params.beta());
    let cutoff = cubic_cutoff(rel_tol);
    let ts: Vec<[f64; 2]> = (0..directions)
        .map(|k| {
            let th = std::f64::consts::PI * k as f64 / directions as f64;
            whitening.unwhiten([th.cos(), th.sin()])
        })
        .collect();
    let x1_start = if part_set == PartSet::NonzeroVectors { 0 } else { 1 };
    let rows = (cutoff / a).floor() as usize;
    let totals = (x1_start..=rows)
        .into_par_iter()
        .map(|x1| {
            let x2_min = if part_set == PartSet::NonzeroVectors && x1 > 0 { 0 } else { 1 };
            let last = ((cutoff - a * x1 as f64) / b).floor();
            let mut out = vec![0.0; ts.len()];
            if last < x2_min as f64 {
                return out;
            }
            let last = last as usize;
            // prefix sums of w·x2^j, j = 0..3
            let mut prefix = Vec::with_capacity(last - x2_min + 2);
            let mut acc = [0.0f64; 4];
            prefix.push(acc);
            for x2 in x2_min..=last {
                let s = a * x1 as f64 + b * x2 as f64;
                let q = (-s).exp();
                let gap = -(-s).exp_m1();
                let wt = 3.0 * q / (gap * gap * gap);
                let y = x2 as f64;
                acc[0] += wt;
                acc[1] += wt * y;
                acc[2] += wt * y * y;
                acc[3] += wt * y * y * y;
                prefix.push(acc);
            }
            let len = prefix.len() - 1;
            let seg = |lo: usize, hi: usize, c: f64, d: f64| {
                let m: Vec<f64> = (0..4).map(|j| prefix[hi][j] - prefix[lo][j]).collect();
                (c * c * c * m[0] + 3.0 * c * c * d * m[1] + 3.0 * c * d * d * m[2] + d * d * d * m[3]).abs()
            };
            for (slot, t) in out.iter_mut().zip(&ts) {
                let (c, d) = (t[0] * x1 as f64, t[1]);
                let split = if d == 0.0 {
                    len
                } else {
                    let root = (-c / d).floor();
                    (root - x2_min as f64 + 1.0).clamp(0.0, len as f64) as usize
                };
                *slot = seg(0, split, c, d) + seg(split, len, c, d);
            }
            out
        })
        .reduce(
            || vec![0.0; ts.len()],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
                x
            },
        );
    totals.into_iter().fold(0.0, f64::max)
}

/// Exact point probability next to its Gaussian prediction.
#[derive(Clone, Debug, PartialEq)]
pub struct LLTReport {
    pub target: Target,
    pub part_set: PartSet,
    pub params: ShapeParams<f64>,
    pub gamma: [[f64; 2]; 2],
    pub det_gamma: f64,
    /// Smallest eigenvalue of Γ.
    pub sigma_sq: f64,
    pub lyapunov_bound: f64,
    /// `1/(4L)`
    pub ellipse_radius: f64,
    pub p_exact: BigUint,
    /// `log P_λ(N = n)`
    pub log_probability: f64,
    /// `exp{−½‖Γ^{−1/2}(n − E N)‖²} / (2π √det Γ)`
    pub gaussian_pred: f64,
    /// `2π √det Γ · P_λ(N = n)`
    pub normalized_ratio: f64,
}

/// JSON view of an [`LLTReport`] with a fixed key order.
#[derive(Clone, Debug, Serialize)]
pub struct LltSummary {
    pub n1: usize,
    pub n2: usize,
    pub part_set: PartSet,
    pub alpha: f64,
    pub beta: f64,
    pub det_gamma: f64,
    pub sigma_sq: f64,
    pub lyapunov: f64,
    pub p_exact_decimal_string: String,
    pub normalized_ratio: f64,
}

impl LLTReport {
    pub fn summary(&self) -> LltSummary {
        LltSummary {
            n1: self.target.n1,
            n2: self.target.n2,
            part_set: self.part_set,
            alpha: self.params.alpha(),
            beta: self.params.beta(),
            det_gamma: self.det_gamma,
            sigma_sq: self.sigma_sq,
            lyapunov: self.lyapunov_bound,
            p_exact_decimal_string: self.p_exact.to_string(),
            normalized_ratio: self.normalized_ratio,
        }
    }
}

/// Local-limit report for `target`, counting with the default cell budget.
pub fn llt_check(target: Target, part_set: PartSet) -> Result<LLTReport> {
    llt_check_with_budget(target, part_set, DEFAULT_CELL_BUDGET)
}

pub fn llt_check_with_budget(target: Target, part_set: PartSet, budget: u64) -> Result<LLTReport> {
    let table = CountTable::build_with_budget(part_set, target.n1, target.n2, budget)?;
    let p = table.get(target.n1, target.n2).expect("target inside its own table").clone();
    llt_from_count(target, part_set, p)
}

/// Local-limit report from a known count `p = p_X(n)`.
pub fn llt_from_count(target: Target, part_set: PartSet, p_exact: BigUint) -> Result<LLTReport> {
    let tol = EvalTolerance::default();
    let params = calibrate::<f64>(target, part_set, default_rel_tol())?.params;
    let gamma = gibbs_covariance(params, part_set, tol)?;
    let w = Whitening::new(gamma)?;
    let lyapunov = lyapunov_with(params, part_set, &w, LYAPUNOV_DIRECTIONS, tol.abs());
    let (n1, n2) = (target.n1 as f64, target.n2 as f64);
    let log_probability = ln_biguint(&p_exact) - params.alpha() * n1 - params.beta() * n2
        - log_z_direct(params, part_set, tol)?;
    let mean = gibbs_mean(params, part_set, tol)?;
    let offset = w.mahalanobis_sq([n1 - mean[0], n2 - mean[1]]);
    let scale = 2.0 * std::f64::consts::PI * w.det().sqrt();
    Ok(LLTReport {
        target,
        part_set,
        params,
        gamma,
        det_gamma: w.det(),
        sigma_sq: w.eigenvalues[0],
        lyapunov_bound: lyapunov,
        ellipse_radius: 1.0 / (4.0 * lyapunov),
        p_exact,
        log_probability,
        gaussian_pred: (-0.5 * offset).exp() / scale,
        normalized_ratio: scale * log_probability.exp(),
    })
}

/// Largest `|φ_λ(t)|` away from the origin, and the rate `c` with `max = e^{−c·n1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CramerReport {
    pub max_modulus: f64,
    pub rate: f64,
    pub grid_points: usize,
}

/// Scans `steps × steps` points of `[−π, π]²` together with the same grid with
/// t2 shrunk by `n1/n2`, keeping the points with `max(|t1|, |t2|·n2/n1) > 1/(4L)`.
pub fn cramer_decay(
    params: ShapeParams<f64>,
    part_set: PartSet,
    target: Target,
    steps: usize,
    tol: EvalTolerance<f64>,
) -> Result<CramerReport> {
    if target.n1 == 0 || target.n2 == 0 || steps == 0 {
        return Err(Error::Config("cramer scan needs n1, n2 and steps positive".into()));
    }
    let w = Whitening::new(gibbs_covariance(params, part_set, tol)?)?;
    let radius = 1.0 / (4.0 * lyapunov_with(params, part_set, &w, LYAPUNOV_DIRECTIONS, tol.abs()));
    let stretch = target.n2 as f64 / target.n1 as f64;
    let pi = std::f64::consts::PI;
    let node = |i: usize| -pi + 2.0 * pi * (i as f64 + 0.5) / steps as f64;
    let points: Vec<[f64; 2]> = [1.0, stretch]
        .iter()
        .flat_map(|&shrink| (0..steps * steps).map(move |k| [node(k / steps), node(k % steps) / shrink]))
        .filter(|t| t[0].abs().max(t[1].abs() * stretch) > radius)
        .collect();
    let moduli = points
        .par_iter()
        .map(|&t| char_fn(params, part_set, t, tol).map(|z| z.norm()))
        .collect::<Result<Vec<_>>>()?;
    let max_modulus = moduli.into_iter().fold(0.0, f64::max);
    Ok(CramerReport { max_modulus, rate: -max_modulus.ln() / target.n1 as f64, grid_points: points.len() })
}
