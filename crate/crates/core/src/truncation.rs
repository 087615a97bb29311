//! Series summation with an explicit a-priori tail bound.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Hard cap on the number of terms any single series may take.
pub(crate) const MAX_TERMS: usize = 1_000_000_000;

/// Dominating sequence `scale * r^power * exp(-decay * r)` for the terms of an r-series.
#[derive(Clone, Copy, Debug)]
pub(crate) struct TermBound<T> {
    pub scale: T,
    pub power: T,
    pub decay: T,
}

impl<T: Real> TermBound<T> {
    pub fn at(&self, r: usize) -> T {
        let r = T::from_count(r);
        self.scale * r.powf(self.power) * (-self.decay * r).exp()
    }

    /// Upper bound on the sum of the bounding terms with index > `r`.
    pub fn tail_after(&self, r: usize) -> T {
        let next = T::from_count(r + 1);
        let first = self.at(r + 1);
        let ratio = if self.power > T::zero() {
            ((next + T::one()) / next).powf(self.power) * (-self.decay).exp()
        } else {
            (-self.decay).exp()
        };
        if ratio >= T::one() {
            T::infinity()
        } else {
            first / (T::one() - ratio)
        }
    }
}

/// Sums `term(r)` for r = 1, 2, ... until both the next bounding term and the
/// remaining tail fall below `tol / 2`.
pub(crate) fn sum_r_series<T, V, F>(tol: T, bound: TermBound<T>, mut term: F) -> Result<V>
where
    T: Real,
    V: std::ops::AddAssign + Default,
    F: FnMut(usize) -> V,
{
    let half = tol / T::lit(2.0);
    let mut acc = V::default();
    for r in 1..=MAX_TERMS {
        acc += term(r);
        if bound.at(r + 1) < half && bound.tail_after(r) < half {
            return Ok(acc);
        }
    }
    Err(Error::domain(
        "series needs more than the maximum number of terms",
        bound.decay.to_f64_lossy(),
    ))
}

/// `sum_{k>=1} k^p u^k = u A_p(u) / (1-u)^{p+1}` with `A_p` the Eulerian
/// polynomial; `one_minus_u` is passed separately to keep precision near u = 1.
pub(crate) fn geometric_moment<T: Real>(u: T, one_minus_u: T, p: u32) -> T {
    let coeffs = eulerian_row(p);
    let mut poly = T::zero();
    for &c in coeffs.iter().rev() {
        poly = poly * u + T::lit(c as f64);
    }
    u * poly / one_minus_u.powi(p as i32 + 1)
}

/// `A_p(1) = p!`, the bound on the Eulerian polynomial over [0, 1].
pub(crate) fn eulerian_sup(p: u32) -> f64 {
    (1..=p).map(f64::from).product()
}

fn eulerian_row(p: u32) -> Vec<u64> {
    let mut row = vec![1u64];
    for n in 1..=p.max(1) as u64 {
        let mut next = vec![0u64; n as usize];
        for k in 0..n as usize {
            let keep = if k < row.len() { (k as u64 + 1) * row[k] } else { 0 };
            let shift = if k >= 1 && k - 1 < row.len() { (n - k as u64) * row[k - 1] } else { 0 };
            next[k] = keep + shift;
        }
        row = next;
    }
    row
}

/// Returns `(e^{-x}, 1 - e^{-x})` with the second computed via `expm1`.
pub(crate) fn decay_pair<T: Real>(x: T) -> (T, T) {
    (( -x).exp(), -(-x).exp_m1())
}
