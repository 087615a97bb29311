use bipart_core::special::{
    bernoulli_numbers, dirichlet, phi, phi_derivative, phi_lambert, psi, theta, zeta2, zeta_neg, EvalTolerance, PhiJet,
};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn tol() -> EvalTolerance<f64> {
    EvalTolerance::default()
}

/// Akiyama–Tanigawa, which yields B_n with B₁ = +1/2.
fn bernoulli_plus(n: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n + 1);
    let mut a: Vec<BigRational> = Vec::new();
    for m in 0..=n {
        a.push(BigRational::new(1.into(), (m as i64 + 1).into()));
        for j in (1..=m).rev() {
            a[j - 1] = BigRational::from_integer((j as i64).into()) * (&a[j - 1] - &a[j]);
        }
        out.push(a[0].clone());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn lambert_identity(alpha in 0.05f64..40.0) {
        let d = (phi(alpha, tol()).unwrap() - phi_lambert(alpha, tol()).unwrap()).abs();
        prop_assert!(d <= 2.0 * tol().abs());
    }

    #[test]
    fn halving_tolerance_moves_less_than_old_tolerance(alpha in 0.05f64..30.0, s in -1.0f64..3.0) {
        let t = EvalTolerance::new(1e-9).unwrap();
        let coarse = dirichlet(alpha, s, t).unwrap();
        let fine = dirichlet(alpha, s, t.halved()).unwrap();
        prop_assert!((coarse - fine).abs() <= t.abs());
        let p = phi_derivative(alpha, 2, t).unwrap() - phi_derivative(alpha, 2, t.halved()).unwrap();
        prop_assert!(p.abs() <= t.abs());
    }

    #[test]
    fn barred_theta_shares_the_derivative(alpha in 0.05f64..20.0) {
        let plain = PhiJet::at(alpha, false, tol()).unwrap();
        let barred = PhiJet::at(alpha, true, tol()).unwrap();
        let lhs = barred.theta() * barred.value.sqrt();
        let rhs = plain.theta() * plain.value.sqrt();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        prop_assert!((barred.value - plain.value - zeta2::<f64>()).abs() < 1e-12);
    }
}

#[test]
fn log_convex_on_grid() {
    for i in 0..100 {
        let alpha = 0.02 * 1.1f64.powi(i);
        let jet = PhiJet::at(alpha, false, tol()).unwrap();
        assert!(jet.value * jet.d2 - jet.d1 * jet.d1 >= 0.0, "alpha = {alpha}");
    }
}

#[test]
fn theta_decreases_with_limits() {
    let grid: Vec<f64> = (0..200).map(|i| 1e-3 * 1.06f64.powi(i)).collect();
    for barred in [false, true] {
        let values: Vec<f64> = grid.iter().map(|&a| theta(a, barred, tol()).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
    }
    assert!(theta(1e-4, false, tol()).unwrap() > 100.0);
    assert!(theta(40.0, false, EvalTolerance::new(1e-25).unwrap()).unwrap() < 1e-8);
}

#[test]
fn zeta_at_negative_integers_against_bernoulli() {
    let plus = bernoulli_plus(22);
    for j in 1..=10 {
        assert!(zeta_neg(2 * j).value.is_zero());
    }
    for k in 0..=20u32 {
        // ζ(−k) = −B⁺_{k+1}/(k+1)
        let want = -plus[k as usize + 1].clone() / BigRational::from_integer((k as i64 + 1).into());
        assert_eq!(zeta_neg(k).value, want, "k = {k}");
    }
    let minus = bernoulli_numbers(4);
    assert_eq!(minus[1], -BigRational::one() / BigRational::from_integer(2.into()));
}

#[test]
fn psi_is_phi_at_one() {
    for alpha in [0.1, 1.0, 3.0] {
        let direct: f64 = (1..20_000)
            .map(|r| {
                let r = r as f64;
                (-alpha * r).exp() / (r * -(-alpha * r).exp_m1())
            })
            .sum();
        assert!((psi(alpha, tol()).unwrap() - direct).abs() < 1e-10);
    }
}
