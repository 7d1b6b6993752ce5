//! Nonlinear coefficients, response vectors and the leading-order stripe.

use proptest::prelude::*;
use stripelab_core::coefficients::{quadratic_coeffs, reduced_inverse};
use stripelab_core::error::Error;
use stripelab_core::presets::designed_example;
use stripelab_core::{CoefficientSet, CubicForm, Mat2, QuadForm, StripeParams, SystemSpec};

fn setup(eps: f64) -> (stripelab_core::System64, stripelab_core::TuringData64, stripelab_core::CoefficientSet64) {
    let sys = designed_example::<f64>(eps).validate().unwrap();
    let td = sys.linear_coeffs().unwrap();
    let c = CoefficientSet::compute(&sys, &td).unwrap();
    (sys, td, c)
}

/// Hand-written 2×2 solve, independent of the library's linear algebra.
fn solve2(m: [[f64; 2]; 2], r: [f64; 2]) -> [f64; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [(m[1][1] * r[0] - m[0][1] * r[1]) / det, (m[0][0] * r[1] - m[1][0] * r[0]) / det]
}

/// Designed-example bilinear form `ε(u1u2 + v1v2/4)` in both components.
fn q_designed(eps: f64, x: [f64; 2], y: [f64; 2]) -> [f64; 2] {
    let s = eps * (x[0] * y[0] + 0.25 * x[1] * y[1]);
    [s, s]
}

fn e_vectors() -> ([f64; 2], [f64; 2]) {
    let s5 = 5f64.sqrt();
    ([-1.0 / s5, -2.0 / s5], [-7.0 / s5, 1.0 / s5])
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[test]
fn k0_by_direct_trilinear_contraction() {
    let (_, _, c) = setup(0.4);
    let (e0, e0s) = e_vectors();
    // K[U,U,U] = (−uv², uv²) on the diagonal.
    let uv2 = e0[0] * e0[1] * e0[1];
    let k = [-uv2, uv2];
    let k0 = dot(k, e0s);
    assert!((k0 + 32.0 / 25.0).abs() < 1e-12);
    assert!((c.k0 + 1.28).abs() < 1e-12, "{}", c.k0);
}

#[test]
fn raw_triad_contraction() {
    for eps in [0.4, 0.1, 1.0] {
        let sys = designed_example::<f64>(eps).validate().unwrap();
        let td = sys.linear_coeffs().unwrap();
        let quad = quadratic_coeffs(&sys, &td).unwrap();
        let (e0, e0s) = e_vectors();
        let direct = dot(q_designed(eps, e0, e0), e0s);
        let closed = -12.0 * eps / (5.0 * 5f64.sqrt());
        assert!((direct - closed).abs() < 1e-14);
        assert!((quad.q - closed).abs() < 1e-12, "{} vs {closed}", quad.q);
        if eps == 1.0 {
            assert!((quad.q + 1.0733).abs() < 1e-4);
        }
    }
    let (_, _, c) = setup(0.4);
    assert!((c.q_raw() - -0.4 * 12.0 / (5.0 * 5f64.sqrt())).abs() < 1e-12);
}

#[test]
fn quadratic_vectors_by_direct_solves() {
    let eps = 0.4;
    let (_, _, c) = setup(eps);
    let (e0, e0s) = e_vectors();
    let qee = q_designed(eps, e0, e0);
    let l = [[3.0, -1.0], [14.0, -3.5]];
    let l4 = [[3.0 - 4.0, -1.0], [14.0, -3.5 - 14.0]];
    let l2 = [[3.0 - 2.0, -1.0], [14.0, -3.5 - 7.0]];
    let q0v = solve2(l, [-2.0 * qee[0], -2.0 * qee[1]]);
    let q2v = solve2(l4, [-2.0 * qee[0], -2.0 * qee[1]]);
    let q11v = solve2(l2, [-qee[0], -qee[1]]);
    for i in 0..2 {
        assert!((c.quad.big_q0[i] - q0v[i]).abs() < 1e-12);
        assert!((c.quad.big_q2[i] - q2v[i]).abs() < 1e-12);
        assert!((c.quad.big_q11[i] - q11v[i]).abs() < 1e-12);
    }
    assert!((c.quad.q0 - dot(q_designed(eps, e0, q0v), e0s)).abs() < 1e-12);
    assert!((c.quad.q2 - dot(q_designed(eps, e0, q2v), e0s)).abs() < 1e-12);
    assert!((c.quad.q11 - dot(q_designed(eps, e0, q11v), e0s)).abs() < 1e-12);
    assert!((c.rho_nl - (3.0 * c.k0 + 2.0 * c.quad.q0 + c.quad.q2)).abs() < 1e-14);
    assert!((c.xi - (6.0 * c.k0 + 2.0 * c.quad.q0 + 8.0 * c.quad.q11)).abs() < 1e-14);
    assert!((c.eta - (6.0 * c.k0 + 2.0 * c.quad.q0 + 8.0 * c.quad.q1)).abs() < 1e-14);
}

#[test]
fn q1_solves_its_equation_and_is_orthogonal() {
    let eps = 0.4;
    let (_, _, c) = setup(eps);
    let (e0, e0s) = e_vectors();
    let qee = q_designed(eps, e0, e0);
    let q = c.quad.q;
    let b = [[2.0, -1.0], [14.0, -7.0]];
    let w = c.quad.big_q1;
    for i in 0..2 {
        let lhs = b[i][0] * w[0] + b[i][1] * w[1];
        assert!((lhs - (q * e0[i] - qee[i])).abs() < 1e-12);
    }
    assert!(dot(w, e0s).abs() < 1e-12);
}

#[test]
fn cross_check_rates_through_response_vectors() {
    let (sys, td, c) = setup(0.4);
    let rb = c.rho_beta_from_response(&td);
    let rk = c.rho_kappa_from_response(&sys, &td);
    assert!((rb - td.rates.rho_beta).abs() < 1e-10, "{rb}");
    assert!((rk - td.rates.rho_kappa).abs() < 1e-10, "{rk}");
    assert!((rb - 0.112).abs() < 1e-10 && (rk + 2.8).abs() < 1e-10);
}

#[test]
fn identity_unfolding_has_zero_alpha_response() {
    let mut spec = designed_example(0.4_f64);
    spec.unfolding = Mat2::identity();
    let sys = spec.validate().unwrap();
    let td = sys.linear_coeffs().unwrap();
    let c = CoefficientSet::compute(&sys, &td).unwrap();
    assert!(c.resp.w_aalpha[0].abs() < 1e-15 && c.resp.w_aalpha[1].abs() < 1e-15);
}

#[test]
fn reduced_inverse_examples() {
    let (e0, e0s) = e_vectors();
    let b = Mat2::new(2.0, -1.0, 14.0, -7.0);
    assert_eq!(reduced_inverse(&b, [0.0, 0.0], e0, e0s).unwrap(), [0.0, 0.0]);
    // A range vector: b·(1, 0) = (2, 14).
    let rhs = [2.0, 14.0];
    let w = reduced_inverse(&b, rhs, e0, e0s).unwrap();
    let back = b.apply(w);
    assert!(((back[0] - rhs[0]).powi(2) + (back[1] - rhs[1]).powi(2)).sqrt() <= 1e-12);
    assert!(dot(w, e0s).abs() < 1e-12);
    // The kernel component is rejected.
    assert!(matches!(reduced_inverse(&b, e0, e0, e0s), Err(Error::RhsNotInRange(_))));
}

#[test]
fn vanishing_quadratic_gives_zero_quadratic_coefficients() {
    let mut spec = designed_example(0.4_f64);
    spec.quadratic = Some(QuadForm::zero());
    let sys = spec.validate().unwrap();
    let td = sys.linear_coeffs().unwrap();
    let q = quadratic_coeffs(&sys, &td).unwrap();
    for x in [q.q0, q.q2, q.q, q.q1, q.q11] {
        assert_eq!(x, 0.0);
    }
    for v in [q.big_q0, q.big_q2, q.big_q1, q.big_q11] {
        assert_eq!(v, [0.0, 0.0]);
    }
    let c = CoefficientSet::compute(&sys, &td).unwrap();
    assert!((c.rho_nl - 3.0 * c.k0).abs() < 1e-15);
}

#[test]
fn subcritical_system_rejected() {
    let mut spec = designed_example(0.4_f64);
    spec.cubic = Some(CubicForm::from_monomials([(0.0, 0.0, 1.0, 0.0), (0.0, 0.0, -1.0, 0.0)]));
    spec.quadratic = Some(QuadForm::zero());
    let sys = spec.validate().unwrap();
    let td = sys.linear_coeffs().unwrap();
    assert!(matches!(CoefficientSet::compute(&sys, &td), Err(Error::SupercriticalityViolated(_))));
}

#[test]
fn stripe_amplitude_and_velocity() {
    let (_, td, c) = setup(0.4);
    let a = c.stripe_amplitude(&td, 0.01, 0.0, 0.0).unwrap();
    assert!((a - (0.01 / -c.rho_nl).sqrt()).abs() < 1e-15);
    assert!(c.stripe_amplitude(&td, -0.01, 0.0, 0.0).is_none());
    // Below B(κ̃, β) = −0.112β² + 2.8κ̃² there is no stripe.
    assert!(c.stripe_amplitude(&td, 0.027, 0.0, 0.1).is_none());
    assert!(c.stripe_amplitude(&td, 0.029, 0.0, 0.1).is_some());
    assert!((c.stripe_velocity() + 1.4).abs() < 1e-14);
}

#[test]
fn vanishing_beta_numerator_gives_zero_velocity() {
    // With a4 − kc²d2 = 0 the rate λ_β vanishes and so does c = −λ_β. Such a
    // system has λ_ββ = 0 and is rejected as a Turing point, so the
    // velocity rule is checked on the rates themselves.
    let (_, td, _) = setup(0.4);
    let rates = stripelab_core::LinearRates { lambda_beta: 0.0, ..td.rates };
    assert_eq!(rates.default_velocity(), 0.0);
    let spec = SystemSpec::from_tensors(
        [1.0, 2.0],
        Mat2::new(0.0, -1.0, 1.0, 2.0 - 2.5),
        QuadForm::zero(),
        CubicForm::zero(),
    );
    assert!(spec.validate().unwrap().linear_rates().is_err());
}

#[test]
fn stripe_profile_reproduces_fourier_modes() {
    let (_, td, c) = setup(0.4);
    let mu = StripeParams { alpha: 0.01, beta: 0.05, kappa: 0.02 };
    let a = c.stripe_amplitude(&td, mu.alpha, mu.beta, mu.kappa).unwrap();
    let n = 64;
    let xs: Vec<f64> = (0..n).map(|j| 2.0 * std::f64::consts::PI * j as f64 / n as f64).collect();
    let prof = c.stripe_profile(&td, a, mu, &xs);
    let modes = c.stripe_fourier(&td, a, mu);
    // Discrete Fourier coefficient of mode 1 recovers the n = 1 coefficient.
    for i in 0..2 {
        let (mut re, mut im) = (0.0, 0.0);
        for (x, u) in xs.iter().zip(&prof) {
            re += u[i] * x.cos() / n as f64;
            im -= u[i] * x.sin() / n as f64;
        }
        assert!((re - modes[1][i].re).abs() < 1e-14 && (im - modes[1][i].im).abs() < 1e-14);
    }
    // Leading part of mode 1 is A·E0.
    let lead = [a * td.chart.e0[0], a * td.chart.e0[1]];
    assert!((modes[1][0].re - lead[0]).abs() < 0.5 * a && (modes[1][1].re - lead[1]).abs() < 0.5 * a);
}

#[test]
fn p_hex_real_part_from_kappa_imag_part_from_beta() {
    let (sys, td, c) = setup(0.4);
    let pk = c.p_hex(&sys, &td, 0.0, 1.0);
    let pb = c.p_hex(&sys, &td, 1.0, 0.0);
    assert!(pk.im.abs() < 1e-15 && pk.re.abs() > 1e-6);
    assert!(pb.re.abs() < 1e-15 && pb.im.abs() > 1e-6);
    let both = c.p_hex(&sys, &td, 0.3, -0.7);
    assert!((both.re - (-0.7) * pk.re).abs() < 1e-13 && (both.im - 0.3 * pb.im).abs() < 1e-13);
    // Quasi-hex reduces to hex at ℓ̃′ = κ̃′.
    let qh = c.p_quasihex(&sys, &td, 0.3, -0.7, -0.7);
    assert!((qh - both).norm() < 1e-14);
    let _ = c.p_quasihex(&sys, &td, 0.0, 1.0, -1.0 / 3.0);
}

#[test]
fn gauge_flip_leaves_scalars_invariant_except_q() {
    let (sys, td, c) = setup(0.4);
    let tf = td.with_flipped_chart();
    let cf = CoefficientSet::compute(&sys, &tf).unwrap();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs());
    assert!(close(cf.k0, c.k0) && close(cf.rho_nl, c.rho_nl));
    assert!(close(cf.quad.q0, c.quad.q0) && close(cf.quad.q2, c.quad.q2));
    assert!(close(cf.quad.q1, c.quad.q1) && close(cf.quad.q11, c.quad.q11));
    assert!(close(cf.xi, c.xi) && close(cf.eta, c.eta));
    assert!(close(cf.quad.q, -c.quad.q));
    assert!(close(cf.rho_beta_from_response(&tf), c.rho_beta_from_response(&td)));
    assert!(close(cf.rho_kappa_from_response(&sys, &tf), c.rho_kappa_from_response(&sys, &td)));
}

proptest! {
    #[test]
    fn quadratic_scaling_law(s in 0.05f64..3.0) {
        let sys = designed_example::<f64>(1.0).validate().unwrap();
        let td = sys.linear_coeffs().unwrap();
        let base = quadratic_coeffs(&sys, &td).unwrap();
        let scaled = quadratic_coeffs(&sys.with_quadratic_scaled(s), &td).unwrap();
        let tol = |x: f64| 1e-12 * (1.0 + x.abs());
        prop_assert!((scaled.q - s * base.q).abs() <= tol(base.q));
        for (a, b) in [(scaled.q0, base.q0), (scaled.q2, base.q2), (scaled.q1, base.q1), (scaled.q11, base.q11)] {
            prop_assert!((a - s * s * b).abs() <= tol(b));
        }
        // k0 does not see Q at all.
        if let (Ok(c1), Ok(c2)) = (
            CoefficientSet::compute(&sys.with_quadratic_scaled(0.4), &td),
            CoefficientSet::compute(&sys.with_quadratic_scaled(0.4 * s.min(1.0)), &td),
        ) {
            prop_assert_eq!(c1.k0, c2.k0);
        }
    }
}
