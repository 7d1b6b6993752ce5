//! Newton stripes and their spectra on the designed example.

use num_complex::Complex64;
use stripelab_core::presets::designed_example;
use stripelab_core::{CoefficientSet, System64};
use stripelab_oracle::spectrum::{bloch_matrix, lattice_matrix};
use stripelab_oracle::stripe::Coupling;
use stripelab_oracle::{
    bloch_spectrum, lattice_linearization, lattice_linearization_blocks, sideband_curvatures, solve_stripe_1d,
    solve_stripe_with, LatticeSpec, OracleError, SolveOptions, StripeGuess,
};

fn designed(eps: f64) -> System64 {
    designed_example::<f64>(eps).validate().unwrap()
}

/// Unscaled parameters `(α̌, β, κ)` for scaled `(α′, β′, κ̃′)`.
fn unscaled(sys: &System64, eps: f64, alpha_p: f64, beta_p: f64, kappa_p: f64) -> (f64, f64, f64) {
    let td = sys.linear_coeffs().unwrap();
    (eps * eps * alpha_p / td.rates.lambda_m, eps * beta_p, td.kc + eps * kappa_p)
}

#[test]
fn newton_converges_fast_from_the_leading_order_profile() {
    let eps = 0.05;
    let sys = designed(eps);
    let (ac, b, k) = unscaled(&sys, eps, 1.0, 0.0, 0.0);
    let s = solve_stripe_1d(&sys, ac, b, k, 32).unwrap();
    assert!(s.residual_norm <= 1e-10);
    assert!(s.iterations <= 6, "{} iterations", s.iterations);
    assert!(s.final_contraction < 0.1, "{}", s.final_contraction);
    // Reality and the phase gauge are structural.
    for n in 0..=32isize {
        let (p, m) = (s.coeff(n), s.coeff(-n));
        assert_eq!(p[0], m[0].conj());
        assert_eq!(p[1], m[1].conj());
    }
    assert_eq!(s.coeff(1)[0].im, 0.0);
}

#[test]
fn first_harmonic_matches_analytic_amplitude_to_second_order() {
    let td_of = |eps: f64| {
        let sys = designed(eps);
        let td = sys.linear_coeffs().unwrap();
        let cs = CoefficientSet::compute(&sys, &td).unwrap();
        (sys, td, cs)
    };
    let mut errs = Vec::new();
    for eps in [0.05, 0.025] {
        let (sys, td, cs) = td_of(eps);
        let (ac, b, k) = unscaled(&sys, eps, 1.0, 0.0, 0.0);
        let s = solve_stripe_1d(&sys, ac, b, k, 32).unwrap();
        let a = cs.stripe_amplitude(&td, eps * eps, 0.0, 0.0).unwrap();
        let rel = (s.first_harmonic_norm() - a).abs() / a;
        assert!(rel < 5.0 * eps * eps, "ε = {eps}: relative deviation {rel}");
        errs.push(rel);
    }
    assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
}

#[test]
fn advected_stripe_has_velocity_near_leading_order() {
    let eps = 0.05;
    let sys = designed(eps);
    let td = sys.linear_coeffs().unwrap();
    let (ac, b, k) = unscaled(&sys, eps, 1.0, 0.5, 0.3);
    let s = solve_stripe_1d(&sys, ac, b, k, 32).unwrap();
    assert!(!s.even);
    assert!(s.residual_norm <= 1e-10);
    assert!((s.c_num + td.rates.lambda_beta).abs() < 20.0 * eps, "{}", s.c_num);
    assert!(s.coeff(1)[0].im.abs() <= 1e-10);
}

#[test]
fn below_onset_newton_reports_no_stripe() {
    let eps = 0.05;
    let sys = designed(eps);
    let (ac, b, k) = unscaled(&sys, eps, -1.0, 0.0, 0.0);
    match solve_stripe_1d(&sys, ac, b, k, 16) {
        Err(OracleError::NoStripe) | Err(OracleError::NewtonDiverged { .. }) => {}
        other => panic!("expected no stripe, got {other:?}"),
    }
}

#[test]
fn truncation_check_and_minimum_order() {
    let eps = 0.05;
    let sys = designed(eps);
    let (ac, b, k) = unscaled(&sys, eps, 1.0, 0.0, 0.0);
    let opts = SolveOptions { check_truncation: true, ..SolveOptions::with_n(16) };
    solve_stripe_with(&sys, ac, b, k, StripeGuess::Asymptotic, &opts).unwrap();
    assert!(matches!(
        solve_stripe_with(&sys, ac, b, k, StripeGuess::Asymptotic, &SolveOptions::with_n(4)),
        Err(OracleError::InvalidInput(_))
    ));
}

#[test]
fn local_and_asymptotic_guesses_reach_the_same_stripe() {
    let eps = 0.05;
    let sys = designed(eps);
    let (ac, b, k) = unscaled(&sys, eps, 1.0, 0.5, 0.3);
    let opts = SolveOptions::with_n(24);
    let s1 = solve_stripe_with(&sys, ac, b, k, StripeGuess::Asymptotic, &opts).unwrap();
    let s2 = solve_stripe_with(&sys, ac, b, k, StripeGuess::Local, &opts).unwrap();
    let s3 = solve_stripe_with(&sys, ac * 1.01, b, k, StripeGuess::Warm(&s1), &opts).unwrap();
    for n in 0..=3 {
        for i in 0..2 {
            assert!((s1.coeff(n)[i] - s2.coeff(n)[i]).norm() < 1e-9);
        }
    }
    assert!((s1.c_num - s2.c_num).abs() < 1e-8);
    assert!(s3.first_harmonic_norm() > s1.first_harmonic_norm());
}

#[test]
fn zero_stripe_spectrum_is_the_fourier_symbol_spectrum() {
    let eps = 0.05;
    let sys = designed(eps);
    let (ac, b, k) = unscaled(&sys, eps, 1.0, 0.5, 0.3);
    let mut s = solve_stripe_1d(&sys, ac, b, k, 16).unwrap();
    for c in s.fourier_coeffs.iter_mut() {
        *c = [Complex64::new(0.0, 0.0); 2];
    }
    let m = bloch_matrix(&sys, &s, &Coupling::zero(32), [0.1, 0.7], 4);
    let ev = stripelab_oracle::dense::eigenvalues(&m).unwrap();
    for lam in ev {
        // Each eigenvalue must be a root of the dispersion relation at some mode.
        let best = (-4..=4)
            .map(|j| sys.dispersion(lam, j as f64 * s.kappa + 0.1, 0.7, s.alpha_check, s.beta, s.c_num).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-9 * (1.0 + lam.norm_sqr()), "{lam}: {best}");
    }
}

#[test]
fn lattice_spectrum_invariants_and_block_equivalence() {
    let eps = 0.05;
    let sys = designed(eps);
    let (ac, b, k) = unscaled(&sys, eps, 1.0, 0.5, 0.3);
    let s = solve_stripe_1d(&sys, ac, b, k, 32).unwrap();
    let lat = LatticeSpec::hexagonal(s.kappa, 4);
    assert_eq!(lattice_matrix(&sys, &s, &lat).unwrap().nrows(), 2 * 81);
    let full = lattice_linearization(&sys, &s, &lat).unwrap();
    let blocks = lattice_linearization_blocks(&sys, &s, &lat).unwrap();
    assert!(full.translation_eigenvalue_abs <= 1e-8);
    assert_eq!(full.critical_set.len(), 6);
    for (x, y) in full.critical_set.iter().zip(&blocks.critical_set) {
        assert!((x - y).norm() < 1e-9, "{x} vs {y}");
    }
    // Closed under conjugation.
    for z in &full.eigenvalues {
        let d = full.eigenvalues.iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
        assert!(d < 1e-10 * (1.0 + z.norm()), "{z}");
    }
    // Mismatched generator is rejected.
    let bad = LatticeSpec::hexagonal(s.kappa * 1.1, 4);
    assert!(matches!(lattice_linearization(&sys, &s, &bad), Err(OracleError::InvalidInput(_))));
}

#[test]
fn translation_mode_in_bloch_spectrum() {
    let eps = 0.05;
    let sys = designed(eps);
    let (ac, b, k) = unscaled(&sys, eps, 1.0, 0.5, 0.3);
    let s = solve_stripe_1d(&sys, ac, b, k, 32).unwrap();
    let ev = bloch_spectrum(&sys, &s, 0.0, 0.0, 8).unwrap();
    let t = ev.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    assert!(t <= 1e-8, "{t}");
}

#[test]
fn sideband_curvature_signs() {
    let eps = 0.05;
    let sys = designed(eps);
    let td = sys.linear_coeffs().unwrap();
    let r = td.rates;
    for kp in [0.3, -0.3] {
        let (ac, b, k) = unscaled(&sys, eps, 1.0, 0.0, kp);
        let s = solve_stripe_1d(&sys, ac, b, k, 32).unwrap();
        let c = sideband_curvatures(&sys, &s, 8).unwrap();
        assert_eq!(c.zigzag.signum(), -kp.signum(), "κ̃′ = {kp}: {c:?}");
    }
    // Eckhaus: unstable below E(κ̃′, β′) = −ρ_ββ′² − 3ρ_κ̃κ̃′², stable above.
    let (kp, bp) = (0.3, 0.5);
    let e = -r.rho_beta * bp * bp - 3.0 * r.rho_kappa * kp * kp;
    let mut signs = Vec::new();
    for ap in [0.8 * e, 1.2 * e] {
        let (ac, b, k) = unscaled(&sys, eps, ap, bp, kp);
        let s = solve_stripe_1d(&sys, ac, b, k, 32).unwrap();
        signs.push(sideband_curvatures(&sys, &s, 8).unwrap().eckhaus.signum());
    }
    assert_eq!(signs, vec![1.0, -1.0]);
}
