//! Centre-manifold blocks: structure, two-path consistency, reductions.

use proptest::prelude::*;
use stripelab_core::error::Error;
use stripelab_core::lattice_blocks::{
    block_l1, block_l2_hex, block_l2_quasihex, block_l2_square, omega_prime, AmplitudeCheck, BlockKind, EllBranch,
    ScaledParams,
};
use stripelab_core::presets::designed_example;
use stripelab_core::{CoefficientSet, OmegaParam};

type Setup = (stripelab_core::System64, stripelab_core::TuringData64, stripelab_core::CoefficientSet64);

fn setup(eps: f64) -> Setup {
    let sys = designed_example::<f64>(eps).validate().unwrap();
    let td = sys.linear_coeffs().unwrap();
    let c = CoefficientSet::compute(&sys, &td).unwrap();
    (sys, td, c)
}

/// On-branch scaled amplitude `A′ = √(−(α′ + ρ_ββ′² + ρ_κ̃κ̃′²)/ρ_nl)` with `ρ_nl` rescaled by ε.
fn a_prime(s: &Setup, mu: ScaledParams<f64>) -> f64 {
    let (_, td, c) = s;
    let r = &td.rates;
    (-(mu.alpha + r.rho_beta * mu.beta * mu.beta + r.rho_kappa * mu.kappa * mu.kappa) / c.rho_nl).sqrt()
}

#[test]
fn l1_block_eigenvalues() {
    let (_, _, c) = setup(0.4);
    let b = block_l1(&c, 0.0);
    assert_eq!(b.eigenvalues, (0.0, 0.0));
    let b = block_l1(&c, 0.1);
    assert!((b.eigenvalues.0 - 2.0 * c.rho_nl * 0.01).abs() < 1e-15);
    assert_eq!(b.eigenvalues.1, 0.0);
    assert!(b.eigenvalues.0 < 0.0);
    assert_eq!(b.kind, BlockKind::L1);
}

#[test]
fn square_block_examples_and_forms() {
    let eps = 0.05;
    let s = setup(eps);
    let mu = ScaledParams { alpha: 1.0, beta: 0.0, kappa: 0.0 };
    let a = a_prime(&s, mu);
    let b = block_l2_square(&s.2, &s.1, a, mu, 0.0, eps, AmplitudeCheck::Strict).unwrap();
    let red = b.reduced_form.unwrap().0;
    assert!((red + eps * eps).abs() < 1e-15);
    assert_eq!(b.eigenvalues.0, b.eigenvalues.1);
    assert!(b.entries[0][1].norm() == 0.0 && b.entries[1][0].norm() == 0.0);
    // Diagonal form equals the closed form after substituting the amplitude equation.
    assert!((b.eigenvalues.0 - b.lemma_form.0).abs() < 1e-10 * eps * eps);
    // Closed form vs reduced form differ at O(ε) relative (here ε²·O(ε²)/ε² through q-terms).
    assert!((b.lemma_form.0 - red).abs() < 10.0 * eps * eps * eps);
}

#[test]
fn square_boundary_touches_bifurcation_at_ell_equal_kappa() {
    let eps = 0.05;
    let s = setup(eps);
    let kp = 0.7;
    // α′ on the bifurcation: α′ = −ρ_κ̃κ̃′².
    let mu = ScaledParams { alpha: -s.1.rates.rho_kappa * kp * kp, beta: 0.0, kappa: kp };
    let b = block_l2_square(&s.2, &s.1, 0.0, mu, kp, eps, AmplitudeCheck::Strict).unwrap();
    assert!(b.reduced_form.unwrap().0.abs() < 1e-15);
}

#[test]
fn off_branch_amplitude_is_rejected_or_flagged() {
    let eps = 0.05;
    let s = setup(eps);
    let mu = ScaledParams { alpha: 1.0, beta: 0.0, kappa: 0.0 };
    let a = a_prime(&s, mu) * 1.1;
    assert!(matches!(
        block_l2_square(&s.2, &s.1, a, mu, 0.0, eps, AmplitudeCheck::Strict),
        Err(Error::InconsistentAmplitude { .. })
    ));
    let b = block_l2_hex(&s.2, &s.0, &s.1, a, mu, eps, AmplitudeCheck::Warn).unwrap();
    assert!(b.amplitude_off_branch);
}

#[test]
fn hex_block_structure_and_isotropic_boundary() {
    let eps = 0.05;
    let s = setup(eps);
    let (_, td, c) = &s;
    let mu = ScaledParams { alpha: 1.0, beta: 0.5, kappa: 0.3 };
    let a = a_prime(&s, mu);
    let b = block_l2_hex(c, &s.0, td, a, mu, eps, AmplitudeCheck::Strict).unwrap();
    assert_eq!(b.kind, BlockKind::L2Hex);
    assert_eq!(b.entries[0][0].im, 0.0);
    assert_eq!(b.entries[0][0], b.entries[1][1]);
    assert_eq!(b.entries[1][0], b.entries[0][1].conj());
    assert!(b.eigenvalues.0 <= b.eigenvalues.1);
    // Diagonal two-path consistency.
    let r = &td.rates;
    let center = eps * eps
        * (a * a * (3.0 * c.k0 - c.quad.q2 + 8.0 * c.quad.q1) - 0.75 * r.rho_beta * mu.beta * mu.beta);
    assert!((b.entries[0][0].re - center).abs() < 1e-10 * eps * eps);

    // β′ = κ̃′ = 0, α′ = −4q′²/(3k0) → λ_hex+ = 0 in reduced form.
    let qp = c.quad.q / eps;
    let mu0 = ScaledParams { alpha: -4.0 * qp * qp / (3.0 * c.k0), beta: 0.0, kappa: 0.0 };
    let b0 = block_l2_hex(c, &s.0, td, a_prime(&s, mu0), mu0, eps, AmplitudeCheck::Strict).unwrap();
    assert!(b0.reduced_form.unwrap().1.abs() < 1e-15, "{:?}", b0.reduced_form);
}

#[test]
fn hex_block_without_quadratic_terms_is_stable() {
    let eps = 0.05;
    let mut spec = designed_example::<f64>(eps);
    spec.quadratic = Some(stripelab_core::QuadForm::zero());
    let sys = spec.validate().unwrap();
    let td = sys.linear_coeffs().unwrap();
    let c = CoefficientSet::compute(&sys, &td).unwrap();
    let s = (sys, td, c);
    for (alpha, beta, kappa) in [(1.0, 0.0, 0.0), (0.5, 1.0, 0.2), (2.0, -0.3, -0.4)] {
        let mu = ScaledParams { alpha, beta, kappa };
        let a = a_prime(&s, mu);
        let b = block_l2_hex(&s.2, &s.0, &s.1, a, mu, eps, AmplitudeCheck::Strict).unwrap();
        let (lm, lp) = b.reduced_form.unwrap();
        assert!(lm < 0.0 && lp < 0.0);
        assert!(b.eigenvalues.1 < 0.0);
    }
}

#[test]
fn quasihex_reduces_to_hex_at_ell_equal_kappa() {
    let eps = 0.05;
    let s = setup(eps);
    for (alpha, beta, kappa) in [(1.0, 0.5, 0.3), (0.8, -0.2, -0.1), (2.0, 0.0, 0.4)] {
        let mu = ScaledParams { alpha, beta, kappa };
        let a = a_prime(&s, mu);
        let h = block_l2_hex(&s.2, &s.0, &s.1, a, mu, eps, AmplitudeCheck::Strict).unwrap();
        let q = block_l2_quasihex(&s.2, &s.0, &s.1, a, mu, kappa, eps, AmplitudeCheck::Strict).unwrap();
        for (x, y) in [(h.eigenvalues.0, q.eigenvalues.0), (h.eigenvalues.1, q.eigenvalues.1)] {
            assert!((x - y).abs() < 1e-12);
        }
        for i in 0..2 {
            for j in 0..2 {
                assert!((h.entries[i][j] - q.entries[i][j]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn omega_is_a_downward_parabola_peaking_at_minus_kappa_third() {
    let (_, td, _) = setup(0.4);
    let kp = 0.6;
    let peak = omega_prime(&td, kp, -kp / 3.0);
    assert!((peak + td.rates.rho_kappa * kp * kp).abs() < 1e-14);
    assert!(omega_prime(&td, kp, kp).abs() < 1e-15);
    let (mut best, mut arg) = (f64::NEG_INFINITY, 0.0);
    for i in 0..=4000 {
        let l = -2.0 + 4.0 * i as f64 / 4000.0;
        let w = omega_prime(&td, kp, l);
        if w > best {
            best = w;
            arg = l;
        }
    }
    assert!((arg + kp / 3.0).abs() < 1e-3);
    assert!(best <= peak + 1e-15);
}

#[test]
fn omega_parametrization() {
    let (_, td, _) = setup(0.4);
    let k = 0.1;
    let p = OmegaParam::new(&td, k, 1.0, EllBranch::HexContinuation).unwrap();
    assert!((p.ell + k / 3.0).abs() < 1e-15);
    for theta in [0.1, 0.5, 0.9, 1.0] {
        for br in [EllBranch::HexContinuation, EllBranch::Far] {
            let p = OmegaParam::new(&td, k, theta, br).unwrap();
            assert!((omega_prime(&td, k, p.ell) - p.omega).abs() < 1e-15);
            assert!(p.omega > 0.0 && p.omega <= -td.rates.rho_kappa * k * k + 1e-18);
        }
    }
    assert!(OmegaParam::new(&td, k, 0.0, EllBranch::Far).is_err());
    assert!(OmegaParam::new(&td, k, 1.5, EllBranch::Far).is_err());
}

proptest! {
    #[test]
    fn square_two_path_consistency(alpha in 0.1f64..3.0, beta in -1.0f64..1.0, kappa in -0.5f64..0.5, ell in -1.0f64..1.0) {
        let eps = 0.05;
        let s = setup(eps);
        let mu = ScaledParams { alpha, beta, kappa };
        let a = a_prime(&s, mu);
        prop_assume!(a.is_finite());
        let b = block_l2_square(&s.2, &s.1, a, mu, ell, eps, AmplitudeCheck::Strict).unwrap();
        prop_assert!((b.eigenvalues.0 - b.lemma_form.0).abs() < 1e-10 * eps * eps);
    }

    #[test]
    fn hex_two_path_consistency_and_beta_parity(alpha in 0.1f64..3.0, beta in -1.0f64..1.0, kappa in -0.5f64..0.5) {
        let eps = 0.05;
        let s = setup(eps);
        let (_, td, c) = &s;
        let mu = ScaledParams { alpha, beta, kappa };
        let a = a_prime(&s, mu);
        prop_assume!(a.is_finite());
        let b = block_l2_hex(c, &s.0, td, a, mu, eps, AmplitudeCheck::Strict).unwrap();
        let r = &td.rates;
        let center = eps * eps * (a * a * (3.0 * c.k0 - c.quad.q2 + 8.0 * c.quad.q1) - 0.75 * r.rho_beta * beta * beta);
        prop_assert!((b.entries[0][0].re - center).abs() < 1e-10 * eps * eps);
        let mirrored = ScaledParams { beta: -beta, ..mu };
        let bm = block_l2_hex(c, &s.0, td, a, mirrored, eps, AmplitudeCheck::Strict).unwrap();
        prop_assert!((b.eigenvalues.0 - bm.eigenvalues.0).abs() < 1e-14);
        prop_assert!((b.eigenvalues.1 - bm.eigenvalues.1).abs() < 1e-14);
        prop_assert!(b.eigenvalues.0 <= b.eigenvalues.1);
    }
}
