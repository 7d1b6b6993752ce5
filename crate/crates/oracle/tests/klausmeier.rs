//! Extended Klausmeier model: stripes, lattice sweeps, scans and the
//! rhombic criticality crossing.

use stripelab_core::boundaries::Axis;
use stripelab_oracle::klausmeier::{
    analyze_stripe, component_labels, count_components, klausmeier_stripe, EllSweep, UNSTABLE_TOL,
};
use stripelab_oracle::{klausmeier_scan, rhombic_crossing, CellStatus, KlausmeierParams, OracleError, ScanSettings};

#[test]
fn stripe_near_the_rhombic_crossing_converges() {
    let p = KlausmeierParams::standard(0.0);
    let (_, s) = klausmeier_stripe(&p, 0.4784, 2.712, None, 64).unwrap();
    assert_eq!(s.n, 64);
    assert!(s.residual_norm <= 1e-10);
    assert!(s.first_harmonic_norm() > 0.1);
    assert!(s.even);
}

#[test]
fn onset_is_a_root_of_the_linear_growth() {
    for beta in [0.0, 40.0, 100.0] {
        let p = KlausmeierParams::standard(beta);
        let a = p.onset(0.43, 2.0, 3.5).unwrap();
        assert!(p.linear_growth(a, 0.43).unwrap().abs() < 1e-9);
        assert!(p.linear_growth(a - 0.01, 0.43).unwrap() > 0.0);
    }
    // Advection raises the onset.
    let a0 = KlausmeierParams::standard(0.0).onset(0.43, 2.0, 3.5).unwrap();
    let a100 = KlausmeierParams::standard(100.0).onset(0.43, 2.0, 3.5).unwrap();
    assert!(a100 > a0 + 0.1);
}

#[test]
fn sweep_grid_resolution() {
    let g = EllSweep::default().grid(0.4);
    assert!((g[0] - 0.004).abs() < 1e-15);
    assert!((g[g.len() - 1] - 0.6).abs() < 1e-12);
    // At least 64 points per decade.
    let per_decade = (g.len() - 1) as f64 / 150f64.log10();
    assert!(per_decade >= 64.0, "{per_decade}");
}

#[test]
fn critical_eigenvalues_are_robust_to_doubling_the_truncations() {
    let p = KlausmeierParams::standard(0.0);
    let coarse = ScanSettings::default();
    let fine = ScanSettings { n: 128, n_lat: 12, ..coarse };
    let (sys, s1) = klausmeier_stripe(&p, 0.4784, 2.712, None, coarse.n).unwrap();
    let (_, s2) = klausmeier_stripe(&p, 0.4784, 2.712, None, fine.n).unwrap();
    let x1 = analyze_stripe(&sys, &s1, &coarse).unwrap();
    let x2 = analyze_stripe(&sys, &s2, &fine).unwrap();
    assert_eq!(x1.rhomb_peaks.len(), x2.rhomb_peaks.len());
    for (a, b) in x1.rhomb_peaks.iter().zip(&x2.rhomb_peaks) {
        assert!((a.value - b.value).abs() <= 1e-6, "{a:?} vs {b:?}");
    }
    for (a, b) in [(x1.hex, x2.hex), (x1.quasihex, x2.quasihex), (x1.quasi_square, x2.quasi_square)] {
        assert!((a - b).abs() <= 1e-6);
    }
}

#[test]
fn two_rhombic_peaks_vanish_together_near_the_reference_crossing() {
    let p = KlausmeierParams::standard(0.0);
    let st = ScanSettings::default();
    // Start two grid cells away with rough peak positions.
    let x = rhombic_crossing(&p, &st, 0.482, 2.72, [0.31, 0.385]).unwrap();
    assert!(((x.kappa - 0.4784) / 0.4784).abs() < 0.01, "{x:?}");
    assert!(((x.a - 2.712) / 2.712).abs() < 0.01, "{x:?}");
    for pk in x.peaks {
        assert!(pk.value.abs() < 1e-9);
    }
    assert!(x.peaks[0].ell < x.peaks[1].ell);
}

#[test]
fn small_scan_layout_flags_and_log() {
    let p = KlausmeierParams::standard(0.0);
    let kappa = Axis { min: 0.42, max: 0.44, count: 3 };
    let a = Axis { min: 2.87, max: 2.89, count: 3 };
    let scan = klausmeier_scan(p, kappa, a, ScanSettings::default()).unwrap();
    assert_eq!(scan.cells.len(), 9);
    for (idx, c) in scan.cells.iter().enumerate() {
        assert_eq!(idx, c.j * 3 + c.i);
    }
    // The top row lies above onset everywhere; the rest are stripes.
    for i in 0..3 {
        assert_eq!(scan.cell(i, 2).status, CellStatus::NoStripe);
        assert_eq!(scan.cell(i, 0).status, CellStatus::Stripe);
    }
    // Stripes near onset at β = 0 are rhomb-unstable.
    for k in scan.onset_cells().into_iter().flatten() {
        assert!(scan.cells[k].rhomb_breakup());
    }
    let labels = scan.labels();
    assert_eq!(labels.len(), 9);
    assert!(labels.iter().zip(&scan.cells).all(|(l, c)| l.exists == c.exists()));
    assert!(labels.iter().filter(|l| l.exists).all(|l| l.hex_unstable && !l.stable_all_checked));
    let log = scan.log_lines();
    assert_eq!(log.len(), 9);
    assert!(log[0].starts_with("cell=0 "));
    assert!(log.iter().all(|l| l.contains("residual=") && l.contains("N=") && l.contains("max_re=")));
    // Deterministic.
    let again = klausmeier_scan(p, kappa, a, ScanSettings::default()).unwrap();
    assert_eq!(again, scan);
}

#[test]
fn scan_rejects_rainfall_without_vegetated_state() {
    let p = KlausmeierParams::standard(0.0);
    let r = klausmeier_scan(
        p,
        Axis { min: 0.4, max: 0.5, count: 2 },
        Axis { min: 0.5, max: 1.0, count: 2 },
        ScanSettings::default(),
    );
    assert!(matches!(r, Err(OracleError::InvalidInput(_))));
}

#[test]
fn component_counting() {
    #[rustfmt::skip]
    let mask = [
        true,  true,  false, true,
        false, false, false, true,
        true,  false, true,  false,
    ];
    assert_eq!(count_components(&mask, 4, 3), 4);
    let labels = component_labels(&mask, 4, 3);
    assert_eq!(labels[0], labels[1]);
    assert_eq!(labels[3], labels[7]);
    // Diagonal contact does not connect.
    assert_ne!(labels[7], labels[10]);
    assert_eq!(count_components(&[false; 6], 3, 2), 0);
    assert_eq!(count_components(&[true; 6], 3, 2), 1);
}

#[test]
fn advected_stripe_travels_and_keeps_its_translation_mode() {
    let p = KlausmeierParams::standard(40.0);
    let (sys, s) = klausmeier_stripe(&p, 0.43, 2.85, None, 64).unwrap();
    assert!(!s.even && s.residual_norm <= 1e-10);
    assert!(s.c_num.abs() > 1e-4);
    let ev = stripelab_oracle::bloch_spectrum(&sys, &s, 0.0, 0.0, 6).unwrap();
    let t = ev.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    assert!(t <= 1e-8, "{t}");
    // The translation branch of the rectangular sweep starts at zero growth.
    let x = analyze_stripe(&sys, &s, &ScanSettings::default()).unwrap();
    assert!(x.zigzag_branch_max.is_finite() && x.zigzag_branch_max.abs() < 1e-2);
    assert_eq!(x.zigzag(), x.zigzag_curvature > 0.0 || x.zigzag_branch_max > UNSTABLE_TOL);
}
