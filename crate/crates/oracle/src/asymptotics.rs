//! Comparison of oracle spectra with the closed-form centre-manifold blocks,
//! and calibration of the triad-coefficient convention.
//!
//! A scenario fixes scaled parameters `(α′, β′, κ̃′)` and a lattice. For each
//! `ε` the quadratic term of the base system is scaled by `ε`, the unscaled
//! parameters `α = ε²α′`, `β = εβ′`, `κ = kc + εκ̃′` are formed, a stripe is
//! computed by Newton, and the `2j` lattice eigenvalues nearest zero are paired
//! with the analytic block eigenvalues. The remainder is `O(ε³)` when the
//! analytic blocks are right, so the observed order must be at least `2.5`.

use itertools::Itertools;
use num_complex::Complex64;
use stripelab_core::coefficients::CoefficientSet;
use stripelab_core::lattice_blocks::{
    block_l1, block_l2_hex, block_l2_quasihex, block_l2_square, AmplitudeCheck, EllBranch, ScaledParams,
};
use stripelab_core::{OmegaParam, System64};

use crate::error::{OracleError, Result};
use crate::spectrum::{bloch_spectrum, lattice_linearization, LatticeSpec};
use crate::stripe::{solve_stripe_with, SolveOptions, StripeGuess};

/// Which lattice a scenario perturbs on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScenarioLattice {
    /// One-dimensional perturbations (`n₂ = 0` only): `{0, 2ρ_nlA²}`.
    Stripe,
    /// Rectangle with `ℓ = kc + εℓ̃′`.
    Square { ell_p: f64 },
    Hexagonal,
    /// Quasi-hexagonal detuning chosen by `θ ∈ (0, 1]`.
    QuasiHexagonal { theta: f64 },
}

/// A comparison scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub lattice: ScenarioLattice,
    pub alpha_p: f64,
    pub beta_p: f64,
    pub kappa_p: f64,
    /// Factor applied to the triad coefficient `q` in the analytic block.
    pub q_factor: f64,
}

impl Scenario {
    /// Names accepted by [`Scenario::by_name`].
    pub const NAMES: [&'static str; 4] = ["stripe", "square", "hex", "quasihex"];

    /// Default scenarios. The quasi-hexagonal one has `β′ = 0`: off the
    /// hexagonal point the oracle's triad modes carry an `O(ε²)` Doppler
    /// detuning that the leading-order block does not contain.
    pub fn by_name(name: &str) -> Option<Self> {
        let (lattice, alpha_p, beta_p, kappa_p) = match name {
            "stripe" => (ScenarioLattice::Stripe, 1.0, 0.5, 0.3),
            "square" => (ScenarioLattice::Square { ell_p: 0.0 }, 1.0, 0.5, 0.3),
            "hex" => (ScenarioLattice::Hexagonal, 1.0, 0.5, 0.3),
            "quasihex" => (ScenarioLattice::QuasiHexagonal { theta: 1.0 }, 1.0, 0.0, 0.3),
            _ => return None,
        };
        Some(Scenario { name: name.to_string(), lattice, alpha_p, beta_p, kappa_p, q_factor: 1.0 })
    }

    fn critical_count(&self) -> usize {
        match self.lattice {
            ScenarioLattice::Stripe => 2,
            ScenarioLattice::Square { .. } => 4,
            _ => 6,
        }
    }
}

/// Oracle discretization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleSettings {
    /// Stripe truncation `N`.
    pub n: usize,
    /// Lattice truncation `N_lat`.
    pub n_lat: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings { n: 32, n_lat: 8 }
    }
}

/// Comparison at one `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsRecord {
    pub eps: f64,
    /// Oracle critical eigenvalues, in the order of `analytic`.
    pub oracle: Vec<Complex64>,
    /// Analytic eigenvalues (translation first).
    pub analytic: Vec<f64>,
    /// `|oracle − analytic|` per pair.
    pub errors: Vec<f64>,
    /// Largest error over the nontrivial (non-translation) eigenvalues.
    pub max_error: f64,
    pub translation_abs: f64,
    /// Distance from the analytic set to the nearest unselected oracle eigenvalue.
    pub gap: f64,
    pub newton_iterations: usize,
    pub residual: f64,
}

/// Result of an `ε` sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub scenario: Scenario,
    pub records: Vec<EpsRecord>,
    /// Observed orders from successive `ε` pairs.
    pub orders: Vec<f64>,
    /// Smallest successive order.
    pub observed_order: f64,
    /// Largest translation eigenvalue modulus over the sweep.
    pub max_translation: f64,
    pub pass: bool,
}

/// Required convergence order.
pub const REQUIRED_ORDER: f64 = 2.5;

/// Sweep `ε` and compare oracle and analytic critical eigenvalues.
pub fn compare_asymptotics(
    base: &System64,
    scenario: &Scenario,
    eps_list: &[f64],
    settings: OracleSettings,
) -> Result<ConvergenceReport> {
    if eps_list.len() < 2 || eps_list.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
        return Err(OracleError::InvalidInput("ε list must be positive, strictly decreasing, with ≥ 2 entries".into()));
    }
    let records = eps_list
        .iter()
        .map(|&eps| compare_at(base, scenario, eps, settings))
        .collect::<Result<Vec<_>>>()?;
    let orders: Vec<f64> = records
        .windows(2)
        .map(|w| (w[0].max_error / w[1].max_error).ln() / (w[0].eps / w[1].eps).ln())
        .collect();
    let observed_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let max_translation = records.iter().map(|r| r.translation_abs).fold(0.0, f64::max);
    Ok(ConvergenceReport {
        scenario: scenario.clone(),
        pass: observed_order >= REQUIRED_ORDER && max_translation <= 1e-8,
        records,
        orders,
        observed_order,
        max_translation,
    })
}

fn compare_at(base: &System64, scenario: &Scenario, eps: f64, settings: OracleSettings) -> Result<EpsRecord> {
    let sys = base.with_quadratic_scaled(eps);
    let td = sys.linear_coeffs()?;
    let mut coeffs = CoefficientSet::compute(&sys, &td)?;
    coeffs.quad.q *= scenario.q_factor;
    let r = &td.rates;
    let (alpha, beta, kappa_t) = (eps * eps * scenario.alpha_p, eps * scenario.beta_p, eps * scenario.kappa_p);
    let kappa = td.kc + kappa_t;
    let a = coeffs
        .stripe_amplitude(&td, alpha, beta, kappa_t)
        .ok_or(OracleError::Core(stripelab_core::Error::NoStripe))?;
    let mu = ScaledParams { alpha: scenario.alpha_p, beta: scenario.beta_p, kappa: scenario.kappa_p };
    let a_p = a / eps;
    let l1 = block_l1(&coeffs, a).eigenvalues;
    let mut analytic = vec![l1.1, l1.0];
    let lattice = match scenario.lattice {
        ScenarioLattice::Stripe => None,
        ScenarioLattice::Square { ell_p } => {
            let b = block_l2_square(&coeffs, &td, a_p, mu, ell_p, eps, AmplitudeCheck::Strict)?;
            analytic.extend([b.eigenvalues.0, b.eigenvalues.1]);
            Some(LatticeSpec::rectangle(kappa, td.kc + eps * ell_p, settings.n_lat))
        }
        ScenarioLattice::Hexagonal => {
            let b = block_l2_hex(&coeffs, &sys, &td, a_p, mu, eps, AmplitudeCheck::Strict)?;
            analytic.extend([b.eigenvalues.0, b.eigenvalues.1, b.eigenvalues.0, b.eigenvalues.1]);
            Some(LatticeSpec::hexagonal(kappa, settings.n_lat))
        }
        ScenarioLattice::QuasiHexagonal { theta } => {
            let om = OmegaParam::new(&td, scenario.kappa_p, theta, EllBranch::HexContinuation)?;
            let b = block_l2_quasihex(&coeffs, &sys, &td, a_p, mu, om.ell, eps, AmplitudeCheck::Strict)?;
            analytic.extend([b.eigenvalues.0, b.eigenvalues.1, b.eigenvalues.0, b.eigenvalues.1]);
            Some(LatticeSpec::detuned_quasihexagonal(kappa, td.kc, eps * om.ell, settings.n_lat))
        }
    };
    let alpha_check = alpha / r.lambda_m;
    let opts = SolveOptions::with_n(settings.n);
    let stripe = solve_stripe_with(&sys, alpha_check, beta, kappa, StripeGuess::Asymptotic, &opts)?;
    let (eigs, translation_abs) = match lattice {
        Some(lattice) => {
            let spec = lattice_linearization(&sys, &stripe, &lattice)?;
            (spec.eigenvalues, spec.translation_eigenvalue_abs)
        }
        // One-dimensional perturbations: the `n₂ = 0` Bloch block on its own.
        None => {
            let mut ev = bloch_spectrum(&sys, &stripe, 0.0, 0.0, settings.n_lat)?;
            ev.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
            let t = ev[0].norm();
            (ev, t)
        }
    };
    let count = scenario.critical_count();
    debug_assert_eq!(analytic.len(), count);
    let critical: Vec<Complex64> = eigs.iter().take(count).copied().collect();

    // Pair by the permutation minimizing the largest distance.
    let mut best: Option<(f64, Vec<usize>)> = None;
    for perm in (0..count).permutations(count) {
        let d = perm
            .iter()
            .enumerate()
            .map(|(i, &p)| (critical[p] - analytic[i]).norm())
            .fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, perm));
        }
    }
    let (distance, perm) = best.expect("at least one permutation");
    let oracle: Vec<Complex64> = perm.iter().map(|&p| critical[p]).collect();
    let errors: Vec<f64> = oracle.iter().zip(&analytic).map(|(o, a)| (o - a).norm()).collect();
    let gap = eigs[count..]
        .iter()
        .map(|z| analytic.iter().map(|a| (z - a).norm()).fold(f64::INFINITY, f64::min))
        .fold(f64::INFINITY, f64::min);
    if gap < 10.0 * distance {
        return Err(OracleError::MatchingFailure { eps, gap, distance });
    }
    let max_error = errors[1..].iter().copied().fold(0.0, f64::max);
    Ok(EpsRecord {
        eps,
        oracle,
        analytic,
        errors,
        max_error,
        translation_abs,
        gap,
        newton_iterations: stripe.iterations,
        residual: stripe.residual_norm,
    })
}

/// Outcome of the calibration.
#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    /// Factor `γ_cal` on the raw triad coefficient.
    pub gamma: f64,
    /// Reports for every candidate, in the order of [`CALIBRATION_CANDIDATES`].
    pub reports: Vec<ConvergenceReport>,
}

/// Candidate factors on the raw triad coefficient.
pub const CALIBRATION_CANDIDATES: [f64; 2] = [1.0, 0.5];

/// Run the hexagonal comparison with each candidate factor on `q` and return
/// the unique one that achieves the required order.
pub fn calibrate_q_convention(base: &System64, eps_list: &[f64], settings: OracleSettings) -> Result<Calibration> {
    let q_raw = {
        let sys = base.with_quadratic_scaled(eps_list.first().copied().unwrap_or(1.0));
        let td = sys.linear_coeffs()?;
        CoefficientSet::compute(&sys, &td)?.q_raw()
    };
    let gammas = CALIBRATION_CANDIDATES.to_vec();
    if q_raw == 0.0 {
        return Err(OracleError::CalibrationAmbiguous { gammas, orders: vec![f64::NAN; 2] });
    }
    let base_scenario = Scenario::by_name("hex").expect("built-in scenario");
    let reports = gammas
        .iter()
        .map(|&g| compare_asymptotics(base, &Scenario { q_factor: g, ..base_scenario.clone() }, eps_list, settings))
        .collect::<Result<Vec<_>>>()?;
    let passing: Vec<f64> = gammas.iter().zip(&reports).filter(|(_, r)| r.pass).map(|(g, _)| *g).collect();
    if passing.len() != 1 {
        return Err(OracleError::CalibrationAmbiguous {
            gammas,
            orders: reports.iter().map(|r| r.observed_order).collect(),
        });
    }
    Ok(Calibration { gamma: passing[0], reports })
}
