//! Centre-manifold linearization blocks of a stripe on 1D, square, hexagonal,
//! and quasi-hexagonal lattices.
//!
//! Scaled quantities carry a prime: `α = ε²α′`, `β = εβ′`, `κ̃ = εκ̃′`,
//! `ℓ̃ = εℓ̃′`, `A = εA′`. Every block is `O(ε²)`.

use num_complex::Complex;

use crate::coefficients::CoefficientSet;
use crate::error::{Error, Result};
use crate::model_core::{System, TuringData};
use crate::scalar::Real;

/// Which block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    /// Stripe modes `e_{±1}` (pitchfork block).
    L1,
    /// Transverse modes on a square lattice.
    L2Square,
    /// Triad modes `(2, −3)` on the hexagonal lattice.
    L2Hex,
    /// Triad modes on a quasi-hexagonal (rhombic) lattice.
    L2QuasiHex,
}

/// Scaled unfolding parameters `μ′ = (α′, β′, κ̃′)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledParams<T> {
    pub alpha: T,
    pub beta: T,
    pub kappa: T,
}

/// What to do when the supplied amplitude is off the stripe branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AmplitudeCheck {
    /// Fail with [`Error::InconsistentAmplitude`].
    Strict,
    /// Proceed and set [`LatticeBlock::amplitude_off_branch`].
    Warn,
}

/// A 2×2 block with its eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeBlock<T> {
    pub kind: BlockKind,
    pub entries: [[Complex<T>; 2]; 2],
    /// `(λ−, λ+)`, both real.
    pub eigenvalues: (T, T),
    /// Eigenvalues written through the closed-form formula (after substituting the amplitude equation).
    pub lemma_form: (T, T),
    /// Leading-order eigenvalues under the small-quadratic-term scaling, when defined.
    pub reduced_form: Option<(T, T)>,
    /// Scaling order of the block (`2` for `ε²`).
    pub order: u32,
    pub eps: T,
    pub amplitude_off_branch: bool,
}

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn creal<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Residual of the scaled amplitude equation `α′ + ρ_ββ′² + ρ_κ̃κ̃′² + ρ_nl A′²`.
fn amplitude_residual<T: Real>(coeffs: &CoefficientSet<T>, td: &TuringData<T>, a_p: T, mu: ScaledParams<T>) -> T {
    let r = &td.rates;
    mu.alpha + r.rho_beta * mu.beta * mu.beta + r.rho_kappa * mu.kappa * mu.kappa + coeffs.rho_nl * a_p * a_p
}

fn check_amplitude<T: Real>(
    coeffs: &CoefficientSet<T>,
    td: &TuringData<T>,
    a_p: T,
    mu: ScaledParams<T>,
    check: AmplitudeCheck,
) -> Result<bool> {
    let res = amplitude_residual(coeffs, td, a_p, mu);
    let off = res.abs() > T::from_f64(1e-8).unwrap();
    if off && check == AmplitudeCheck::Strict {
        let expected = coeffs
            .stripe_amplitude(td, mu.alpha, mu.beta, mu.kappa)
            .unwrap_or(T::nan());
        return Err(Error::InconsistentAmplitude { given: a_p.approx_f64(), expected: expected.approx_f64() });
    }
    Ok(off)
}

/// Leading-order amplitude `Ã′ = √(−(α′ + ρ_ββ′² + ρ_κ̃κ̃′²)/(3k0))` (`NaN` below onset).
pub fn reduced_amplitude<T: Real>(coeffs: &CoefficientSet<T>, td: &TuringData<T>, mu: ScaledParams<T>) -> T {
    let r = &td.rates;
    (-(mu.alpha + r.rho_beta * mu.beta * mu.beta + r.rho_kappa * mu.kappa * mu.kappa) / (T::ratio(3, 1) * coeffs.k0))
        .sqrt()
}

/// Pitchfork block `A² ρ_nl [[1, 1], [1, 1]]` (unscaled amplitude).
pub fn block_l1<T: Real>(coeffs: &CoefficientSet<T>, a: T) -> LatticeBlock<T> {
    let v = a * a * coeffs.rho_nl;
    let e = creal(v);
    let ev = (T::zero().min(T::ratio(2, 1) * v), T::zero().max(T::ratio(2, 1) * v));
    LatticeBlock {
        kind: BlockKind::L1,
        entries: [[e, e], [e, e]],
        eigenvalues: ev,
        lemma_form: ev,
        reduced_form: None,
        order: 2,
        eps: T::one(),
        amplitude_off_branch: false,
    }
}

/// Square-lattice block with transverse detuning `ℓ̃′`.
pub fn block_l2_square<T: Real>(
    coeffs: &CoefficientSet<T>,
    td: &TuringData<T>,
    a_p: T,
    mu: ScaledParams<T>,
    ell_p: T,
    eps: T,
    check: AmplitudeCheck,
) -> Result<LatticeBlock<T>> {
    let off = check_amplitude(coeffs, td, a_p, mu, check)?;
    let r = &td.rates;
    let e2 = eps * eps;
    let diag = e2 * (mu.alpha + r.rho_kappa * ell_p * ell_p + a_p * a_p * coeffs.xi);
    let q = &coeffs.quad;
    let lemma = e2
        * (a_p * a_p * (T::ratio(3, 1) * coeffs.k0 - q.q2 + T::ratio(8, 1) * q.q11) - r.rho_beta * mu.beta * mu.beta
            + r.rho_kappa * (ell_p * ell_p - mu.kappa * mu.kappa));
    let two = T::ratio(2, 1);
    let reduced = e2
        * (-mu.alpha - two * r.rho_beta * mu.beta * mu.beta
            + r.rho_kappa * (ell_p * ell_p - two * mu.kappa * mu.kappa));
    Ok(LatticeBlock {
        kind: BlockKind::L2Square,
        entries: [[creal(diag), czero()], [czero(), creal(diag)]],
        eigenvalues: (diag, diag),
        lemma_form: (lemma, lemma),
        reduced_form: Some((reduced, reduced)),
        order: 2,
        eps,
        amplitude_off_branch: off,
    })
}

/// Hexagonal-lattice block in the ordering `(2, −3)`.
pub fn block_l2_hex<T: Real>(
    coeffs: &CoefficientSet<T>,
    sys: &System<T>,
    td: &TuringData<T>,
    a_p: T,
    mu: ScaledParams<T>,
    eps: T,
    check: AmplitudeCheck,
) -> Result<LatticeBlock<T>> {
    let p = coeffs.p_hex(sys, td, mu.beta, mu.kappa);
    let quarter = T::ratio(1, 4);
    let lambda_p = mu.alpha + quarter * td.rates.rho_beta * mu.beta * mu.beta + td.rates.rho_kappa * mu.kappa * mu.kappa;
    let mut blk = triad_block(coeffs, td, a_p, mu, eps, lambda_p, coeffs.eta, T::zero(), p, check)?;
    blk.kind = BlockKind::L2Hex;
    Ok(blk)
}

/// Quasi-hexagonal block with transverse detuning `ℓ̃′` (hexagonal at `ℓ̃′ = κ̃′`).
pub fn block_l2_quasihex<T: Real>(
    coeffs: &CoefficientSet<T>,
    sys: &System<T>,
    td: &TuringData<T>,
    a_p: T,
    mu: ScaledParams<T>,
    ell_p: T,
    eps: T,
    check: AmplitudeCheck,
) -> Result<LatticeBlock<T>> {
    let p = coeffs.p_quasihex(sys, td, mu.beta, mu.kappa, ell_p);
    let r = &td.rates;
    let s = mu.kappa + T::ratio(3, 1) * ell_p;
    let lambda_p = mu.alpha + T::ratio(1, 4) * r.rho_beta * mu.beta * mu.beta + r.rho_kappa / T::ratio(16, 1) * s * s;
    let omega = omega_prime(td, mu.kappa, ell_p);
    let mut blk = triad_block(coeffs, td, a_p, mu, eps, lambda_p, coeffs.eta, omega, p, check)?;
    blk.kind = BlockKind::L2QuasiHex;
    Ok(blk)
}

/// `ω′ = (9ℓ̃′ + 15κ̃′)(ℓ̃′ − κ̃′) ρ_κ̃ / 16`.
pub fn omega_prime<T: Real>(td: &TuringData<T>, kappa_p: T, ell_p: T) -> T {
    (T::ratio(9, 1) * ell_p + T::ratio(15, 1) * kappa_p) * (ell_p - kappa_p) * td.rates.rho_kappa / T::ratio(16, 1)
}

#[allow(clippy::too_many_arguments)]
fn triad_block<T: Real>(
    coeffs: &CoefficientSet<T>,
    td: &TuringData<T>,
    a_p: T,
    mu: ScaledParams<T>,
    eps: T,
    lambda_p: T,
    eta: T,
    omega: T,
    p: Complex<T>,
    check: AmplitudeCheck,
) -> Result<LatticeBlock<T>> {
    let off = check_amplitude(coeffs, td, a_p, mu, check)?;
    let e2 = eps * eps;
    let a = e2 * (lambda_p + a_p * a_p * eta);
    let b = (creal(T::ratio(2, 1) * a_p * coeffs.quad.q / eps) + p * a_p) * e2;
    let bb = b.norm();

    let q = &coeffs.quad;
    let r = &td.rates;
    let three_quarters = T::ratio(3, 4);
    let lemma_center = e2
        * (a_p * a_p * (T::ratio(3, 1) * coeffs.k0 - q.q2 + T::ratio(8, 1) * q.q1)
            - three_quarters * r.rho_beta * mu.beta * mu.beta
            + omega);

    // The closed-form eigenvalue expression carries `A′|2q/ε + A′p|`, i.e. `A′²p` where the
    // matrix has `A′p`; the two differ only at O(ε³).
    let lemma_half = e2 * a_p * (creal(T::ratio(2, 1) * q.q / eps) + p * a_p).norm();
    let at = reduced_amplitude(coeffs, td, mu);
    let reduced = if at.is_finite() {
        let center = e2
            * (T::ratio(3, 1) * coeffs.k0 * at * at - three_quarters * r.rho_beta * mu.beta * mu.beta + omega);
        let half_width = e2 * T::ratio(2, 1) * at * (q.q / eps).abs();
        Some((center - half_width, center + half_width))
    } else {
        None
    };

    Ok(LatticeBlock {
        kind: BlockKind::L2Hex,
        entries: [[creal(a), b], [b.conj(), creal(a)]],
        eigenvalues: (a - bb, a + bb),
        lemma_form: (lemma_center - lemma_half, lemma_center + lemma_half),
        reduced_form: reduced,
        order: 2,
        eps,
        amplitude_off_branch: off,
    })
}

/// Branch of the quadratic `ω′(ℓ̃′) = −θρ_κ̃κ̃′²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EllBranch {
    /// Root that tends to the hexagonal point `ℓ̃ = κ̃` as `θ → 0` (default).
    HexContinuation,
    /// The other root, `ℓ̃ = κ̃(−1 − 4√(1−θ))/3`.
    Far,
}

/// Parametrization `ω = −θ ρ_κ̃ κ̃²`, `θ ∈ (0, 1]`, of the quasi-hex detuning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaParam<T> {
    pub theta: T,
    pub omega: T,
    /// The detuning `ℓ̃` realizing `ω`.
    pub ell: T,
    pub branch: EllBranch,
}

impl<T: Real> OmegaParam<T> {
    /// Both roots give the same `ω` and hence the same leading-order eigenvalues.
    pub fn new(td: &TuringData<T>, kappa: T, theta: T, branch: EllBranch) -> Result<Self> {
        if !(theta > T::zero() && theta <= T::one()) {
            return Err(Error::ThetaOutOfRange(theta.approx_f64()));
        }
        let root = (T::one() - theta).sqrt() * T::ratio(4, 1);
        let sign = match branch {
            EllBranch::HexContinuation => T::one(),
            EllBranch::Far => -T::one(),
        };
        Ok(OmegaParam {
            theta,
            omega: -theta * td.rates.rho_kappa * kappa * kappa,
            ell: kappa * (-T::one() + sign * root) / T::ratio(3, 1),
            branch,
        })
    }
}
