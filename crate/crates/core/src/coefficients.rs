//! Nonlinear expansion coefficients, response vectors, and the leading-order stripe.
//!
//! All inverses of the singular operator `b = −kc²D + L` are reduced inverses:
//! they map the range of `b` into the complement `{w : ⟨w, E0*⟩ = 0}` and are
//! computed from the bordered system `[b, E0; E0*ᵀ, 0]`.

use num_complex::Complex;

use crate::error::{AuxOperator, Error, Result};
use crate::linalg::{add, bordered_solve, dot, scale, sub, Mat2, Vec2};
use crate::model_core::{System, TuringData};
use crate::scalar::Real;

/// Reduced inverse of a singular 2×2 operator on its range.
///
/// Returns `w` with `op·w = rhs` and `⟨w, E0*⟩ = 0`; fails when `rhs` has a
/// kernel component `⟨rhs, E0*⟩` beyond tolerance.
pub fn reduced_inverse<T: Real>(op: &Mat2<T>, rhs: Vec2<T>, e0: Vec2<T>, e0_star: Vec2<T>) -> Result<Vec2<T>> {
    let proj = dot(rhs, e0_star);
    let size = (dot(rhs, rhs) * dot(e0_star, e0_star)).sqrt();
    if !T::negligible(proj, size) {
        return Err(Error::RhsNotInRange(proj.approx_f64()));
    }
    let (w, _) = bordered_solve(op, e0, e0_star, rhs).ok_or(Error::DegenerateKernelChart {
        b1: op.0[0][0].approx_f64(),
        b1_plus_b4: op.trace().approx_f64(),
    })?;
    Ok(w)
}

/// Quadratic-order coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticCoeffs<T> {
    /// Mean-mode response `Q0 = −2 L⁻¹ Q[E0, E0]`.
    pub big_q0: Vec2<T>,
    /// Second-harmonic response `Q2 = −2 (−4kc²D + L)⁻¹ Q[E0, E0]`.
    pub big_q2: Vec2<T>,
    pub q0: T,
    pub q2: T,
    /// Triad coefficient `⟨Q[E0, E0], E0*⟩` (raw contraction).
    pub q: T,
    /// `Q1 = b⁻¹(q E0 − Q[E0, E0])` (reduced inverse).
    pub big_q1: Vec2<T>,
    pub q1: T,
    /// `Q11 = −(−2kc²D + L)⁻¹ Q[E0, E0]`.
    pub big_q11: Vec2<T>,
    pub q11: T,
}

/// Compute the quadratic-order coefficients.
pub fn quadratic_coeffs<T: Real>(sys: &System<T>, td: &TuringData<T>) -> Result<QuadraticCoeffs<T>> {
    let (e0, e0s) = (td.chart.e0, td.chart.e0_star);
    let kc_sq = td.rates.kc_sq;
    let qee = sys.q.eval(e0, e0);
    let two = T::ratio(2, 1);

    let inv = |op: Mat2<T>, which: AuxOperator| op.inverse().ok_or(Error::SingularAuxiliaryOperator(which));
    let l_inv = inv(sys.l, AuxOperator::L)?;
    let four_inv = inv(sys.real_symbol(T::ratio(4, 1) * kc_sq, T::zero()), AuxOperator::FourKc)?;
    let two_inv = inv(sys.real_symbol(two * kc_sq, T::zero()), AuxOperator::TwoKc)?;

    let big_q0 = scale(-two, l_inv.apply(qee));
    let big_q2 = scale(-two, four_inv.apply(qee));
    let q0 = dot(sys.q.eval(e0, big_q0), e0s);
    let q2 = dot(sys.q.eval(e0, big_q2), e0s);

    let q = dot(qee, e0s);
    let b = sys.real_symbol(kc_sq, T::zero());
    let big_q1 = reduced_inverse(&b, sub(scale(q, e0), qee), e0, e0s)?;
    let q1 = dot(sys.q.eval(e0, big_q1), e0s);
    let big_q11 = scale(-T::one(), two_inv.apply(qee));
    let q11 = dot(sys.q.eval(e0, big_q11), e0s);

    Ok(QuadraticCoeffs { big_q0, big_q2, q0, q2, q, big_q1, q1, big_q11, q11 })
}

/// `k0 = ⟨K[E0, E0, E0], E0*⟩` and `ρ_nl = 3k0 + 2q0 + q2`.
///
/// Fails with [`Error::SupercriticalityViolated`] unless `ρ_nl < 0`.
pub fn cubic_coeffs<T: Real>(sys: &System<T>, td: &TuringData<T>, quad: &QuadraticCoeffs<T>) -> Result<(T, T)> {
    let e0 = td.chart.e0;
    let k0 = dot(sys.k.eval(e0, e0, e0), td.chart.e0_star);
    let rho_nl = T::ratio(3, 1) * k0 + T::ratio(2, 1) * quad.q0 + quad.q2;
    if rho_nl >= T::zero() {
        return Err(Error::SupercriticalityViolated(rho_nl.approx_f64()));
    }
    Ok((k0, rho_nl))
}

/// Linear response vectors of the critical mode to the unfolding parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResponseVectors<T> {
    pub w_aalpha: Vec2<T>,
    /// Enters the profile with a factor `i`.
    pub w_abeta: Vec2<T>,
    pub w_akappa: Vec2<T>,
    pub w_abetabeta: Vec2<T>,
}

/// Compute the response vectors, with `B` evaluated at `c = −λ_β`.
pub fn response_vectors<T: Real>(sys: &System<T>, td: &TuringData<T>) -> Result<ResponseVectors<T>> {
    let (e0, e0s) = (td.chart.e0, td.chart.e0_star);
    let kc = td.kc;
    let two = T::ratio(2, 1);
    let b = sys.real_symbol(td.rates.kc_sq, T::zero());
    let adv = System::<T>::advection(td.rates.default_velocity());
    let rinv = |rhs: Vec2<T>| reduced_inverse(&b, rhs, e0, e0s);

    let me0 = sys.m.apply(e0);
    let w_aalpha = rinv(sub(scale(dot(me0, e0s), e0), me0))?;
    let be0 = adv.apply(e0);
    let w_abeta = scale(kc, rinv(sub(scale(dot(be0, e0s), e0), be0))?);
    let w_akappa = scale(two * kc, rinv(sys.diffusion().apply(e0))?);
    let bw = adv.apply(w_abeta);
    let w_abetabeta = scale(two * kc, rinv(sub(bw, scale(dot(bw, e0s), e0)))?);
    Ok(ResponseVectors { w_aalpha, w_abeta, w_akappa, w_abetabeta })
}

/// Complete coefficient set for one system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientSet<T> {
    pub quad: QuadraticCoeffs<T>,
    pub resp: ResponseVectors<T>,
    pub k0: T,
    pub rho_nl: T,
    /// `ξ = 6k0 + 2q0 + 8q11` (square lattice).
    pub xi: T,
    /// `η = 6k0 + 2q0 + 8q1` (hexagonal lattice).
    pub eta: T,
    /// Leading-order velocity parameter `c = −λ_β`.
    pub c: T,
}

impl<T: Real> CoefficientSet<T> {
    pub fn compute(sys: &System<T>, td: &TuringData<T>) -> Result<Self> {
        let quad = quadratic_coeffs(sys, td)?;
        let (k0, rho_nl) = cubic_coeffs(sys, td, &quad)?;
        let resp = response_vectors(sys, td)?;
        let (two, six, eight) = (T::ratio(2, 1), T::ratio(6, 1), T::ratio(8, 1));
        Ok(CoefficientSet {
            quad,
            resp,
            k0,
            rho_nl,
            xi: six * k0 + two * quad.q0 + eight * quad.q11,
            eta: six * k0 + two * quad.q0 + eight * quad.q1,
            c: td.rates.default_velocity(),
        })
    }

    /// Raw triad coefficient `⟨Q[E0, E0], E0*⟩`.
    pub fn q_raw(&self) -> T {
        self.quad.q
    }

    /// `ρ_β` through the response vector: `−kc⟨B w_Aβ, E0*⟩`.
    pub fn rho_beta_from_response(&self, td: &TuringData<T>) -> T {
        let adv = System::<T>::advection(self.c);
        -td.kc * td.project(adv.apply(self.resp.w_abeta))
    }

    /// `ρ_κ̃` through the response vector: `−2kc⟨D w_Aκ̃, E0*⟩`.
    pub fn rho_kappa_from_response(&self, sys: &System<T>, td: &TuringData<T>) -> T {
        -T::ratio(2, 1) * td.kc * td.project(sys.diffusion().apply(self.resp.w_akappa))
    }

    /// Stripe amplitude `A = √(−(α + ρ_ββ² + ρ_κ̃κ̃²)/ρ_nl)`, or `None` below the bifurcation surface.
    pub fn stripe_amplitude(&self, td: &TuringData<T>, alpha: T, beta: T, kappa: T) -> Option<T> {
        let r = &td.rates;
        let radicand = -(alpha + r.rho_beta * beta * beta + r.rho_kappa * kappa * kappa) / self.rho_nl;
        if radicand >= T::zero() {
            Some(radicand.sqrt())
        } else {
            None
        }
    }

    /// Leading-order velocity parameter `c = −λ_β`.
    pub fn stripe_velocity(&self) -> T {
        self.c
    }

    /// Fourier coefficients of the leading-order stripe for modes `n = 0, 1, 2`
    /// (the `n = −1, −2` ones are conjugates).
    pub fn stripe_fourier(&self, td: &TuringData<T>, a: T, mu: StripeParams<T>) -> [[Complex<T>; 2]; 3] {
        let w = &self.resp;
        let alpha_check = mu.alpha / td.rates.lambda_m;
        let re = add(
            add(td.chart.e0, scale(alpha_check, w.w_aalpha)),
            add(scale(mu.kappa, w.w_akappa), scale(mu.beta * mu.beta, w.w_abetabeta)),
        );
        let im = scale(mu.beta, w.w_abeta);
        let a2 = a * a;
        let half = T::ratio(1, 2);
        let c = |x: T, y: T| Complex::new(x, y);
        let z = T::zero();
        [
            [c(a2 * self.quad.big_q0[0], z), c(a2 * self.quad.big_q0[1], z)],
            [c(a * re[0], a * im[0]), c(a * re[1], a * im[1])],
            [c(half * a2 * self.quad.big_q2[0], z), c(half * a2 * self.quad.big_q2[1], z)],
        ]
    }

    /// Leading-order stripe profile sampled at the phases `x_grid` (one period is `2π`).
    pub fn stripe_profile(&self, td: &TuringData<T>, a: T, mu: StripeParams<T>, x_grid: &[T]) -> Vec<Vec2<T>> {
        let modes = self.stripe_fourier(td, a, mu);
        let two = T::ratio(2, 1);
        x_grid
            .iter()
            .map(|&x| {
                let mut u = [modes[0][0].re, modes[0][1].re];
                for (n, m) in modes.iter().enumerate().skip(1) {
                    let e = Complex::new(T::zero(), T::from_usize(n).unwrap() * x).exp();
                    for i in 0..2 {
                        u[i] = u[i] + two * (m[i] * e).re;
                    }
                }
                u
            })
            .collect()
    }

    /// Triad correction `p(μ₁)` on the hexagonal lattice (scaled parameters).
    pub fn p_hex(&self, sys: &System<T>, td: &TuringData<T>, beta_p: T, kappa_p: T) -> Complex<T> {
        let four = T::ratio(4, 1);
        self.p_general(sys, td, beta_p, four * kappa_p, four * kappa_p)
    }

    /// Triad correction on the quasi-hexagonal lattice with transverse detuning `ℓ̃′`.
    pub fn p_quasihex(&self, sys: &System<T>, td: &TuringData<T>, beta_p: T, kappa_p: T, ell_p: T) -> Complex<T> {
        let w_coef = T::ratio(5, 2) * kappa_p + T::ratio(3, 2) * ell_p;
        let d_coef = kappa_p + T::ratio(3, 1) * ell_p;
        self.p_general(sys, td, beta_p, w_coef, d_coef)
    }

    /// `⟨Q[iβ′w_Aβ + s w_Aκ̃, E0] − (iβ′kc B + t kc D) Q1, E0*⟩`.
    fn p_general(&self, sys: &System<T>, td: &TuringData<T>, beta_p: T, s: T, t: T) -> Complex<T> {
        let e0 = td.chart.e0;
        let kc = td.kc;
        let re_vec = sys.q.eval(scale(s, self.resp.w_akappa), e0);
        let im_vec = sys.q.eval(scale(beta_p, self.resp.w_abeta), e0);
        let adv = System::<T>::advection(self.c);
        let re_q1 = scale(t * kc, sys.diffusion().apply(self.quad.big_q1));
        let im_q1 = scale(beta_p * kc, adv.apply(self.quad.big_q1));
        Complex::new(td.project(sub(re_vec, re_q1)), td.project(sub(im_vec, im_q1)))
    }
}

/// Unscaled unfolding parameters of a stripe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripeParams<T> {
    pub alpha: T,
    pub beta: T,
    /// Wavenumber detuning `κ̃ = κ − kc`.
    pub kappa: T,
}

/// Leading-order stripe: amplitude, parameters, and velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripeAsymptotic<T> {
    pub amplitude: T,
    pub mu: StripeParams<T>,
    pub c: T,
}

impl<T: Real> StripeAsymptotic<T> {
    /// `None` when no stripe exists at `mu`.
    pub fn new(coeffs: &CoefficientSet<T>, td: &TuringData<T>, mu: StripeParams<T>) -> Option<Self> {
        coeffs
            .stripe_amplitude(td, mu.alpha, mu.beta, mu.kappa)
            .map(|amplitude| StripeAsymptotic { amplitude, mu, c: coeffs.c })
    }
}
