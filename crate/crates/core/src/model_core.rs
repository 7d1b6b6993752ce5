//! Two-component reaction–diffusion–advection systems near a Turing point.
//!
//! The model is
//!
//! ```text
//! u_t = D Δu + L u + α̌ M u + β B(c) u_x + Q[u,u] + K[u,u,u],   B(c) = diag(1 + c, c),
//! ```
//!
//! written in a frame moving with velocity `βc` in `x`. This module holds the
//! validated system, its dispersion relation, the Turing conditions, the
//! kernel chart, and the linear rates of the critical eigenvalue.

use num_complex::Complex;

use crate::error::{Error, Result, TuringCondition};
use crate::linalg::{dot, Mat2, Vec2};
use crate::scalar::{Real, Scalar};
use crate::tensor::{CubicForm, QuadForm, ReactionPoly};

/// Raw, user-facing description of a system.
///
/// The nonlinearity may be given as tensors, as a reaction polynomial
/// expanded about a base state, or both (in which case they must agree).
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec<T> {
    /// Diagonal of the diffusion matrix `D`.
    pub diffusion: [T; 2],
    /// Linearization `L`; derived from `reaction` when absent.
    pub linear: Option<Mat2<T>>,
    /// Unfolding matrix `M` multiplying `α̌`.
    pub unfolding: Mat2<T>,
    pub quadratic: Option<QuadForm<T>>,
    pub cubic: Option<CubicForm<T>>,
    /// Reaction polynomial and the rest state about which it is expanded.
    pub reaction: Option<(ReactionPoly<T>, Vec2<T>)>,
}

/// A validated system with symmetric tensors and positive diffusion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct System<T> {
    pub d: [T; 2],
    pub l: Mat2<T>,
    pub m: Mat2<T>,
    pub q: QuadForm<T>,
    pub k: CubicForm<T>,
}

impl<T: Scalar> SystemSpec<T> {
    /// Tensor-form spec with identity unfolding.
    pub fn from_tensors(diffusion: [T; 2], linear: Mat2<T>, quadratic: QuadForm<T>, cubic: CubicForm<T>) -> Self {
        SystemSpec {
            diffusion,
            linear: Some(linear),
            unfolding: Mat2::identity(),
            quadratic: Some(quadratic),
            cubic: Some(cubic),
            reaction: None,
        }
    }

    /// Check and normalize: positive diffusion, symmetric tensors, and
    /// agreement between polynomial and tensor inputs.
    pub fn validate(&self) -> Result<System<T>> {
        let [d1, d2] = self.diffusion;
        if !(d1 > T::zero() && d2 > T::zero()) {
            return Err(Error::NonPositiveDiffusion { d1: d1.approx_f64(), d2: d2.approx_f64() });
        }

        let derived = match &self.reaction {
            Some((poly, base)) => {
                let t = poly.shifted(*base).taylor();
                let scale = poly.coeffs.iter().flatten().flatten().fold(T::one(), |m, x| {
                    if x.magnitude() > m {
                        x.magnitude()
                    } else {
                        m
                    }
                });
                for (i, c) in t.constant.iter().enumerate() {
                    if !T::negligible(*c, scale) {
                        return Err(Error::InconsistentPolynomialTensor(format!(
                            "base state is not a rest state: component {i} of f(base) = {}",
                            c.approx_f64()
                        )));
                    }
                }
                Some(t)
            }
            None => None,
        };

        let l = match (self.linear, &derived) {
            (Some(l), Some(t)) => {
                if !T::negligible((l - t.linear).max_abs(), l.max_abs()) {
                    return Err(Error::InconsistentPolynomialTensor("linear part".into()));
                }
                l
            }
            (Some(l), None) => l,
            (None, Some(t)) => t.linear,
            (None, None) => return Err(Error::Incomplete("neither a linear part nor a reaction polynomial")),
        };

        let q_in = self.quadratic.map(|q| q.symmetrized());
        let q = match (q_in, &derived) {
            (Some(q), Some(t)) => {
                let diff = sub_quad(&q, &t.quadratic);
                if !T::negligible(diff.max_abs(), q.max_abs()) {
                    return Err(Error::InconsistentPolynomialTensor("quadratic part".into()));
                }
                q
            }
            (Some(q), None) => q,
            (None, Some(t)) => t.quadratic,
            (None, None) => QuadForm::zero(),
        };

        let k_in = self.cubic.map(|k| k.symmetrized());
        let k = match (k_in, &derived) {
            (Some(k), Some(t)) => {
                let diff = sub_cubic(&k, &t.cubic);
                if !T::negligible(diff.max_abs(), k.max_abs()) {
                    return Err(Error::InconsistentPolynomialTensor("cubic part".into()));
                }
                k
            }
            (Some(k), None) => k,
            (None, Some(t)) => t.cubic,
            (None, None) => CubicForm::zero(),
        };

        // Symmetrization must not change the forms on the diagonal Q[U,U], K[U,U,U].
        if let Some(raw) = self.quadratic {
            for x in probe_vectors::<T>() {
                let (a, b) = (raw.eval(x, x), q.eval(x, x));
                if !(T::negligible(a[0] - b[0], a[0]) && T::negligible(a[1] - b[1], a[1])) {
                    return Err(Error::AsymmetricTensorBeyondSymmetrization);
                }
            }
        }
        if let Some(raw) = self.cubic {
            for x in probe_vectors::<T>() {
                let (a, b) = (raw.eval(x, x, x), k.eval(x, x, x));
                if !(T::negligible(a[0] - b[0], a[0]) && T::negligible(a[1] - b[1], a[1])) {
                    return Err(Error::AsymmetricTensorBeyondSymmetrization);
                }
            }
        }

        Ok(System { d: self.diffusion, l, m: self.unfolding, q, k })
    }
}

/// Free-function form of [`SystemSpec::validate`].
pub fn validate_system<T: Scalar>(spec: &SystemSpec<T>) -> Result<System<T>> {
    spec.validate()
}

fn probe_vectors<T: Scalar>() -> [Vec2<T>; 3] {
    [[T::one(), T::zero()], [T::zero(), T::one()], [T::ratio(3, 7), T::ratio(-5, 11)]]
}

fn sub_quad<T: Scalar>(a: &QuadForm<T>, b: &QuadForm<T>) -> QuadForm<T> {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out.c[i][j][k] = a.c[i][j][k] - b.c[i][j][k];
            }
        }
    }
    out
}

fn sub_cubic<T: Scalar>(a: &CubicForm<T>, b: &CubicForm<T>) -> CubicForm<T> {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.c[i][j][k][l] = a.c[i][j][k][l] - b.c[i][j][k][l];
                }
            }
        }
    }
    out
}

/// Complex 2×2 matrix, row-major.
pub type CMat2<T> = [[Complex<T>; 2]; 2];

impl<T: Scalar> System<T> {
    pub fn diffusion(&self) -> Mat2<T> {
        Mat2::diag(self.d[0], self.d[1])
    }

    /// Advection matrix `B(c) = diag(1 + c, c)`.
    pub fn advection(c: T) -> Mat2<T> {
        Mat2::diag(T::one() + c, c)
    }

    /// Real part of the Fourier symbol, `−s D + L + α̌ M` with `s = k² + l²`.
    pub fn real_symbol(&self, s: T, alpha_check: T) -> Mat2<T> {
        self.l - self.diffusion().scale(s) + self.m.scale(alpha_check)
    }

    /// Fourier symbol `−(k²+l²)D + L + α̌M + i k β B(c)`.
    pub fn symbol(&self, k: T, l: T, alpha_check: T, beta: T, c: T) -> CMat2<T> {
        let re = self.real_symbol(k * k + l * l, alpha_check);
        let im = Self::advection(c).scale(k * beta);
        let z = |i: usize, j: usize| Complex::new(re.0[i][j], im.0[i][j]);
        [[z(0, 0), z(0, 1)], [z(1, 0), z(1, 1)]]
    }

    /// Dispersion relation `det(symbol − λ Id)`.
    pub fn dispersion(&self, lambda: Complex<T>, k: T, l: T, alpha_check: T, beta: T, c: T) -> Complex<T> {
        let s = self.symbol(k, l, alpha_check, beta, c);
        (s[0][0] - lambda) * (s[1][1] - lambda) - s[0][1] * s[1][0]
    }

    /// Same system with the quadratic form replaced by `ε Q`.
    pub fn with_quadratic_scaled(&self, eps: T) -> Self {
        System { q: self.q.scaled(eps), ..*self }
    }

    /// `det(−s D + L)` as the coefficients `(p2, p1, p0)` of `p2 s² + p1 s + p0`.
    pub fn neutral_quadratic(&self) -> (T, T, T) {
        let [d1, d2] = self.d;
        let (a1, _, _, a4) = self.l.entries();
        (d1 * d2, -(d1 * a4 + d2 * a1), self.l.det())
    }

    /// `kc² = (d1 a4 + d2 a1)/(2 d1 d2)`.
    pub fn critical_wavenumber_sq(&self) -> Result<T> {
        let [d1, d2] = self.d;
        let (a1, _, _, a4) = self.l.entries();
        let num = d1 * a4 + d2 * a1;
        if num <= T::zero() {
            return Err(Error::NoTuringWavenumber(num.approx_f64()));
        }
        Ok(num / (T::ratio(2, 1) * d1 * d2))
    }

    /// Evaluate the three Turing conditions without failing on them.
    pub fn turing_report(&self) -> Result<TuringReport<T>> {
        let kc_sq = self.critical_wavenumber_sq()?;
        let [d1, d2] = self.d;
        let (a1, a2, a3, a4) = self.l.entries();
        let stable_at_zero = self.l.trace() < T::zero() && self.l.det() > T::zero();

        let (p2, p1, p0) = self.neutral_quadratic();
        let discriminant = p1 * p1 - T::ratio(4, 1) * p2 * p0;
        let disc_scale = p1 * p1 + (T::ratio(4, 1) * p2 * p0).magnitude();
        let double_root = T::negligible(discriminant, disc_scale);
        // Guarded scan away from the double root: the quadratic must stay positive.
        let mut positive_elsewhere = true;
        let guard = kc_sq / T::ratio(16, 1);
        for i in 0..=64 {
            let s = kc_sq * T::ratio(i, 16);
            if (s - kc_sq).magnitude() <= guard {
                continue;
            }
            if p2 * s * s + p1 * s + p0 <= T::zero() {
                positive_elsewhere = false;
            }
        }
        let critical_circle = double_root && positive_elsewhere && kc_sq > T::zero();

        let den = a1 + a4 - kc_sq * (d1 + d2);
        let dlambda_d = -den;
        let simple_root = den != T::zero() && !T::negligible(den, a1.magnitude() + a4.magnitude());

        let a2a3_residual = a2 * a3 - (a1 - kc_sq * d1) * (a4 - kc_sq * d2);
        Ok(TuringReport {
            stable_at_zero,
            critical_circle,
            simple_root,
            kc_sq,
            discriminant,
            dlambda_d,
            a2a3_residual,
        })
    }

    /// The Turing report, or the first failed condition.
    pub fn verify_turing(&self) -> Result<TuringReport<T>> {
        let r = self.turing_report()?;
        if !r.stable_at_zero {
            let witness = if self.l.trace() >= T::zero() { self.l.trace() } else { self.l.det() };
            return Err(Error::ConditionFailed { which: TuringCondition::StableAtZero, witness: witness.approx_f64() });
        }
        if !r.critical_circle {
            return Err(Error::ConditionFailed {
                which: TuringCondition::CriticalCircle,
                witness: r.discriminant.approx_f64(),
            });
        }
        if !r.simple_root {
            return Err(Error::ConditionFailed { which: TuringCondition::SimpleRoot, witness: r.dlambda_d.approx_f64() });
        }
        Ok(r)
    }

    /// Linear rates of the critical eigenvalue; exact in exact arithmetic.
    pub fn linear_rates(&self) -> Result<LinearRates<T>> {
        let r = self.verify_turing()?;
        let kc_sq = r.kc_sq;
        let [d1, d2] = self.d;
        let (a1, a2, a3, a4) = self.l.entries();
        let (m11, m12, m21, m22) = self.m.entries();
        let den = a1 + a4 - kc_sq * (d1 + d2);
        let b1 = a1 - kc_sq * d1;
        let b4 = a4 - kc_sq * d2;

        let lambda_beta = b4 / den;
        let lambda_betabeta = b1 * b4 / (den * den * den);
        if lambda_betabeta <= T::zero() {
            return Err(Error::NonPositiveLambdaBetaBeta(lambda_betabeta.approx_f64()));
        }
        let lambda_m = (m11 * b4 - m12 * a3 - m21 * a2 + m22 * b1) / den;
        if lambda_m == T::zero() {
            return Err(Error::LambdaMZero);
        }
        // ∂²_k d at (λ, k) = (0, kc): −2d1(a4 − k²d2) − 2d2(a1 − k²d1) + 8k²d1d2.
        let two = T::ratio(2, 1);
        let d2k = -two * d1 * b4 - two * d2 * b1 + T::ratio(8, 1) * kc_sq * d1 * d2;
        let rho_kappa = -d2k / (two * r.dlambda_d);
        Ok(LinearRates {
            kc_sq,
            den,
            dlambda_d: r.dlambda_d,
            lambda_beta,
            lambda_betabeta,
            lambda_m,
            rho_beta: kc_sq * lambda_betabeta,
            rho_kappa,
            unfolding_is_identity: self.m == Mat2::identity(),
        })
    }
}

/// Outcome of the three Turing conditions plus diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TuringReport<T> {
    /// `tr L < 0` and `det L > 0`.
    pub stable_at_zero: bool,
    /// `det(−sD + L)` has a double root at `s = kc² > 0` and is positive elsewhere on `s ≥ 0`.
    pub critical_circle: bool,
    /// `∂_λ d ≠ 0` at `(0, kc, 0)`.
    pub simple_root: bool,
    pub kc_sq: T,
    /// Discriminant of the quadratic `det(−sD + L)` in `s`.
    pub discriminant: T,
    /// `∂_λ d` at `(λ, k, l) = (0, kc, 0)`.
    pub dlambda_d: T,
    /// `a2 a3 − (a1 − kc² d1)(a4 − kc² d2)`, zero at a Turing point.
    pub a2a3_residual: T,
}

/// Rates of the critical eigenvalue that need only field arithmetic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearRates<T> {
    pub kc_sq: T,
    /// `a1 + a4 − kc²(d1 + d2)`.
    pub den: T,
    /// `∂_λ d = −den`.
    pub dlambda_d: T,
    pub lambda_beta: T,
    pub lambda_betabeta: T,
    /// `α = λ_M α̌`.
    pub lambda_m: T,
    /// `ρ_β = kc² λ_ββ > 0`.
    pub rho_beta: T,
    /// `ρ_κ̃ = −∂²_k d / (2 ∂_λ d) < 0`.
    pub rho_kappa: T,
    /// `M = Id` exactly (`a_M = 0`).
    pub unfolding_is_identity: bool,
}

/// Which homogeneous mode family an onset threshold refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomMode {
    /// Wavevectors `(±kc, 0)`.
    Stripe,
    /// Wavevectors `(±kc/2, ±√3 kc/2)`.
    Hex,
    /// Wavevectors `(0, ±kc)`.
    Square,
}

impl<T: Scalar> LinearRates<T> {
    /// Onset of the homogeneous instability against `mode` at advection `β`.
    pub fn hom_instability_threshold(&self, beta: T, mode: HomMode) -> T {
        let stripe = -self.kc_sq * self.lambda_betabeta * beta * beta;
        match mode {
            HomMode::Stripe => stripe,
            HomMode::Hex => stripe / T::ratio(4, 1),
            HomMode::Square => T::zero(),
        }
    }

    /// Leading-order velocity parameter `c = −λ_β`.
    pub fn default_velocity(&self) -> T {
        -self.lambda_beta
    }
}

/// Kernel and adjoint-kernel vectors of `−kc²D + L`, normalized so `⟨E0, E0*⟩ = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelChart<T> {
    pub e0: Vec2<T>,
    pub e0_star: Vec2<T>,
    /// `+1` for the canonical chart, `−1` after a simultaneous sign flip.
    pub sign: T,
}

impl<T: Real> KernelChart<T> {
    /// Simultaneous sign flip of both vectors.
    pub fn flipped(&self) -> Self {
        KernelChart { e0: [-self.e0[0], -self.e0[1]], e0_star: [-self.e0_star[0], -self.e0_star[1]], sign: -self.sign }
    }
}

/// Linear data at the Turing point needed by every later stage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TuringData<T> {
    pub rates: LinearRates<T>,
    pub kc: T,
    pub chart: KernelChart<T>,
    /// Mixed rate of the imaginary part in `α` and `β` (absent for `M = Id`).
    pub lambda_mbeta: T,
}

impl<T: Real> System<T> {
    pub fn critical_wavenumber(&self) -> Result<T> {
        self.critical_wavenumber_sq().map(|s| s.sqrt())
    }

    /// Kernel chart `E0 = (b2, −b1)/c0`, `E0* = (b3, −b1)/c0*` of `b = −kc²D + L`.
    pub fn kernel_eigenvectors(&self) -> Result<KernelChart<T>> {
        let r = self.verify_turing()?;
        let b = self.real_symbol(r.kc_sq, T::zero());
        let (b1, b2, b3, b4) = b.entries();
        let scale = b.max_abs();
        if b1 == T::zero() || T::negligible(b1, scale) || T::negligible(b1 + b4, scale) {
            return Err(Error::DegenerateKernelChart { b1: b1.approx_f64(), b1_plus_b4: (b1 + b4).approx_f64() });
        }
        let c0 = (b2 * b2 + b1 * b1).sqrt();
        let c0s = (b1 * b4 + b1 * b1) / c0;
        Ok(KernelChart { e0: [b2 / c0, -b1 / c0], e0_star: [b3 / c0s, -b1 / c0s], sign: T::one() })
    }

    /// Linear rates together with `kc`, the kernel chart and `λ_Mβ`.
    pub fn linear_coeffs(&self) -> Result<TuringData<T>> {
        let rates = self.linear_rates()?;
        let chart = self.kernel_eigenvectors()?;
        let kc = rates.kc_sq.sqrt();
        let (m11, _, _, m22) = self.m.entries();
        let lm = rates.lambda_m;
        let two = T::ratio(2, 1);
        let lambda_mbeta = if rates.unfolding_is_identity {
            T::zero()
        } else {
            kc * (m22 - lm + (two * lm - m11 - m22) * rates.lambda_beta) / (lm * rates.den)
        };
        Ok(TuringData { rates, kc, chart, lambda_mbeta })
    }

    /// The root of `d(·, k, l) = 0` closest to zero.
    pub fn critical_root(&self, k: T, l: T, alpha_check: T, beta: T, c: T) -> Complex<T> {
        let s = self.symbol(k, l, alpha_check, beta, c);
        let tr = s[0][0] + s[1][1];
        let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
        let disc = (tr * tr - det * T::ratio(4, 1)).sqrt();
        // λ_small = 2 det / (tr ± √disc), taking the larger denominator.
        let (p, m) = (tr + disc, tr - disc);
        let den = if p.norm_sqr() >= m.norm_sqr() { p } else { m };
        if den.norm_sqr() == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        det * T::ratio(2, 1) / den
    }
}

impl<T: Real> TuringData<T> {
    /// `⟨x, E0*⟩`.
    pub fn project(&self, x: Vec2<T>) -> T {
        dot(x, self.chart.e0_star)
    }

    /// Same data with the kernel chart's sign flipped.
    pub fn with_flipped_chart(&self) -> Self {
        TuringData { chart: self.chart.flipped(), ..*self }
    }
}
