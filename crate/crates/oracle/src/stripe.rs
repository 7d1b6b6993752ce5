//! Stripes by Newton iteration on a one-dimensional Fourier–Galerkin
//! discretization in the comoving frame.
//!
//! A stripe with wavenumber `κ` is written `u(x) = Σ_{|n|≤N} U_n e^{inκx}` with
//! `U_{−n} = conj(U_n)`. In the frame moving with velocity `βc` the Fourier
//! coefficients satisfy
//!
//! `F_n = S(nκ) U_n + Σ_{a+b=n} Q[U_a, U_b] + Σ_{a+b+d=n} K[U_a, U_b, U_d] = 0`
//!
//! with the symbol `S(k) = −k²D + L + α̌M + ikβB(c)`. For `β ≠ 0` the unknowns
//! are the coefficients and `c`, closed by the phase gauge `Im U_{1,0} = 0`.
//! For `β = 0` the velocity drops out; the problem is then posed on the even
//! (real-coefficient) subspace, which also removes the translation freedom.

use faer::Mat;
use num_complex::Complex64;
use stripelab_core::coefficients::{CoefficientSet, StripeParams};
use stripelab_core::{CubicForm, QuadForm, System64};

use crate::dense::lu_solve;
use crate::error::{OracleError, Result};

pub(crate) type C = Complex64;
pub(crate) type CVec = [C; 2];
pub(crate) type CMat = [[C; 2]; 2];

const ZERO: C = C { re: 0.0, im: 0.0 };
const ZV: CVec = [ZERO; 2];
const ZM: CMat = [[ZERO; 2]; 2];

/// A converged stripe.
#[derive(Clone, Debug, PartialEq)]
pub struct StripeSolution {
    /// Nonlinear wavenumber.
    pub kappa: f64,
    /// Velocity parameter: the frame moves with velocity `β c_num`.
    pub c_num: f64,
    pub alpha_check: f64,
    pub beta: f64,
    /// Coefficients for `n = −N..N`, stored at index `n + N`.
    pub fourier_coeffs: Vec<CVec>,
    /// Discrete ℓ² norm of the residual over all modes.
    pub residual_norm: f64,
    /// Truncation order.
    pub n: usize,
    pub iterations: usize,
    /// Ratio of the last two Newton step norms (`0` when a single step sufficed).
    pub final_contraction: f64,
    /// Whether the solution was computed on the even subspace (`β = 0`).
    pub even: bool,
}

impl StripeSolution {
    /// Coefficient of mode `n` (zero beyond the truncation).
    pub fn coeff(&self, n: isize) -> CVec {
        let big = self.n as isize;
        if n.abs() > big {
            ZV
        } else {
            self.fourier_coeffs[(n + big) as usize]
        }
    }

    /// Euclidean norm of the first harmonic `U_1`.
    pub fn first_harmonic_norm(&self) -> f64 {
        let u = self.coeff(1);
        (u[0].norm_sqr() + u[1].norm_sqr()).sqrt()
    }

    /// Profile value at `x`.
    pub fn eval(&self, x: f64) -> [f64; 2] {
        let mut out = [0.0; 2];
        let big = self.n as isize;
        for n in -big..=big {
            let e = C::from_polar(1.0, n as f64 * self.kappa * x);
            let u = self.coeff(n);
            for i in 0..2 {
                out[i] += (u[i] * e).re;
            }
        }
        out
    }

    /// Same stripe on a different truncation (zero-padded or cut).
    pub fn resized(&self, n: usize) -> Self {
        let coeffs = (-(n as isize)..=n as isize).map(|j| self.coeff(j)).collect();
        StripeSolution { fourier_coeffs: coeffs, n, ..self.clone() }
    }

    /// Multiplication operators `M_d = 2Q[U_d, ·] + 3K[P_d, ·]` of the
    /// linearization, `P_d = Σ_{a+b=d} U_a ⊗ U_b`, for `|d| ≤ 2N`.
    pub fn coupling(&self, sys: &System64) -> Coupling {
        let t = Tensors::new(sys);
        let p = pair_products(&self.fourier_coeffs, self.n);
        let mats = (0..p.len())
            .map(|idx| {
                let d = idx as isize - 2 * self.n as isize;
                let qm = t.quad_matrix(self.coeff(d));
                let km = t.cubic_matrix(&p[idx]);
                let mut m = ZM;
                for i in 0..2 {
                    for j in 0..2 {
                        m[i][j] = qm[i][j] * 2.0 + km[i][j] * 3.0;
                    }
                }
                m
            })
            .collect();
        Coupling { max_shift: 2 * self.n, mats }
    }
}

/// Multiplication operators of a stripe, indexed by harmonic shift.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    pub max_shift: usize,
    mats: Vec<CMat>,
}

impl Coupling {
    /// `M_d` (zero beyond `max_shift`).
    pub fn get(&self, d: isize) -> CMat {
        if d.unsigned_abs() > self.max_shift {
            ZM
        } else {
            self.mats[(d + self.max_shift as isize) as usize]
        }
    }

    /// The coupling of the trivial state.
    pub fn zero(max_shift: usize) -> Self {
        Coupling { max_shift, mats: vec![ZM; 2 * max_shift + 1] }
    }
}

/// Where the Newton iteration starts.
#[derive(Clone, Copy, Debug)]
pub enum StripeGuess<'a> {
    /// Leading-order stripe from the centre-manifold coefficients; needs the
    /// system to be at a Turing point.
    Asymptotic,
    /// Weakly nonlinear guess built from the critical mode of the symbol at
    /// the requested parameters; works away from the Turing point.
    Local,
    /// Continuation from a nearby converged stripe.
    Warm(&'a StripeSolution),
}

/// Newton settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Truncation order `N` (at least 8).
    pub n: usize,
    pub max_iter: usize,
    /// Residual tolerance in the discrete ℓ² norm.
    pub tol: f64,
    /// Re-solve at `2N` and fail if the first harmonic moves by more than `1e-8`.
    pub check_truncation: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { n: 32, max_iter: 40, tol: 1e-10, check_truncation: false }
    }
}

impl SolveOptions {
    pub fn with_n(n: usize) -> Self {
        SolveOptions { n, ..Self::default() }
    }
}

/// Stripe with `N = n` from the leading-order guess (falling back to the local one).
pub fn solve_stripe_1d(sys: &System64, alpha_check: f64, beta: f64, kappa: f64, n: usize) -> Result<StripeSolution> {
    let opts = SolveOptions::with_n(n);
    match solve_stripe_with(sys, alpha_check, beta, kappa, StripeGuess::Asymptotic, &opts) {
        Err(OracleError::Core(_)) => solve_stripe_with(sys, alpha_check, beta, kappa, StripeGuess::Local, &opts),
        other => other,
    }
}

/// Stripe from an explicit starting point.
pub fn solve_stripe_with(
    sys: &System64,
    alpha_check: f64,
    beta: f64,
    kappa: f64,
    guess: StripeGuess<'_>,
    opts: &SolveOptions,
) -> Result<StripeSolution> {
    if opts.n < 8 {
        return Err(OracleError::InvalidInput(format!("truncation N = {} is below 8", opts.n)));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(OracleError::InvalidInput(format!("wavenumber κ = {kappa} must be positive")));
    }
    let (coeffs, c0) = match guess {
        StripeGuess::Asymptotic => asymptotic_guess(sys, alpha_check, beta, kappa, opts.n)?,
        StripeGuess::Local => local_guess(sys, alpha_check, beta, kappa, opts.n),
        StripeGuess::Warm(s) => (s.resized(opts.n).fourier_coeffs, s.c_num),
    };
    let g = Galerkin::new(sys, alpha_check, beta, kappa, opts.n);
    let sol = g.newton(coeffs, c0, opts)?;
    if opts.check_truncation {
        let fine = SolveOptions { n: 2 * opts.n, check_truncation: false, ..*opts };
        let g2 = Galerkin::new(sys, alpha_check, beta, kappa, fine.n);
        let s2 = g2.newton(sol.resized(fine.n).fourier_coeffs, sol.c_num, &fine)?;
        let (a, b) = (sol.coeff(1), s2.coeff(1));
        let change = ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt();
        if change > 1e-8 {
            return Err(OracleError::TruncationInsufficient { n: opts.n, change });
        }
    }
    Ok(sol)
}

fn asymptotic_guess(sys: &System64, alpha_check: f64, beta: f64, kappa: f64, n: usize) -> Result<(Vec<CVec>, f64)> {
    let td = sys.linear_coeffs()?;
    let cs = CoefficientSet::compute(sys, &td)?;
    let mu = StripeParams { alpha: alpha_check * td.rates.lambda_m, beta, kappa: kappa - td.kc };
    let r = &td.rates;
    let radicand = -(mu.alpha + r.rho_beta * beta * beta + r.rho_kappa * mu.kappa * mu.kappa) / cs.rho_nl;
    let modes = cs.stripe_fourier(&td, radicand.abs().sqrt(), mu);
    let mut v = vec![ZV; 2 * n + 1];
    for (j, m) in modes.iter().enumerate() {
        v[n + j] = *m;
        v[n - j] = [m[0].conj(), m[1].conj()];
    }
    Ok((gauge_fixed(v, n), cs.c))
}

/// Weakly nonlinear guess at the requested parameters: critical eigenvector
/// of the symbol at `κ`, slaved zeroth and second harmonics, and the Landau
/// coefficient for the amplitude.
fn local_guess(sys: &System64, alpha_check: f64, beta: f64, kappa: f64, n: usize) -> (Vec<CVec>, f64) {
    let g = Galerkin::new(sys, alpha_check, beta, kappa, n);
    let s1 = g.symbol(1, 0.0);
    let (sigma0, e, es) = top_eigen(&s1);
    // The velocity shifts the eigenvalue by iκβc exactly; make it real.
    let c = if beta != 0.0 { -sigma0.im / (kappa * beta) } else { 0.0 };
    let sigma = sigma0.re;
    let qee_bar = g.t.quad(e, conj_v(e));
    let qee = g.t.quad(e, e);
    let u0 = solve2(&g.symbol(0, c), qee_bar).map(|x| scale_v(x, C::new(-2.0, 0.0))).unwrap_or(ZV);
    let u2 = solve2(&g.symbol(2, c), qee).map(|x| scale_v(x, C::new(-1.0, 0.0))).unwrap_or(ZV);
    let cubic = g.t.cubic(e, e, conj_v(e));
    let mut rhs = [ZERO; 2];
    let q0 = g.t.quad(u0, e);
    let q2 = g.t.quad(u2, conj_v(e));
    for i in 0..2 {
        rhs[i] = cubic[i] * 3.0 + q0[i] * 2.0 + q2[i] * 2.0;
    }
    let rho = es[0] * rhs[0] + es[1] * rhs[1];
    let a2 = if rho.re != 0.0 { (sigma / rho.re).abs() } else { 0.0 };
    let a = a2.sqrt();
    let mut v = vec![ZV; 2 * n + 1];
    let put = |v: &mut Vec<CVec>, j: usize, m: CVec| {
        v[n + j] = m;
        v[n - j] = conj_v(m);
    };
    put(&mut v, 0, scale_v(u0, C::new(a2, 0.0)));
    put(&mut v, 1, scale_v(e, C::new(a, 0.0)));
    put(&mut v, 2, scale_v(u2, C::new(a2, 0.0)));
    (gauge_fixed(v, n), c)
}

/// Rotate the phase so that `U_{1,0}` is real and non-negative.
fn gauge_fixed(mut v: Vec<CVec>, n: usize) -> Vec<CVec> {
    let u10 = v[n + 1][0];
    if u10.norm() == 0.0 {
        return v;
    }
    let rot = (u10 / u10.norm()).conj();
    for j in -(n as isize)..=n as isize {
        let ph = rot.powi(j as i32);
        let idx = (j + n as isize) as usize;
        v[idx] = scale_v(v[idx], ph);
    }
    v
}

/// Eigenvalue with the largest real part of a complex 2×2 matrix, with right
/// and left eigenvectors normalized so that `Σ left_i right_i = 1`.
pub(crate) fn top_eigen(s: &CMat) -> (C, CVec, CVec) {
    let (a, b, c, d) = (s[0][0], s[0][1], s[1][0], s[1][1]);
    let half_tr = (a + d) * 0.5;
    let disc = (half_tr * half_tr - (a * d - b * c)).sqrt();
    let (l1, l2) = (half_tr + disc, half_tr - disc);
    let sigma = if l1.re >= l2.re { l1 } else { l2 };
    let pick = |x: CVec, y: CVec| if x[0].norm() + x[1].norm() >= y[0].norm() + y[1].norm() { x } else { y };
    let mut right = pick([b, sigma - a], [sigma - d, c]);
    let left = pick([c, sigma - a], [sigma - d, b]);
    if right[0].norm() + right[1].norm() == 0.0 {
        right = [C::new(1.0, 0.0), ZERO];
    }
    let nr = (right[0].norm_sqr() + right[1].norm_sqr()).sqrt();
    right = scale_v(right, C::new(1.0 / nr, 0.0));
    let pairing = left[0] * right[0] + left[1] * right[1];
    let left = if pairing.norm() > 0.0 { scale_v(left, pairing.inv()) } else { [C::new(1.0, 0.0), ZERO] };
    (sigma, right, left)
}

fn solve2(m: &CMat, r: CVec) -> Option<CVec> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.norm() == 0.0 {
        return None;
    }
    Some([(m[1][1] * r[0] - m[0][1] * r[1]) / det, (m[0][0] * r[1] - m[1][0] * r[0]) / det])
}

pub(crate) fn conj_v(x: CVec) -> CVec {
    [x[0].conj(), x[1].conj()]
}

pub(crate) fn scale_v(x: CVec, s: C) -> CVec {
    [x[0] * s, x[1] * s]
}

/// Symmetrized tensors in complex form.
pub(crate) struct Tensors {
    q: [[[f64; 2]; 2]; 2],
    k: [[[[f64; 2]; 2]; 2]; 2],
}

impl Tensors {
    pub(crate) fn new(sys: &System64) -> Self {
        let q: QuadForm<f64> = sys.q.symmetrized();
        let k: CubicForm<f64> = sys.k.symmetrized();
        Tensors { q: q.c, k: k.c }
    }

    fn quad(&self, x: CVec, y: CVec) -> CVec {
        let mut out = ZV;
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..2 {
                for k in 0..2 {
                    *o += x[j] * y[k] * self.q[i][j][k];
                }
            }
        }
        out
    }

    fn cubic(&self, x: CVec, y: CVec, z: CVec) -> CVec {
        let mut out = ZV;
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        *o += x[j] * y[k] * z[l] * self.k[i][j][k][l];
                    }
                }
            }
        }
        out
    }

    /// Matrix of `Q[x, ·]`.
    fn quad_matrix(&self, x: CVec) -> CMat {
        let mut m = ZM;
        for (i, row) in m.iter_mut().enumerate() {
            for (k, e) in row.iter_mut().enumerate() {
                *e = x[0] * self.q[i][0][k] + x[1] * self.q[i][1][k];
            }
        }
        m
    }

    /// Matrix of `K[P, ·]` for a 2-tensor `P_{jk}`.
    fn cubic_matrix(&self, p: &CMat) -> CMat {
        let mut m = ZM;
        for (i, row) in m.iter_mut().enumerate() {
            for (l, e) in row.iter_mut().enumerate() {
                for j in 0..2 {
                    for k in 0..2 {
                        *e += p[j][k] * self.k[i][j][k][l];
                    }
                }
            }
        }
        m
    }
}

/// `P_d = Σ_{a+b=d} U_a ⊗ U_b` for `d = −2N..2N` (index `d + 2N`).
fn pair_products(v: &[CVec], n: usize) -> Vec<CMat> {
    let mut p = vec![ZM; 4 * n + 1];
    for (ia, ua) in v.iter().enumerate() {
        for (ib, ub) in v.iter().enumerate() {
            let pd = &mut p[ia + ib];
            for j in 0..2 {
                for k in 0..2 {
                    pd[j][k] += ua[j] * ub[k];
                }
            }
        }
    }
    p
}

fn mat_vec(m: &CMat, x: CVec) -> CVec {
    [m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]]
}

/// The discretized stripe problem at fixed parameters.
pub(crate) struct Galerkin<'a> {
    sys: &'a System64,
    t: Tensors,
    alpha_check: f64,
    beta: f64,
    kappa: f64,
    n: usize,
}

impl<'a> Galerkin<'a> {
    pub(crate) fn new(sys: &'a System64, alpha_check: f64, beta: f64, kappa: f64, n: usize) -> Self {
        Galerkin { sys, t: Tensors::new(sys), alpha_check, beta, kappa, n }
    }

    /// `S(jκ)` in the frame with velocity parameter `c`.
    fn symbol(&self, j: isize, c: f64) -> CMat {
        let s = self.sys.symbol(j as f64 * self.kappa, 0.0, self.alpha_check, self.beta, c);
        [[s[0][0], s[0][1]], [s[1][0], s[1][1]]]
    }

    fn even(&self) -> bool {
        self.beta == 0.0
    }

    fn unknowns(&self) -> usize {
        if self.even() {
            2 * (self.n + 1)
        } else {
            4 * self.n + 3
        }
    }

    fn pack(&self, v: &[CVec], c: f64) -> Vec<f64> {
        let n = self.n;
        let mut x = Vec::with_capacity(self.unknowns());
        x.extend([v[n][0].re, v[n][1].re]);
        for j in 1..=n {
            let u = v[n + j];
            if self.even() {
                x.extend([u[0].re, u[1].re]);
            } else {
                x.extend([u[0].re, u[1].re, u[0].im, u[1].im]);
            }
        }
        if !self.even() {
            x.push(c);
        }
        x
    }

    fn unpack(&self, x: &[f64], c_even: f64) -> (Vec<CVec>, f64) {
        let n = self.n;
        let mut v = vec![ZV; 2 * n + 1];
        v[n] = [C::new(x[0], 0.0), C::new(x[1], 0.0)];
        for j in 1..=n {
            let u = if self.even() {
                let b = 2 * j;
                [C::new(x[b], 0.0), C::new(x[b + 1], 0.0)]
            } else {
                let b = 2 + 4 * (j - 1);
                [C::new(x[b], x[b + 2]), C::new(x[b + 1], x[b + 3])]
            };
            v[n + j] = u;
            v[n - j] = conj_v(u);
        }
        let c = if self.even() { c_even } else { x[4 * n + 2] };
        (v, c)
    }

    /// Residual modes `F_n` for `n = 0..N`, plus the quadratic and cubic
    /// multiplication matrices `Q[U_d, ·]`, `K[P_d, ·]` (`|d| ≤ 2N`).
    fn residual(&self, v: &[CVec], c: f64) -> (Vec<CVec>, Vec<CMat>, Vec<CMat>) {
        let n = self.n as isize;
        let p = pair_products(v, self.n);
        let qm: Vec<CMat> = (-2 * n..=2 * n)
            .map(|d| if d.abs() <= n { self.t.quad_matrix(v[(d + n) as usize]) } else { ZM })
            .collect();
        let km: Vec<CMat> = p.iter().map(|pd| self.t.cubic_matrix(pd)).collect();
        let f = (0..=n)
            .map(|j| {
                let mut out = mat_vec(&self.symbol(j, c), v[(j + n) as usize]);
                for m in -n..=n {
                    let idx = (j - m + 2 * n) as usize;
                    let um = v[(m + n) as usize];
                    // Σ_a Q[U_a, U_{j−a}] = Σ_m Q[U_{j−m}, U_m]; likewise for K.
                    let a = mat_vec(&qm[idx], um);
                    let b = mat_vec(&km[idx], um);
                    out[0] += a[0] + b[0];
                    out[1] += a[1] + b[1];
                }
                out
            })
            .collect();
        (f, qm, km)
    }

    fn residual_vector(&self, f: &[CVec], v: &[CVec]) -> Vec<f64> {
        let mut r = Vec::with_capacity(self.unknowns());
        r.extend([f[0][0].re, f[0][1].re]);
        for fj in &f[1..] {
            if self.even() {
                r.extend([fj[0].re, fj[1].re]);
            } else {
                r.extend([fj[0].re, fj[1].re, fj[0].im, fj[1].im]);
            }
        }
        if !self.even() {
            r.push(v[self.n + 1][0].im);
        }
        r
    }

    fn l2_norm(f: &[CVec]) -> f64 {
        let mut s = f[0][0].norm_sqr() + f[0][1].norm_sqr();
        for fj in &f[1..] {
            s += 2.0 * (fj[0].norm_sqr() + fj[1].norm_sqr());
        }
        s.sqrt()
    }

    fn jacobian(&self, v: &[CVec], c: f64, qm: &[CMat], km: &[CMat]) -> Mat<f64> {
        let n = self.n as isize;
        let size = self.unknowns();
        let mut jac = Mat::<f64>::zeros(size, size);
        // J_{j,m} = δ S_j + 2Q[U_{j−m}, ·] + 3K[P_{j−m}, ·] for complex U_m.
        let block = |j: isize, m: isize| -> CMat {
            let idx = (j - m + 2 * n) as usize;
            let mut b = ZM;
            for i in 0..2 {
                for k in 0..2 {
                    b[i][k] = qm[idx][i][k] * 2.0 + km[idx][i][k] * 3.0;
                }
            }
            if j == m {
                let s = self.symbol(j, c);
                for i in 0..2 {
                    for k in 0..2 {
                        b[i][k] += s[i][k];
                    }
                }
            }
            b
        };
        let even = self.even();
        let row_base = |j: isize| if j == 0 { 0 } else if even { 2 * j as usize } else { 2 + 4 * (j as usize - 1) };
        let i_unit = C::new(0.0, 1.0);
        for j in 0..=n {
            let r0 = row_base(j);
            for m in 0..=n {
                let c0 = row_base(m);
                // Derivatives with respect to the real and imaginary parts of U_m.
                let (d_re, d_im) = if m == 0 {
                    (block(j, 0), ZM)
                } else {
                    let (bp, bm) = (block(j, m), block(j, -m));
                    let mut re = ZM;
                    let mut im = ZM;
                    for i in 0..2 {
                        for k in 0..2 {
                            re[i][k] = bp[i][k] + bm[i][k];
                            im[i][k] = i_unit * (bp[i][k] - bm[i][k]);
                        }
                    }
                    (re, im)
                };
                for i in 0..2 {
                    for k in 0..2 {
                        jac[(r0 + i, c0 + k)] = d_re[i][k].re;
                        if !even && m > 0 {
                            jac[(r0 + i, c0 + 2 + k)] = d_im[i][k].re;
                        }
                        if !even && j > 0 {
                            jac[(r0 + 2 + i, c0 + k)] = d_re[i][k].im;
                            if m > 0 {
                                jac[(r0 + 2 + i, c0 + 2 + k)] = d_im[i][k].im;
                            }
                        }
                    }
                }
            }
            if !even {
                // ∂F_j/∂c = ijκβ U_j.
                let col = size - 1;
                let u = v[(j + n) as usize];
                for i in 0..2 {
                    let dc = i_unit * (j as f64 * self.kappa * self.beta) * u[i];
                    jac[(r0 + i, col)] = dc.re;
                    if j > 0 {
                        jac[(r0 + 2 + i, col)] = dc.im;
                    }
                }
            }
        }
        if !even {
            // Gauge row: Im U_{1,0}.
            jac[(size - 1, 2 + 2)] = 1.0;
        }
        jac
    }

    fn newton(&self, v0: Vec<CVec>, c0: f64, opts: &SolveOptions) -> Result<StripeSolution> {
        let mut x = self.pack(&gauge_fixed(v0, self.n), c0);
        let (mut v, mut c) = self.unpack(&x, c0);
        let (mut f, mut qm, mut km) = self.residual(&v, c);
        let mut res = Self::l2_norm(&f);
        let mut steps: Vec<f64> = Vec::new();
        let mut it = 0;
        // After the tolerance is met, one more (polishing) step is taken so
        // that converged stripes sit at round-off level.
        let mut polished = false;
        loop {
            let converged = res <= opts.tol && (self.even() || v[self.n + 1][0].im.abs() <= opts.tol);
            if converged && polished {
                break;
            }
            polished = converged;
            if it >= opts.max_iter || !res.is_finite() {
                return Err(OracleError::NewtonDiverged { iterations: it, residual: res });
            }
            it += 1;
            let jac = self.jacobian(&v, c, &qm, &km);
            let rhs: Vec<f64> = self.residual_vector(&f, &v).iter().map(|r| -r).collect();
            let dx = lu_solve(&jac, &rhs).ok_or(OracleError::SingularJacobian(it))?;
            let step_norm = dx.iter().map(|d| d * d).sum::<f64>().sqrt();
            // Backtracking on the residual norm.
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..12 {
                let xt: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + t * b).collect();
                let (vt, ct) = self.unpack(&xt, c0);
                let (ft, qt, kt) = self.residual(&vt, ct);
                let rt = Self::l2_norm(&ft);
                if rt.is_finite() && (rt < res || (t == 1.0 && rt <= opts.tol)) {
                    (x, v, c, f, qm, km, res) = (xt, vt, ct, ft, qt, kt, rt);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                if polished {
                    break;
                }
                return Err(OracleError::NewtonDiverged { iterations: it, residual: res });
            }
            if !polished {
                steps.push(step_norm * t);
            }
        }
        if res > opts.tol {
            return Err(OracleError::NewtonDiverged { iterations: it, residual: res });
        }
        let contraction = match steps.len() {
            0 | 1 => 0.0,
            k => steps[k - 1] / steps[k - 2],
        };
        let sol = StripeSolution {
            kappa: self.kappa,
            c_num: c,
            alpha_check: self.alpha_check,
            beta: self.beta,
            fourier_coeffs: v,
            residual_norm: res,
            n: self.n,
            iterations: it,
            final_contraction: contraction,
            even: self.even(),
        };
        if sol.first_harmonic_norm() < 1e-8 {
            return Err(OracleError::NoStripe);
        }
        Ok(sol)
    }
}
