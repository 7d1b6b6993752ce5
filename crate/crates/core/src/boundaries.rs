//! Closed-form stability boundaries, thresholds, and region classification.
//!
//! Everything here is leading order in the unscaled parameters
//! `(α, β, κ̃, q)` and depends on the system only through `ρ_β`, `ρ_κ̃`, `k0`.
//! Classification always goes through eigenvalue signs; the boundary curves
//! are emitted separately for plotting.

use rayon::prelude::*;

use crate::coefficients::CoefficientSet;
use crate::error::{Error, Result};
use crate::model_core::TuringData;
use crate::scalar::Real;

/// The three numbers that determine all leading-order boundaries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Leading<T> {
    /// `ρ_β > 0`.
    pub rho_beta: T,
    /// `ρ_κ̃ < 0`.
    pub rho_kappa: T,
    /// `k0 < 0`.
    pub k0: T,
}

impl<T: Real> Leading<T> {
    pub fn new(coeffs: &CoefficientSet<T>, td: &TuringData<T>) -> Result<Self> {
        Self::from_values(td.rates.rho_beta, td.rates.rho_kappa, coeffs.k0)
    }

    /// Requires `k0 < 0`, so that the leading-order stripe is supercritical.
    pub fn from_values(rho_beta: T, rho_kappa: T, k0: T) -> Result<Self> {
        if k0 >= T::zero() {
            return Err(Error::SupercriticalityViolated((T::ratio(3, 1) * k0).approx_f64()));
        }
        Ok(Leading { rho_beta, rho_kappa, k0 })
    }

    fn rb2(&self, beta: T) -> T {
        self.rho_beta * beta * beta
    }

    fn rk2(&self, kappa: T) -> T {
        self.rho_kappa * kappa * kappa
    }

    /// Shifted parameter `α̃ = α + ρ_ββ² + ρ_κ̃κ̃²` (zero on the bifurcation surface).
    pub fn alpha_tilde(&self, alpha: T, beta: T, kappa: T) -> T {
        alpha + self.rb2(beta) + self.rk2(kappa)
    }

    /// Bifurcation surface `B(κ̃, β) = −(ρ_κ̃κ̃² + ρ_ββ²)`.
    pub fn bifurcation_alpha(&self, kappa: T, beta: T) -> T {
        -(self.rk2(kappa) + self.rb2(beta))
    }

    /// Eckhaus boundary `E(κ̃, β) = −(3ρ_κ̃κ̃² + ρ_ββ²) ≥ B`.
    pub fn eckhaus_alpha(&self, kappa: T, beta: T) -> T {
        -(T::ratio(3, 1) * self.rk2(kappa) + self.rb2(beta))
    }

    /// Square-lattice boundary `Q(κ̃, β; ℓ̃) = −2ρ_ββ² + ρ_κ̃(ℓ̃² − 2κ̃²)`.
    pub fn square_alpha(&self, kappa: T, beta: T, ell: T) -> T {
        let two = T::ratio(2, 1);
        -two * self.rb2(beta) + self.rho_kappa * (ell * ell - two * kappa * kappa)
    }

    /// Leading-order square eigenvalue `−α − 2ρ_ββ² + ρ_κ̃(ℓ̃² − 2κ̃²)`.
    pub fn square_eigen(&self, alpha: T, beta: T, kappa: T, ell: T) -> T {
        self.square_alpha(kappa, beta, ell) - alpha
    }

    /// `Ã` from `α̃ = −3k0 Ã²`, or [`Error::NoStripe`].
    fn reduced_amplitude(&self, alpha: T, beta: T, kappa: T) -> Result<T> {
        let at = self.alpha_tilde(alpha, beta, kappa);
        if at < T::zero() {
            return Err(Error::NoStripe);
        }
        Ok((at / (-T::ratio(3, 1) * self.k0)).sqrt())
    }

    /// Hexagonal eigenvalues `3k0Ã² − ¾ρ_ββ² ± 2Ã|q|`, as `(λ−, λ+)`.
    pub fn hex_eigen_leading(&self, alpha: T, beta: T, kappa: T, q: T) -> Result<(T, T)> {
        self.triad_eigen(alpha, beta, kappa, q, T::zero())
    }

    /// Quasi-hexagonal eigenvalues `3k0Ã² + ω − ¾ρ_ββ² ± 2Ã|q|` with `ω = −θρ_κ̃κ̃²`.
    pub fn quasihex_eigen_leading(&self, alpha: T, beta: T, kappa: T, theta: T, q: T) -> Result<(T, T)> {
        check_theta(theta)?;
        self.triad_eigen(alpha, beta, kappa, q, -theta * self.rk2(kappa))
    }

    fn triad_eigen(&self, alpha: T, beta: T, kappa: T, q: T, omega: T) -> Result<(T, T)> {
        let a = self.reduced_amplitude(alpha, beta, kappa)?;
        let center = T::ratio(3, 1) * self.k0 * a * a + omega - T::ratio(3, 4) * self.rb2(beta);
        let half = T::ratio(2, 1) * a * q.abs();
        Ok((center - half, center + half))
    }

    /// Hexagonal boundaries `H±` and discriminant `δ_H`.
    pub fn hex_boundaries(&self, kappa: T, beta: T, q: T) -> PairBoundary<T> {
        let q2 = q * q;
        let delta = T::ratio(4, 1) * q2 * q2 + T::ratio(9, 1) * self.k0 * q2 * self.rb2(beta);
        let base = -T::ratio(7, 4) * self.rb2(beta) - self.rk2(kappa);
        self.pair(base, q2, delta)
    }

    /// Shifted hexagonal boundaries `H̃±(β)` in the `(β, α̃)` plane.
    pub fn hex_tilde(&self, beta: T, q: T) -> PairBoundary<T> {
        let q2 = q * q;
        let delta = T::ratio(4, 1) * q2 * q2 + T::ratio(9, 1) * self.k0 * q2 * self.rb2(beta);
        self.pair(-T::ratio(3, 4) * self.rb2(beta), q2, delta)
    }

    /// Quasi-hexagonal boundaries `M_qH±`, the `q`-independent `M_qh`, and `δ_M`.
    pub fn quasihex_boundaries(&self, kappa: T, beta: T, q: T, theta: T) -> Result<QuasiHexBoundary<T>> {
        check_theta(theta)?;
        let q2 = q * q;
        let m_qh = -T::ratio(7, 4) * self.rb2(beta) - (theta + T::one()) * self.rk2(kappa);
        let delta = T::ratio(4, 1) * q2 * q2
            + T::ratio(9, 1) * self.k0 * self.rb2(beta) * q2
            + T::ratio(12, 1) * self.k0 * theta * self.rk2(kappa) * q2;
        let pair = self.pair(m_qh, q2, delta);
        // `M_qH−` is a zero of λ+ (rather than λ−) exactly when ¾ρ_ββ² + θρ_κ̃κ̃² ≥ 0.
        let minus_is_stability_boundary = T::ratio(3, 4) * self.rb2(beta) + theta * self.rk2(kappa) >= T::zero();
        Ok(QuasiHexBoundary { m_qh, pair, minus_is_stability_boundary })
    }

    /// `base − (2q² ± √δ)/(3k0)` when `δ ≥ 0`.
    fn pair(&self, base: T, q2: T, delta: T) -> PairBoundary<T> {
        let three_k0 = T::ratio(3, 1) * self.k0;
        let two_q2 = T::ratio(2, 1) * q2;
        if delta >= T::zero() {
            let s = delta.sqrt();
            PairBoundary {
                plus: base - (two_q2 + s) / three_k0,
                minus: base - (two_q2 - s) / three_k0,
                delta,
                valid: true,
            }
        } else {
            PairBoundary { plus: T::nan(), minus: T::nan(), delta, valid: false }
        }
    }

    /// Hexagonal turning-point thresholds.
    pub fn hex_thresholds(&self, beta: T, q: T) -> HexThresholds<T> {
        let s = (-self.k0 * self.rho_beta).sqrt();
        HexThresholds {
            q_tp: T::ratio(3, 2) * beta.abs() * s,
            alpha_tp: -self.rb2(beta) / T::ratio(4, 1),
            beta_tp: T::ratio(2, 1) * q.abs() / (T::ratio(3, 1) * s),
            h_tilde: self.hex_tilde(beta, q),
        }
    }

    /// All quasi-hexagonal thresholds at `(κ̃, β, q, θ)`.
    pub fn quasihex_thresholds(&self, kappa: T, beta: T, q: T, theta: T) -> Result<ThresholdSet<T>> {
        check_theta(theta)?;
        let (k0, rb, rk) = (self.k0, self.rho_beta, self.rho_kappa);
        let (q2, b2, k2) = (q * q, beta * beta, kappa * kappa);
        let r = |n, d| T::ratio(n, d);
        let sqrt_opt = |x: T| if x >= T::zero() { Some(x.sqrt()) } else { None };
        let two_minus = r(2, 1) - theta;
        let hex = self.hex_thresholds(beta, q);

        let q_tp_theta = sqrt_opt(-r(12, 1) * k0 * theta * rk * k2 - r(9, 1) * k0 * rb * b2).map(|x| x / r(2, 1));
        let alpha_tp_theta = q_tp_theta.map(|_| -r(1, 4) * rb * b2 + (theta - T::one()) * rk * k2);
        let beta_ep = sqrt_opt(-theta * rk / (r(3, 1) * rb)).map(|x| r(2, 1) * kappa.abs() * x);
        let beta_ex = sqrt_opt(r(2, 1) / (k0 * (theta - r(2, 1)) * rb)).map(|x| r(2, 3) * q.abs() * x);
        let q_ex = sqrt_opt(-k0 * two_minus * rb / r(2, 1)).map(|x| r(3, 2) * beta.abs() * x);
        let kappa_ep = sqrt_opt(-r(3, 1) * rb / (r(4, 1) * theta * rk)).map(|x| beta.abs() * x);
        let alpha_ep = Some((r(3, 4) / theta - T::one()) * rb * b2);
        let kappa_mp =
            sqrt_opt(-r(3, 1) * rb * b2 / (r(4, 1) * theta * rk) - q2 / (r(3, 1) * k0 * theta * rk));
        let alpha_mp = kappa_mp.map(|_| {
            (r(4, 1) * q2 * (T::one() - theta) + r(3, 1) * k0 * (r(3, 1) - r(4, 1) * theta) * rb * b2)
                / (r(12, 1) * k0 * theta)
        });
        let alpha_sec = Some(-r(8, 1) * q2 / (k0 * two_minus * two_minus));
        let disc = r(16, 1) * q2 * q2 + r(18, 1) * k0 * two_minus * q2 * rb * b2;
        let alpha_sec_beta = sqrt_opt(disc).map(|s| {
            let pre = -T::one() / (r(4, 1) * k0 * two_minus * two_minus);
            let mid = r(16, 1) * q2 + k0 * rb * b2 * (r(4, 1) * theta * theta - r(25, 1) * theta + r(34, 1));
            (pre * (mid - r(4, 1) * s), pre * (mid + r(4, 1) * s))
        });

        Ok(ThresholdSet {
            q_tp: hex.q_tp,
            alpha_tp: hex.alpha_tp,
            beta_tp: hex.beta_tp,
            q_tp_theta,
            alpha_tp_theta,
            beta_ep,
            beta_ex,
            q_ex,
            kappa_ep,
            alpha_ep,
            kappa_mp,
            alpha_mp,
            alpha_sec,
            alpha_sec_beta,
        })
    }

    /// Classify one parameter point by eigenvalue signs.
    pub fn classify_point(&self, p: PointParams<T>) -> RegionLabel {
        let PointParams { alpha, beta, kappa, q, theta, ell_square } = p;
        let at = self.alpha_tilde(alpha, beta, kappa);
        if at < T::zero() {
            return RegionLabel::default();
        }
        let mut marginal = at == T::zero();
        let zigzag = kappa < T::zero();
        marginal |= kappa == T::zero();
        let e = self.eckhaus_alpha(kappa, beta);
        let eckhaus = alpha < e;
        marginal |= alpha == e;
        let sq = self.square_eigen(alpha, beta, kappa, ell_square);
        marginal |= sq == T::zero();
        let (_, hp) = self.hex_eigen_leading(alpha, beta, kappa, q).expect("stripe exists");
        marginal |= hp == T::zero();
        let qh = self
            .quasihex_eigen_leading(alpha, beta, kappa, theta, q)
            .map(|(_, p)| p)
            .unwrap_or(T::neg_infinity());
        marginal |= qh == T::zero();
        let (square, hex, quasihex) = (sq > T::zero(), hp > T::zero(), qh > T::zero());
        RegionLabel {
            exists: true,
            zigzag_unstable: zigzag,
            eckhaus_unstable: eckhaus,
            square_unstable: square,
            hex_unstable: hex,
            quasihex_unstable: quasihex,
            stable_all_checked: !(zigzag || eckhaus || square || hex || quasihex),
            marginal,
        }
    }
}

fn check_theta<T: Real>(theta: T) -> Result<()> {
    if theta > T::zero() && theta <= T::one() {
        Ok(())
    } else {
        Err(Error::ThetaOutOfRange(theta.approx_f64()))
    }
}

/// `true` iff the stripe is zigzag unstable (`κ̃ < 0`); `κ̃ = 0` is marginal and stable.
pub fn zigzag_unstable<T: Real>(kappa: T) -> bool {
    kappa < T::zero()
}

/// Pair of boundary values `base − (2q² ± √δ)/(3k0)`; `NaN` when `δ < 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairBoundary<T> {
    pub plus: T,
    pub minus: T,
    pub delta: T,
    pub valid: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasiHexBoundary<T> {
    pub m_qh: T,
    pub pair: PairBoundary<T>,
    /// Whether `M_qH−` is a sign change of the larger eigenvalue.
    pub minus_is_stability_boundary: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HexThresholds<T> {
    pub q_tp: T,
    pub alpha_tp: T,
    pub beta_tp: T,
    pub h_tilde: PairBoundary<T>,
}

/// Quasi-hexagonal thresholds; `None` where a radicand is negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdSet<T> {
    pub q_tp: T,
    pub alpha_tp: T,
    pub beta_tp: T,
    pub q_tp_theta: Option<T>,
    pub alpha_tp_theta: Option<T>,
    pub beta_ep: Option<T>,
    pub beta_ex: Option<T>,
    pub q_ex: Option<T>,
    pub kappa_ep: Option<T>,
    pub alpha_ep: Option<T>,
    pub kappa_mp: Option<T>,
    pub alpha_mp: Option<T>,
    pub alpha_sec: Option<T>,
    /// `(α_sec,β−, α_sec,β+)`.
    pub alpha_sec_beta: Option<(T, T)>,
}

/// Inputs of [`Leading::classify_point`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointParams<T> {
    pub alpha: T,
    pub beta: T,
    pub kappa: T,
    /// Effective (calibrated) triad coefficient.
    pub q: T,
    pub theta: T,
    /// Transverse detuning used for the square-lattice test.
    pub ell_square: T,
}

/// Stability flags of one parameter point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RegionLabel {
    pub exists: bool,
    pub zigzag_unstable: bool,
    pub eckhaus_unstable: bool,
    pub square_unstable: bool,
    pub hex_unstable: bool,
    pub quasihex_unstable: bool,
    pub stable_all_checked: bool,
    /// Some tested eigenvalue (or `κ̃`) is exactly zero; classified as stable.
    pub marginal: bool,
}

/// Parameter plane of a diagram, with the parameters held fixed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Plane<T> {
    /// `x = κ̃`, `y = α`.
    KappaAlpha { beta: T, q: T, theta: T, ell_square: T },
    /// `x = q`, `y = α`.
    QAlpha { kappa: T, beta: T, theta: T, ell_square: T },
    /// `x = β`, `y = α̃ = α + ρ_ββ² + ρ_κ̃κ̃²`.
    BetaAlphaTilde { kappa: T, q: T, theta: T, ell_square: T },
    /// `x = ε` (prefactor of the quadratic term), `y = α`; `q = q_unit · ε`.
    EpsilonAlpha { kappa: T, beta: T, theta: T, q_unit: T, ell_square: T },
}

/// Axis sampling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis<T> {
    pub min: T,
    pub max: T,
    pub count: usize,
}

impl<T: Real> Axis<T> {
    pub fn values(&self) -> Vec<T> {
        match self.count {
            0 => vec![],
            1 => vec![self.min],
            n => (0..n)
                .map(|i| self.min + (self.max - self.min) * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap())
                .collect(),
        }
    }
}

/// A named boundary curve, split into segments where it is defined.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline<T> {
    pub name: String,
    pub segments: Vec<Vec<(T, T)>>,
}

/// Classified grid plus boundary overlays.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagramGrid<T> {
    pub plane: Plane<T>,
    pub x: Vec<T>,
    pub y: Vec<T>,
    /// Row-major: index `j * x.len() + i` for `(x[i], y[j])`.
    pub labels: Vec<RegionLabel>,
    pub boundaries: Vec<Polyline<T>>,
}

impl<T: Real> DiagramGrid<T> {
    pub fn label(&self, i: usize, j: usize) -> RegionLabel {
        self.labels[j * self.x.len() + i]
    }
}

/// Default cap on the number of cells of a diagram.
pub const DEFAULT_CELL_CAP: u64 = 10_000_000;

impl<T: Real> Leading<T> {
    /// Point parameters at abscissa `x` and ordinate `y` of `plane`.
    pub fn plane_point(&self, plane: &Plane<T>, x: T, y: T) -> PointParams<T> {
        match *plane {
            Plane::KappaAlpha { beta, q, theta, ell_square } => {
                PointParams { alpha: y, beta, kappa: x, q, theta, ell_square }
            }
            Plane::QAlpha { kappa, beta, theta, ell_square } => {
                PointParams { alpha: y, beta, kappa, q: x, theta, ell_square }
            }
            Plane::BetaAlphaTilde { kappa, q, theta, ell_square } => PointParams {
                alpha: y - self.rb2(x) - self.rk2(kappa),
                beta: x,
                kappa,
                q,
                theta,
                ell_square,
            },
            Plane::EpsilonAlpha { kappa, beta, theta, q_unit, ell_square } => {
                PointParams { alpha: y, beta, kappa, q: q_unit * x, theta, ell_square }
            }
        }
    }

    /// Boundary ordinates at abscissa `x`: `(name, value)` with `NaN` where undefined
    /// or where the curve is not a stability boundary of an existing stripe.
    pub fn plane_boundaries(&self, plane: &Plane<T>, x: T) -> Vec<(&'static str, T)> {
        let p = self.plane_point(plane, x, T::zero());
        let shift = match plane {
            Plane::BetaAlphaTilde { .. } => self.rb2(p.beta) + self.rk2(p.kappa),
            _ => T::zero(),
        };
        let b = self.bifurcation_alpha(p.kappa, p.beta);
        let above = |v: T| if v >= b { v + shift } else { T::nan() };
        let hex = self.hex_boundaries(p.kappa, p.beta, p.q);
        let qh = self.quasihex_boundaries(p.kappa, p.beta, p.q, p.theta).expect("θ validated by caller");
        let qh_minus = if qh.minus_is_stability_boundary { qh.pair.minus } else { T::nan() };
        vec![
            ("bifurcation", b + shift),
            ("eckhaus", self.eckhaus_alpha(p.kappa, p.beta) + shift),
            ("square", above(self.square_alpha(p.kappa, p.beta, p.ell_square))),
            ("hex_plus", above(hex.plus)),
            ("hex_minus", above(hex.minus)),
            ("quasihex_plus", above(qh.pair.plus)),
            ("quasihex_minus", above(qh_minus)),
        ]
    }

    /// Classify a rectangular grid and sample the boundary curves over its abscissae.
    pub fn diagram_grid(&self, plane: Plane<T>, xs: Axis<T>, ys: Axis<T>, cap: u64) -> Result<DiagramGrid<T>> {
        let cells = xs.count as u64 * ys.count as u64;
        if cells > cap {
            return Err(Error::GridTooFine { cells, cap });
        }
        let theta = match plane {
            Plane::KappaAlpha { theta, .. }
            | Plane::QAlpha { theta, .. }
            | Plane::BetaAlphaTilde { theta, .. }
            | Plane::EpsilonAlpha { theta, .. } => theta,
        };
        check_theta(theta)?;
        let x = xs.values();
        let y = ys.values();
        let nx = x.len();
        let labels: Vec<RegionLabel> = (0..nx * y.len())
            .into_par_iter()
            .map(|idx| self.classify_point(self.plane_point(&plane, x[idx % nx], y[idx / nx])))
            .collect();

        let mut boundaries: Vec<Polyline<T>> = Vec::new();
        for &xi in &x {
            for (k, (name, v)) in self.plane_boundaries(&plane, xi).into_iter().enumerate() {
                if boundaries.len() <= k {
                    boundaries.push(Polyline { name: name.to_string(), segments: vec![vec![]] });
                }
                let segs = &mut boundaries[k].segments;
                if v.is_finite() {
                    segs.last_mut().unwrap().push((xi, v));
                } else if !segs.last().unwrap().is_empty() {
                    segs.push(vec![]);
                }
            }
        }
        for b in &mut boundaries {
            b.segments.retain(|s| !s.is_empty());
        }
        Ok(DiagramGrid { plane, x, y, labels, boundaries })
    }
}
