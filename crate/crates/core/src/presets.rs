//! Ready-made systems: a designed normal-form example and the extended
//! Klausmeier vegetation model.

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::model_core::{System, SystemSpec};
use crate::scalar::{Real, Scalar};
use crate::tensor::{CubicForm, QuadForm, ReactionPoly};

/// Designed example with quadratic prefactor `eps`:
///
/// ```text
/// u_t = Δu    + 3u  − v    + α̌(u + 4v)    + β u_x + ε(u² + v²/4) − uv²
/// v_t = 7/2Δv + 14u − 7/2v + α̌(−u/5 + v)          + ε(u² + v²/4) + uv²
/// ```
pub fn designed_example<T: Scalar>(eps: T) -> SystemSpec<T> {
    let r = |n, d| T::ratio(n, d);
    let quad = (eps, T::zero(), eps * r(1, 4));
    SystemSpec {
        diffusion: [T::one(), r(7, 2)],
        linear: Some(Mat2::new(r(3, 1), r(-1, 1), r(14, 1), r(-7, 2))),
        unfolding: Mat2::new(T::one(), r(4, 1), r(-1, 5), T::one()),
        quadratic: Some(QuadForm::from_monomials([quad, quad])),
        cubic: Some(CubicForm::from_monomials([
            (T::zero(), T::zero(), -T::one(), T::zero()),
            (T::zero(), T::zero(), T::one(), T::zero()),
        ])),
        reaction: None,
    }
}

/// Parameters of the extended Klausmeier model
/// `u_t = dΔu + βu_x + a − u − uv²`, `v_t = Δv − mv + uv²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Klausmeier<T> {
    pub a: T,
    pub m: T,
    pub d: T,
}

impl<T: Real> Klausmeier<T> {
    /// The standard parameters `m = 0.45`, `d = 500` at rainfall `a`.
    pub fn standard(a: T) -> Self {
        Klausmeier { a, m: T::ratio(45, 100), d: T::ratio(500, 1) }
    }

    /// Reaction polynomial in the original `(u, v)` variables.
    pub fn reaction(&self) -> ReactionPoly<T> {
        ReactionPoly::zero()
            .with_term(0, 0, 0, self.a)
            .with_term(0, 1, 0, -T::one())
            .with_term(0, 1, 2, -T::one())
            .with_term(1, 0, 1, -self.m)
            .with_term(1, 1, 2, T::one())
    }

    /// Vegetated steady state with the larger `v`, `v = (a + √(a² − 4m²))/(2m)`, `u = m/v`.
    ///
    /// Requires `a ≥ 2m`.
    pub fn vegetated_state(&self) -> Option<Vec2<T>> {
        let two = T::ratio(2, 1);
        let disc = self.a * self.a - two * two * self.m * self.m;
        if disc < T::zero() {
            return None;
        }
        let v = (self.a + disc.sqrt()) / (two * self.m);
        Some([self.m / v, v])
    }

    /// System specification expanded about the vegetated state.
    pub fn spec(&self) -> Result<SystemSpec<T>> {
        let base = self
            .vegetated_state()
            .ok_or(Error::Incomplete("rainfall below 2m: no vegetated steady state"))?;
        Ok(SystemSpec {
            diffusion: [self.d, T::one()],
            linear: None,
            unfolding: Mat2::identity(),
            quadratic: None,
            cubic: None,
            reaction: Some((self.reaction(), base)),
        })
    }

    pub fn system(&self) -> Result<System<T>> {
        self.spec()?.validate()
    }

    /// Minimum over `s = k²` of `det(−sD + L(a))`; negative means Turing-unstable.
    pub fn turing_margin(&self) -> Option<T> {
        let sys = self.system().ok()?;
        let (a1, _, _, a4) = sys.l.entries();
        let [d1, d2] = sys.d;
        let lin = d1 * a4 + d2 * a1;
        if lin <= T::zero() {
            return Some(sys.l.det());
        }
        Some(sys.l.det() - lin * lin / (T::ratio(4, 1) * d1 * d2))
    }

    /// Rainfall `a` at the Turing onset of the vegetated state, by bisection
    /// on the sign of [`Self::turing_margin`] in `[lo, hi]`.
    pub fn turing_onset(m: T, d: T, lo: T, hi: T) -> Option<T> {
        let f = |a: T| Klausmeier { a, m, d }.turing_margin();
        let (mut lo, mut hi) = (lo, hi);
        let (flo, fhi) = (f(lo)?, f(hi)?);
        if flo * fhi > T::zero() {
            return None;
        }
        let lo_negative = flo < T::zero();
        for _ in 0..200 {
            let mid = (lo + hi) / T::ratio(2, 1);
            let fm = f(mid)?;
            if (fm < T::zero()) == lo_negative {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= T::epsilon() * (T::one() + hi.abs()) {
                break;
            }
        }
        Some((lo + hi) / T::ratio(2, 1))
    }
}
