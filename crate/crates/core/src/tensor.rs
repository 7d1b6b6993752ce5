//! Symmetric multilinear forms and bivariate reaction polynomials.
//!
//! Nonlinearities are supplied as polynomial coefficients; the bilinear and
//! trilinear forms used by the expansion are their unique symmetric
//! polarizations, e.g. the monomial `u v²` contributes
//! `(u₁v₂v₃ + u₂v₁v₃ + u₃v₁v₂)/3`.

use num_complex::Complex;

use crate::linalg::{CVec2, Mat2, Vec2};
use crate::scalar::Scalar;

/// Symmetric bilinear map `Q: ℝ² × ℝ² → ℝ²`, stored as `c[i][j][k]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadForm<T> {
    pub c: [[[T; 2]; 2]; 2],
}

/// Symmetric trilinear map `K: (ℝ²)³ → ℝ²`, stored as `c[i][j][k][l]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicForm<T> {
    pub c: [[[[T; 2]; 2]; 2]; 2],
}

impl<T: Scalar> QuadForm<T> {
    pub fn zero() -> Self {
        QuadForm { c: [[[T::zero(); 2]; 2]; 2] }
    }

    /// Polarization of the quadratic polynomials
    /// `Q_i[U,U] = a_i u² + b_i u v + c_i v²`, one `(a, b, c)` triple per component.
    pub fn from_monomials(coeffs: [(T, T, T); 2]) -> Self {
        let half = T::ratio(1, 2);
        let mut q = Self::zero();
        for (i, &(a, b, c)) in coeffs.iter().enumerate() {
            q.c[i][0][0] = a;
            q.c[i][0][1] = b * half;
            q.c[i][1][0] = b * half;
            q.c[i][1][1] = c;
        }
        q
    }

    pub fn eval(&self, x: Vec2<T>, y: Vec2<T>) -> Vec2<T> {
        let mut out = [T::zero(); 2];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..2 {
                for k in 0..2 {
                    *o = *o + self.c[i][j][k] * x[j] * y[k];
                }
            }
        }
        out
    }

    pub fn eval_complex(&self, x: CVec2<T>, y: CVec2<T>) -> CVec2<T> {
        let mut out = [Complex::new(T::zero(), T::zero()); 2];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..2 {
                for k in 0..2 {
                    *o = *o + x[j] * y[k] * self.c[i][j][k];
                }
            }
        }
        out
    }

    /// The linear map `v ↦ Q[x, v]`.
    pub fn partial(&self, x: Vec2<T>) -> Mat2<T> {
        let col0 = self.eval(x, [T::one(), T::zero()]);
        let col1 = self.eval(x, [T::zero(), T::one()]);
        Mat2::new(col0[0], col1[0], col0[1], col1[1])
    }

    /// Average over the two argument orders.
    pub fn symmetrized(&self) -> Self {
        let half = T::ratio(1, 2);
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out.c[i][j][k] = (self.c[i][j][k] + self.c[i][k][j]) * half;
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut out = *self;
        out.c.iter_mut().flatten().flatten().for_each(|x| *x = *x * s);
        out
    }

    pub fn max_abs(&self) -> T {
        self.c.iter().flatten().flatten().fold(T::zero(), |m, x| if x.magnitude() > m { x.magnitude() } else { m })
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().flatten().flatten().all(|x| *x == T::zero())
    }
}

impl<T: Scalar> CubicForm<T> {
    pub fn zero() -> Self {
        CubicForm { c: [[[[T::zero(); 2]; 2]; 2]; 2] }
    }

    /// Polarization of the cubic polynomials
    /// `K_i[U,U,U] = a_i u³ + b_i u²v + c_i uv² + d_i v³`.
    pub fn from_monomials(coeffs: [(T, T, T, T); 2]) -> Self {
        let third = T::ratio(1, 3);
        let mut k = Self::zero();
        for (i, &(a, b, c, d)) in coeffs.iter().enumerate() {
            for j in 0..2 {
                for l in 0..2 {
                    for m in 0..2 {
                        let nv = j + l + m;
                        k.c[i][j][l][m] = match nv {
                            0 => a,
                            1 => b * third,
                            2 => c * third,
                            _ => d,
                        };
                    }
                }
            }
        }
        k
    }

    pub fn eval(&self, x: Vec2<T>, y: Vec2<T>, z: Vec2<T>) -> Vec2<T> {
        let mut out = [T::zero(); 2];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        *o = *o + self.c[i][j][k][l] * x[j] * y[k] * z[l];
                    }
                }
            }
        }
        out
    }

    /// The linear map `v ↦ K[x, y, v]`.
    pub fn partial(&self, x: Vec2<T>, y: Vec2<T>) -> Mat2<T> {
        let col0 = self.eval(x, y, [T::one(), T::zero()]);
        let col1 = self.eval(x, y, [T::zero(), T::one()]);
        Mat2::new(col0[0], col1[0], col0[1], col1[1])
    }

    /// Average over all six argument orders.
    pub fn symmetrized(&self) -> Self {
        let sixth = T::ratio(1, 6);
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let s = self.c[i][j][k][l]
                            + self.c[i][j][l][k]
                            + self.c[i][k][j][l]
                            + self.c[i][k][l][j]
                            + self.c[i][l][j][k]
                            + self.c[i][l][k][j];
                        out.c[i][j][k][l] = s * sixth;
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> T {
        self.c.iter().flatten().flatten().flatten().fold(T::zero(), |m, x| if x.magnitude() > m { x.magnitude() } else { m })
    }
}

/// Pair of bivariate polynomials of total degree ≤ 3 in `(u, v)`.
///
/// `coeffs[i][a][b]` multiplies `u^a v^b` in component `i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReactionPoly<T> {
    pub coeffs: [[[T; 4]; 4]; 2],
}

/// Constant, linear, quadratic and cubic parts of a polynomial expanded about a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor<T> {
    pub constant: Vec2<T>,
    pub linear: Mat2<T>,
    pub quadratic: QuadForm<T>,
    pub cubic: CubicForm<T>,
}

impl<T: Scalar> ReactionPoly<T> {
    pub fn zero() -> Self {
        ReactionPoly { coeffs: [[[T::zero(); 4]; 4]; 2] }
    }

    /// Add `coef · u^a v^b` to component `i`.
    pub fn with_term(mut self, i: usize, a: usize, b: usize, coef: T) -> Self {
        assert!(a + b <= 3, "total degree is at most 3");
        self.coeffs[i][a][b] = self.coeffs[i][a][b] + coef;
        self
    }

    pub fn eval(&self, x: Vec2<T>) -> Vec2<T> {
        let mut out = [T::zero(); 2];
        for (i, o) in out.iter_mut().enumerate() {
            for a in 0..4 {
                for b in 0..4 - a {
                    *o = *o + self.coeffs[i][a][b] * pow(x[0], a) * pow(x[1], b);
                }
            }
        }
        out
    }

    /// Re-expand about `base`, i.e. the coefficients of `U ↦ f(base + U)`.
    pub fn shifted(&self, base: Vec2<T>) -> Self {
        let mut out = Self::zero();
        for i in 0..2 {
            for a in 0..4 {
                for b in 0..4 - a {
                    let c = self.coeffs[i][a][b];
                    if c == T::zero() {
                        continue;
                    }
                    // (u0 + x)^a (v0 + y)^b = Σ C(a,p) C(b,r) u0^{a-p} v0^{b-r} x^p y^r
                    for p in 0..=a {
                        for r in 0..=b {
                            let w = T::from_u64(binom(a, p) * binom(b, r)).unwrap()
                                * pow(base[0], a - p)
                                * pow(base[1], b - r);
                            out.coeffs[i][p][r] = out.coeffs[i][p][r] + c * w;
                        }
                    }
                }
            }
        }
        out
    }

    /// Constant, Jacobian, and symmetric quadratic/cubic forms at the origin.
    pub fn taylor(&self) -> Taylor<T> {
        let k = &self.coeffs;
        let comp = |i: usize| k[i];
        let linear = Mat2::new(k[0][1][0], k[0][0][1], k[1][1][0], k[1][0][1]);
        let quad = |i: usize| (comp(i)[2][0], comp(i)[1][1], comp(i)[0][2]);
        let cub = |i: usize| (comp(i)[3][0], comp(i)[2][1], comp(i)[1][2], comp(i)[0][3]);
        Taylor {
            constant: [k[0][0][0], k[1][0][0]],
            linear,
            quadratic: QuadForm::from_monomials([quad(0), quad(1)]),
            cubic: CubicForm::from_monomials([cub(0), cub(1)]),
        }
    }
}

fn pow<T: Scalar>(x: T, n: usize) -> T {
    (0..n).fold(T::one(), |acc, _| acc * x)
}

fn binom(n: usize, k: usize) -> u64 {
    const TABLE: [[u64; 4]; 4] = [[1, 0, 0, 0], [1, 1, 0, 0], [1, 2, 1, 0], [1, 3, 3, 1]];
    TABLE[n][k]
}
