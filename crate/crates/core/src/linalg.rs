//! Fixed-size 2×2 linear algebra over a generic scalar.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::scalar::Scalar;

/// A real 2-vector; component 0 is `u`, component 1 is `v`.
pub type Vec2<T> = [T; 2];

/// A complex 2-vector.
pub type CVec2<T> = [Complex<T>; 2];

/// Row-major 2×2 matrix `[[a1, a2], [a3, a4]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T>(pub [[T; 2]; 2]);

impl<T: Scalar> Mat2<T> {
    /// Matrix from its entries in reading order.
    pub fn new(a1: T, a2: T, a3: T, a4: T) -> Self {
        Mat2([[a1, a2], [a3, a4]])
    }

    /// Diagonal matrix.
    pub fn diag(d1: T, d2: T) -> Self {
        Self::new(d1, T::zero(), T::zero(), d2)
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one())
    }

    pub fn zero() -> Self {
        Self::diag(T::zero(), T::zero())
    }

    /// Entries `(a1, a2, a3, a4)` in reading order.
    pub fn entries(&self) -> (T, T, T, T) {
        (self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1])
    }

    pub fn det(&self) -> T {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.0[0][0], self.0[1][0], self.0[0][1], self.0[1][1])
    }

    pub fn scale(&self, s: T) -> Self {
        let (a, b, c, d) = self.entries();
        Self::new(a * s, b * s, c * s, d * s)
    }

    pub fn apply(&self, x: Vec2<T>) -> Vec2<T> {
        [
            self.0[0][0] * x[0] + self.0[0][1] * x[1],
            self.0[1][0] * x[0] + self.0[1][1] * x[1],
        ]
    }

    /// Inverse, or `None` when the determinant vanishes relative to the entries.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        let (a, b, c, d) = self.entries();
        let scale = a.magnitude() * d.magnitude() + b.magnitude() * c.magnitude();
        if det == T::zero() || T::negligible(det, scale) && scale != T::zero() {
            return None;
        }
        Some(Self::new(d / det, -b / det, -c / det, a / det))
    }

    /// Solve `self · x = rhs`.
    pub fn solve(&self, rhs: Vec2<T>) -> Option<Vec2<T>> {
        self.inverse().map(|inv| inv.apply(rhs))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        let (a, b, c, d) = self.entries();
        let mut m = a.magnitude();
        for x in [b, c, d] {
            if x.magnitude() > m {
                m = x.magnitude();
            }
        }
        m
    }
}

impl<T: Scalar> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b, c, d) = self.entries();
        let (e, f, g, h) = o.entries();
        Self::new(a + e, b + f, c + g, d + h)
    }
}

impl<T: Scalar> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Scalar> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let c0 = self.apply([o.0[0][0], o.0[1][0]]);
        let c1 = self.apply([o.0[0][1], o.0[1][1]]);
        Self::new(c0[0], c1[0], c0[1], c1[1])
    }
}

/// Euclidean pairing `⟨x, y⟩ = x·y` (no conjugation; vectors here are real).
pub fn dot<T: Scalar>(x: Vec2<T>, y: Vec2<T>) -> T {
    x[0] * y[0] + x[1] * y[1]
}

pub fn add<T: Scalar>(x: Vec2<T>, y: Vec2<T>) -> Vec2<T> {
    [x[0] + y[0], x[1] + y[1]]
}

pub fn sub<T: Scalar>(x: Vec2<T>, y: Vec2<T>) -> Vec2<T> {
    [x[0] - y[0], x[1] - y[1]]
}

pub fn scale<T: Scalar>(s: T, x: Vec2<T>) -> Vec2<T> {
    [s * x[0], s * x[1]]
}

/// Sesquilinear-free pairing of complex vectors with a real co-vector.
pub fn cdot<T: Scalar>(x: CVec2<T>, y: Vec2<T>) -> Complex<T> {
    x[0] * y[0] + x[1] * y[1]
}

/// Solve the bordered system
///
/// ```text
/// [ S    e  ] [w]   [rhs]
/// [ e*ᵀ  0  ] [s] = [ 0 ]
/// ```
///
/// for a singular `S` with right kernel `e` and left kernel `e*`, returning
/// `(w, s)`. The multiplier `s = ⟨rhs, e*⟩/⟨e, e*⟩` measures how far `rhs`
/// lies outside the range of `S`; `w` satisfies `⟨w, e*⟩ = 0`.
pub fn bordered_solve<T: Scalar>(
    s_op: &Mat2<T>,
    e: Vec2<T>,
    e_star: Vec2<T>,
    rhs: Vec2<T>,
) -> Option<(Vec2<T>, T)> {
    let mut a = [
        [s_op.0[0][0], s_op.0[0][1], e[0], rhs[0]],
        [s_op.0[1][0], s_op.0[1][1], e[1], rhs[1]],
        [e_star[0], e_star[1], T::zero(), T::zero()],
    ];
    // Gaussian elimination with partial pivoting on the 3×4 augmented matrix.
    for col in 0..3 {
        let mut piv = col;
        for row in col + 1..3 {
            if a[row][col].magnitude() > a[piv][col].magnitude() {
                piv = row;
            }
        }
        if a[piv][col] == T::zero() {
            return None;
        }
        a.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                let v = a[col][k];
                a[row][k] = a[row][k] - f * v;
            }
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut acc = a[row][3];
        for k in row + 1..3 {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(([x[0], x[1]], x[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn inverse_roundtrip_exact() {
        let r = |n, d| Rational64::new(n, d);
        let m = Mat2::new(r(3, 1), r(-1, 1), r(14, 1), r(-7, 2));
        let inv = m.inverse().unwrap();
        assert_eq!(m * inv, Mat2::identity());
    }

    #[test]
    fn bordered_solve_gauge_and_residual() {
        let s = Mat2::new(2.0, -1.0, 14.0, -7.0);
        let e = [-1.0 / 5f64.sqrt(), -2.0 / 5f64.sqrt()];
        let es = [-7.0 / 5f64.sqrt(), 1.0 / 5f64.sqrt()];
        // rhs in the range of S: any multiple of the first column works.
        let rhs = [2.0, 14.0];
        let (w, mult) = bordered_solve(&s, e, es, rhs).unwrap();
        assert!(mult.abs() < 1e-14);
        assert!(dot(w, es).abs() < 1e-14);
        let back = s.apply(w);
        assert!((back[0] - rhs[0]).abs() < 1e-13 && (back[1] - rhs[1]).abs() < 1e-13);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        assert!(Mat2::new(2.0, -1.0, 14.0, -7.0).inverse().is_none());
    }
}
