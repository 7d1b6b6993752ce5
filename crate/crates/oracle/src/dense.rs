//! Thin wrappers over the dense linear algebra backend.
//!
//! Both routines are deterministic: partial-pivoting LU and a Hessenberg/Schur
//! based nonsymmetric eigensolver with fixed iteration caps.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;

use crate::error::{OracleError, Result};

/// Solve `a x = b` for a square real matrix.
pub fn lu_solve(a: &Mat<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.nrows();
    debug_assert_eq!(b.len(), n);
    let rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
    let x = a.partial_piv_lu().solve(&rhs);
    let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    out.iter().all(|v| v.is_finite()).then_some(out)
}

/// Solve `a x = b` for a square complex matrix.
pub fn lu_solve_complex(a: &Mat<Complex64>, b: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = a.nrows();
    let rhs = Mat::<Complex64>::from_fn(n, 1, |i, _| b[i]);
    let x = a.partial_piv_lu().solve(&rhs);
    let out: Vec<Complex64> = (0..n).map(|i| x[(i, 0)]).collect();
    out.iter().all(|v| v.re.is_finite() && v.im.is_finite()).then_some(out)
}

/// All eigenvalues of a square complex matrix.
pub fn eigenvalues(a: &Mat<Complex64>) -> Result<Vec<Complex64>> {
    let ev = a.eigenvalues().map_err(|_| OracleError::EigensolveFailure(a.nrows()))?;
    if ev.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(OracleError::EigensolveFailure(a.nrows()));
    }
    Ok(ev)
}
