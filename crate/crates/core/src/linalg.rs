//! Small dense linear-algebra helpers on Hermitian systems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest and smallest eigenvalue estimates of a Hermitian positive matrix by power
/// and inverse iteration; the inverse uses `chol` when given.
pub fn extreme_eigenvalues(g: &CMatrix, chol: Option<&nalgebra::Cholesky<Complex64, nalgebra::Dyn>>) -> (f64, f64) {
    let n = g.nrows();
    if n == 0 {
        return (0.0, 0.0);
    }
    let start = CVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.37 * ((i * 7919) % 13) as f64, 0.1 * (i % 5) as f64));
    let mut v = start.normalize();
    let mut lmax = 0.0;
    for _ in 0..60 {
        let w = g * &v;
        let l = v.dotc(&w).re;
        let norm = w.norm();
        if norm == 0.0 {
            break;
        }
        v = w / Complex64::new(norm, 0.0);
        if (l - lmax).abs() <= 1e-6 * l.abs() {
            lmax = l;
            break;
        }
        lmax = l;
    }
    let lmin = match chol {
        Some(c) => {
            let mut v = start.normalize();
            let mut mu = 0.0;
            for _ in 0..60 {
                let w = c.solve(&v);
                let m = v.dotc(&w).re;
                let norm = w.norm();
                if !norm.is_finite() || norm == 0.0 {
                    break;
                }
                v = w / Complex64::new(norm, 0.0);
                if (m - mu).abs() <= 1e-6 * m.abs() {
                    mu = m;
                    break;
                }
                mu = m;
            }
            if mu > 0.0 {
                1.0 / mu
            } else {
                0.0
            }
        }
        None => 0.0,
    };
    (lmax, lmin)
}

/// Minimal-norm solution of `G x = b` for Hermitian positive semidefinite `G`,
/// discarding eigenvalues below `rel_tol · λ_max`.
pub fn pinv_solve(g: &CMatrix, b: &CVector, rel_tol: f64) -> CVector {
    let eig = g.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let q = &eig.eigenvectors;
    let coeffs = q.adjoint() * b;
    let scaled = CVector::from_fn(b.len(), |i, _| {
        let l = eig.eigenvalues[i];
        if l > rel_tol * lmax && l > 0.0 {
            coeffs[i] / l
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    q * scaled
}

/// Minimal-norm least squares `min ‖b - A x‖²`, returning `(x, residual²)`.
/// The residual is formed from the projection, not from `‖b‖² - ‖P b‖²`.
pub fn least_squares(a: &CMatrix, b: &CVector, rel_tol: f64) -> (CVector, f64) {
    if a.ncols() == 0 || a.nrows() == 0 {
        return (CVector::zeros(a.ncols()), b.norm_squared());
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut x = CVector::zeros(a.ncols());
    let mut proj = CVector::zeros(a.nrows());
    for k in 0..svd.singular_values.len() {
        let s = svd.singular_values[k];
        if s <= rel_tol * smax || s == 0.0 {
            continue;
        }
        let uk = u.column(k);
        let c = uk.dotc(b);
        proj += uk * c;
        x += vt.row(k).adjoint() * (c / s);
    }
    let r = b - proj;
    (x, r.norm_squared())
}
