use num_complex::Complex64;

use super::arnoldi::ArnoldiFactorization;
use crate::error::{Error, Result};
use crate::la::{adjoint_solve_last_column, eig_small_dense, norm2};
use crate::operators::LinearOperator;
use crate::polyprec::PreconditionerPolynomial;

/// Eigenvalues of `H_kk + h²_{k+1,k} f e_kᵀ` with `H_kkᵀ f = e_k`: the roots
/// of the GMRES residual polynomial of the same Krylov space.
pub fn harmonic_ritz_values(f: &ArnoldiFactorization) -> Result<Vec<Complex64>> {
    let k = f.steps();
    if k == 0 {
        return Err(Error::Degenerate("empty Arnoldi factorization".into()));
    }
    let mut m = f.h_square();
    let h = f.h_next();
    if h != 0.0 {
        let fv = adjoint_solve_last_column(&m)?;
        for (i, v) in fv.iter().enumerate() {
            m[(i, k - 1)] += h * h * v;
        }
    }
    eig_small_dense(&m)
}

/// Eigenvalues of `H_kk`.
pub fn ritz_values(f: &ArnoldiFactorization) -> Result<Vec<Complex64>> {
    if f.steps() == 0 {
        return Err(Error::Degenerate("empty Arnoldi factorization".into()));
    }
    eig_small_dense(&f.h_square())
}

/// `‖A y_j − θ_j y_j‖ / ‖y_j‖` for `y_j = Π_{i≠j}(I − A/θ_i) b`, the
/// harmonic Ritz vector of root `j` in product form.
pub fn harmonic_ritz_residual(
    j: usize,
    poly: &PreconditionerPolynomial,
    op: &dyn LinearOperator,
    b: &[f64],
) -> Result<f64> {
    let theta = poly.roots()[j].value;
    let (yr, yi) = poly.product_without(j, op, b);
    let ny = norm2(&yr).hypot(norm2(&yi));
    if ny == 0.0 || !ny.is_finite() {
        return Err(Error::Degenerate(format!("product-form vector for root {theta} vanished")));
    }
    let ayr = op.apply_vec(&yr);
    let mut rr = vec![0.0; b.len()];
    let mut ri = vec![0.0; b.len()];
    if theta.im == 0.0 {
        for k in 0..b.len() {
            rr[k] = ayr[k] - theta.re * yr[k];
        }
    } else {
        let ayi = op.apply_vec(&yi);
        for k in 0..b.len() {
            rr[k] = ayr[k] - (theta.re * yr[k] - theta.im * yi[k]);
            ri[k] = ayi[k] - (theta.re * yi[k] + theta.im * yr[k]);
        }
    }
    Ok(norm2(&rr).hypot(norm2(&ri)) / ny)
}
