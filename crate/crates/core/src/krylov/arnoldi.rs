use crate::error::{Error, Result};
use crate::la::{cgs_orthogonalize, norm2, normalize, DenseMatrix};
use crate::operators::LinearOperator;

/// `h_{j+1,j}` at or below this fraction of `‖A v_j‖` counts as breakdown.
pub const BREAKDOWN_TOL: f64 = 1e-14;

/// `A V_k = V_{k+1} H` with `H` of size `(k+1) × k`.
///
/// After a breakdown the last row of `H` is zero and `basis` holds only `k`
/// vectors.
#[derive(Debug, Clone)]
pub struct ArnoldiFactorization {
    pub basis: Vec<Vec<f64>>,
    pub h: DenseMatrix,
    pub beta: f64,
    pub breakdown: bool,
}

impl ArnoldiFactorization {
    /// Number of Arnoldi steps taken.
    pub fn steps(&self) -> usize {
        self.h.cols()
    }

    /// Leading `k × k` block of `H`.
    pub fn h_square(&self) -> DenseMatrix {
        let k = self.steps();
        self.h.top_left(k, k)
    }

    /// `h_{k+1,k}`, zero after breakdown.
    pub fn h_next(&self) -> f64 {
        let k = self.steps();
        if k == 0 {
            0.0
        } else {
            self.h[(k, k - 1)]
        }
    }
}

/// One Arnoldi step on the last basis vector. Returns the new column of `H`
/// (length `len + 1`) and whether the step broke down; on breakdown no
/// vector is appended and the final entry is zero.
pub(crate) fn arnoldi_step(
    op: &dyn LinearOperator,
    basis: &mut Vec<Vec<f64>>,
    reorth: bool,
) -> (Vec<f64>, bool) {
    let mut w = op.apply_vec(basis.last().expect("nonempty basis"));
    let anorm = norm2(&w);
    let mut col = cgs_orthogonalize(basis, &mut w, reorth);
    let hn = norm2(&w);
    if hn <= BREAKDOWN_TOL * anorm || hn == 0.0 || !hn.is_finite() {
        col.push(0.0);
        return (col, true);
    }
    crate::la::scale(1.0 / hn, &mut w);
    basis.push(w);
    col.push(hn);
    (col, false)
}

pub(crate) fn assemble_hessenberg(cols: &[Vec<f64>]) -> DenseMatrix {
    let k = cols.len();
    let mut h = DenseMatrix::zeros(k + 1, k);
    for (j, c) in cols.iter().enumerate() {
        for (i, &v) in c.iter().enumerate() {
            h[(i, j)] = v;
        }
    }
    h
}

/// `m` steps of Arnoldi from `v0` with classical Gram–Schmidt, optionally
/// with one reorthogonalization pass.
pub fn arnoldi(
    op: &dyn LinearOperator,
    v0: &[f64],
    m: usize,
    reorth: bool,
) -> Result<ArnoldiFactorization> {
    if v0.len() != op.dim() {
        return Err(Error::Dimension {
            expected: op.dim(),
            got: v0.len(),
        });
    }
    let mut v = v0.to_vec();
    let beta = normalize(&mut v);
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::ZeroVector);
    }
    let mut basis = vec![v];
    let mut cols = Vec::with_capacity(m);
    let mut breakdown = false;
    for _ in 0..m {
        let (col, broke) = arnoldi_step(op, &mut basis, reorth);
        cols.push(col);
        if broke {
            breakdown = true;
            break;
        }
    }
    Ok(ArnoldiFactorization {
        basis,
        h: assemble_hessenberg(&cols),
        beta,
        breakdown,
    })
}
