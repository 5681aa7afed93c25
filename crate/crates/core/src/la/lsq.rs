use super::dense::{lu_solve, DenseMatrix};
use crate::error::{Error, Result};

/// Incremental least-squares solver for `min ‖β e₁ − H y‖` with `H` upper
/// Hessenberg, fed one column at a time through plane rotations.
#[derive(Debug, Clone)]
pub struct GivensLsq {
    r_cols: Vec<Vec<f64>>,
    rotations: Vec<(f64, f64)>,
    g: Vec<f64>,
}

impl GivensLsq {
    pub fn new(beta: f64) -> Self {
        GivensLsq {
            r_cols: Vec::new(),
            rotations: Vec::new(),
            g: vec![beta],
        }
    }

    pub fn len(&self) -> usize {
        self.r_cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_cols.is_empty()
    }

    /// Appends Hessenberg column `k` (entries `0..=k+1`) and returns the new
    /// least-squares residual norm.
    pub fn push_column(&mut self, col: &[f64]) -> f64 {
        let k = self.r_cols.len();
        assert!(col.len() >= k + 2, "column {k} needs {} entries", k + 2);
        let mut c = col[..k + 2].to_vec();
        for (i, &(cs, sn)) in self.rotations.iter().enumerate() {
            let (a, b) = (c[i], c[i + 1]);
            c[i] = cs * a + sn * b;
            c[i + 1] = -sn * a + cs * b;
        }
        let (a, b) = (c[k], c[k + 1]);
        let r = a.hypot(b);
        let (cs, sn) = if r == 0.0 { (1.0, 0.0) } else { (a / r, b / r) };
        c[k] = r;
        c.truncate(k + 1);
        self.rotations.push((cs, sn));
        self.r_cols.push(c);
        let gk = self.g[k];
        self.g[k] = cs * gk;
        self.g.push(-sn * gk);
        self.residual()
    }

    pub fn residual(&self) -> f64 {
        self.g.last().copied().unwrap_or(0.0).abs()
    }

    /// Back-substitutes for the coefficients of the first `k` columns.
    pub fn solve_prefix(&self, k: usize) -> Result<Vec<f64>> {
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = self.g[i];
            for (j, yj) in y.iter().enumerate().skip(i + 1) {
                s -= self.r_cols[j][i] * yj;
            }
            let d = self.r_cols[i][i];
            if d == 0.0 {
                return Err(Error::Breakdown(format!("zero diagonal in rotated column {i}")));
            }
            y[i] = s / d;
        }
        Ok(y)
    }

    pub fn solve(&self) -> Result<Vec<f64>> {
        self.solve_prefix(self.r_cols.len())
    }
}

/// Minimizes `‖β e₁ − H y‖` for an `(m+1) × m` upper-Hessenberg `H`, returning
/// the coefficients and the attained residual norm.
pub fn hessenberg_least_squares(h: &DenseMatrix, beta: f64) -> Result<(Vec<f64>, f64)> {
    let m = h.cols();
    if h.rows() != m + 1 {
        return Err(Error::Dimension { expected: m + 1, got: h.rows() });
    }
    if m > 0 && h[(0, 0)] == 0.0 && h[(1, 0)] == 0.0 {
        return Err(Error::Breakdown("leading Hessenberg column is zero".into()));
    }
    let mut lsq = GivensLsq::new(beta);
    for j in 0..m {
        let col: Vec<f64> = (0..j + 2).map(|i| h[(i, j)]).collect();
        lsq.push_column(&col);
    }
    let y = lsq.solve()?;
    Ok((y, lsq.residual()))
}

/// Returns `f = H⁻ᵀ e_d` for a square `H` (real, so the adjoint is the transpose).
pub fn adjoint_solve_last_column(h: &DenseMatrix) -> Result<Vec<f64>> {
    if !h.is_square() {
        return Err(Error::InvalidArgument("adjoint solve needs a square matrix".into()));
    }
    let d = h.rows();
    let mut e = vec![0.0; d];
    if d == 0 {
        return Ok(e);
    }
    e[d - 1] = 1.0;
    lu_solve(&h.transpose(), &e).map_err(|_| {
        Error::Singular(format!("H_{{{d},{d}}} is singular; reduce the polynomial degree"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_by_one_exact() {
        let h = DenseMatrix::from_rows(&[&[2.0], &[0.0]]);
        let (y, res) = hessenberg_least_squares(&h, 1.0).unwrap();
        assert_eq!(y, vec![0.5]);
        assert_eq!(res, 0.0);
    }

    #[test]
    fn column_orthogonal_to_e1() {
        let h = DenseMatrix::from_rows(&[&[0.0], &[1.0]]);
        let (y, res) = hessenberg_least_squares(&h, 1.0).unwrap();
        assert_eq!(y, vec![0.0]);
        assert!((res - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_leading_column_is_breakdown() {
        let h = DenseMatrix::from_rows(&[&[0.0], &[0.0]]);
        assert!(matches!(hessenberg_least_squares(&h, 1.0), Err(Error::Breakdown(_))));
    }

    fn random_hessenberg(rng: &mut ChaCha8Rng, m: usize) -> DenseMatrix {
        DenseMatrix::from_fn(m + 1, m, |i, j| {
            if i <= j + 1 {
                rng.random_range(-1.0..1.0)
            } else {
                0.0
            }
        })
    }

    #[test]
    fn matches_normal_equations_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hessenberg(&mut rng, 4);
        let beta = 1.7;
        let (y, res) = hessenberg_least_squares(&h, beta).unwrap();

        // oracle: (HᵀH) y = Hᵀ (β e₁)
        let ht = h.transpose();
        let hth = ht.matmul(&h);
        let mut rhs = vec![0.0; 4];
        for (j, r) in rhs.iter_mut().enumerate() {
            *r = h[(0, j)] * beta;
        }
        let y_ref = lu_solve(&hth, &rhs).unwrap();
        for (a, b) in y.iter().zip(&y_ref) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
        }
        let mut r = h.matvec(&y_ref);
        r[0] -= beta;
        let res_ref = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((res - res_ref).abs() <= 1e-12 * res_ref.max(1e-300));
    }

    #[test]
    fn residual_is_monotone_as_columns_arrive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hessenberg(&mut rng, 12);
        let mut lsq = GivensLsq::new(1.0);
        let mut prev = 1.0;
        for j in 0..12 {
            let col: Vec<f64> = (0..j + 2).map(|i| h[(i, j)]).collect();
            let r = lsq.push_column(&col);
            assert!(r <= prev * (1.0 + 1e-15));
            prev = r;
        }
    }

    #[test]
    fn adjoint_identity_and_diagonal() {
        let f = adjoint_solve_last_column(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(f, vec![0.0, 0.0, 1.0]);
        let f = adjoint_solve_last_column(&DenseMatrix::from_diag(&[2.0, 4.0])).unwrap();
        assert_eq!(f, vec![0.0, 0.25]);
    }

    #[test]
    fn adjoint_random_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = DenseMatrix::from_fn(6, 6, |i, j| {
            rng.random_range(-1.0..1.0) + if i == j { 4.0 } else { 0.0 }
        });
        let f = adjoint_solve_last_column(&h).unwrap();
        let r = h.transpose().matvec(&f);
        let fnorm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (i, ri) in r.iter().enumerate() {
            let target = if i == 5 { 1.0 } else { 0.0 };
            assert!((ri - target).abs() <= 1e-12 * fnorm);
        }
    }

    #[test]
    fn adjoint_singular_errors() {
        let h = DenseMatrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(matches!(adjoint_solve_last_column(&h), Err(Error::Singular(_))));
    }
}
