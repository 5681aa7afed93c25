//! Method 3: the range-restricted GMRES polynomial in Newton form.
//!
//! The basis starts at `A·b`, so `φ₃(z) = z · Σ_k g_k w_k(z)` with
//! `w_0(z) ∝ z` and every `w_k` divisible by `z`. That makes `φ₃(0) = 0`
//! and `φ₃′(0) = 0` hold by construction rather than by a balancing root.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krylov::{arnoldi, ritz_values};
use crate::la::{axpy, dot, lu_solve, norm2, scale, DenseMatrix};
use crate::operators::LinearOperator;
use crate::polyprec::{leja_order, Preconditioner};

/// Normal-equations condition estimates above this attach a warning.
pub const NORMAL_EQUATIONS_COND_WARN: f64 = 1e14;

/// `w_{k+1} = ((A − shift)·w_k + coef·w_{k−1}) / scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Step {
    shift: f64,
    coef: f64,
    scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonPolynomial {
    /// Ritz shifts in use, Leja ordered; a trailing pair may be cut after
    /// its first member.
    shifts: Vec<Complex64>,
    s0: f64,
    steps: Vec<Step>,
    g: Vec<f64>,
    cond_estimate: f64,
    pub warnings: Vec<String>,
}

impl NewtonPolynomial {
    pub fn shifts(&self) -> &[Complex64] {
        &self.shifts
    }

    /// Newton coefficients for the normalized basis.
    pub fn coefficients(&self) -> &[f64] {
        &self.g
    }

    /// Estimated 2-norm condition number of the column-scaled normal equations.
    pub fn condition_estimate(&self) -> f64 {
        self.cond_estimate
    }

    pub fn degree(&self) -> usize {
        self.g.len() + 1
    }

    /// Runs the basis recurrence on `w0 = A v / s0`, handing each basis
    /// vector to `visit`. Uses `len(g)` matvecs.
    fn walk(&self, op: &dyn LinearOperator, v: &[f64], mut visit: impl FnMut(usize, &[f64])) {
        let n = v.len();
        let mut cur = op.apply_vec(v);
        scale(1.0 / self.s0, &mut cur);
        let mut prev = vec![0.0; n];
        let mut next = vec![0.0; n];
        visit(0, &cur);
        for (k, st) in self.steps.iter().enumerate().take(self.g.len() - 1) {
            op.apply(&cur, &mut next);
            axpy(-st.shift, &cur, &mut next);
            if st.coef != 0.0 {
                axpy(st.coef, &prev, &mut next);
            }
            scale(1.0 / st.scale, &mut next);
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
            visit(k + 1, &cur);
        }
    }

    pub fn p_apply(&self, op: &dyn LinearOperator, v: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; v.len()];
        self.walk(op, v, |k, w| axpy(self.g[k], w, &mut acc));
        acc
    }

    pub fn phi_apply(&self, op: &dyn LinearOperator, v: &[f64]) -> Vec<f64> {
        op.apply_vec(&self.p_apply(op, v))
    }

    pub fn p_eval(&self, z: Complex64) -> Complex64 {
        let mut cur = z / self.s0;
        let mut prev = Complex64::new(0.0, 0.0);
        let mut acc = cur * self.g[0];
        for (k, st) in self.steps.iter().enumerate().take(self.g.len() - 1) {
            let next = ((z - st.shift) * cur + prev * st.coef) / st.scale;
            prev = cur;
            cur = next;
            acc += cur * self.g[k + 1];
        }
        acc
    }

    pub fn phi_eval(&self, z: Complex64) -> Complex64 {
        z * self.p_eval(z)
    }
}

impl Preconditioner for NewtonPolynomial {
    fn degree(&self) -> usize {
        NewtonPolynomial::degree(self)
    }
    fn phi_apply(&self, op: &dyn LinearOperator, v: &[f64]) -> Vec<f64> {
        NewtonPolynomial::phi_apply(self, op, v)
    }
    fn p_apply(&self, op: &dyn LinearOperator, v: &[f64]) -> Vec<f64> {
        NewtonPolynomial::p_apply(self, op, v)
    }
    fn phi_eval(&self, z: Complex64) -> Complex64 {
        NewtonPolynomial::phi_eval(self, z)
    }
}

/// Extreme eigenvalue estimates of a symmetric positive definite matrix by
/// power and inverse iteration.
fn spd_condition(g: &DenseMatrix) -> f64 {
    let k = g.rows();
    let start: Vec<f64> = (0..k).map(|i| 1.0 + 0.1 * i as f64).collect();
    let unit = |v: &mut Vec<f64>| {
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= nv);
        nv
    };
    let mut v = start.clone();
    unit(&mut v);
    let mut lmax = 0.0;
    for _ in 0..60 {
        v = g.matvec(&v);
        lmax = unit(&mut v);
    }
    let mut u = start;
    unit(&mut u);
    let mut inv_lmin = 0.0;
    for _ in 0..60 {
        match lu_solve(g, &u) {
            Ok(w) => {
                u = w;
                inv_lmin = unit(&mut u);
            }
            Err(_) => return f64::INFINITY,
        }
    }
    lmax * inv_lmin
}

/// Builds the Method 3 polynomial of degree `d + 1` for start vector `b`:
/// Arnoldi(d) from `A·b` supplies Ritz shifts, the Newton basis
/// `w_k = N_k(A)·A·b` (k < d) is formed in real arithmetic, and the normal
/// equations `(AW)ᵀ(AW) g = (AW)ᵀ b` give the coefficients.
pub fn balance3(op: &dyn LinearOperator, b: &[f64], d: usize) -> Result<NewtonPolynomial> {
    if d == 0 {
        return Err(Error::InvalidArgument("balance method 3 needs d >= 1".into()));
    }
    let ab = op.apply_vec(b);
    let s0 = norm2(&ab);
    if s0 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut shifts: Vec<Complex64> = Vec::new();
    if d > 1 {
        let f = arnoldi(op, &ab, d, true)?;
        shifts = leja_order(&ritz_values(&f)?);
    }
    let cols = d.min(shifts.len() + 1);
    shifts.truncate(cols - 1);

    let mut w: Vec<Vec<f64>> = Vec::with_capacity(cols);
    let mut aw: Vec<Vec<f64>> = Vec::with_capacity(cols);
    let mut steps = Vec::with_capacity(cols.saturating_sub(1));
    let mut w0 = ab;
    scale(1.0 / s0, &mut w0);
    w.push(w0);
    let mut k = 0;
    while k + 1 < cols {
        let a_cur = op.apply_vec(&w[k]);
        let z = shifts[k];
        let pair_second = k > 0 && z.im != 0.0 && shifts[k - 1] == z.conj();
        let (shift, coef) = if z.im == 0.0 {
            (z.re, 0.0)
        } else if pair_second {
            (z.re, z.im * z.im / steps.last().map(|s: &Step| s.scale).unwrap_or(1.0))
        } else {
            (z.re, 0.0)
        };
        let mut next = a_cur.clone();
        axpy(-shift, &w[k], &mut next);
        if coef != 0.0 {
            axpy(coef, &w[k - 1], &mut next);
        }
        let sc = norm2(&next);
        aw.push(a_cur);
        if sc <= 1e-14 * norm2(&aw[k]) || !sc.is_finite() {
            // Krylov space exhausted
            break;
        }
        scale(1.0 / sc, &mut next);
        steps.push(Step {
            shift,
            coef,
            scale: sc,
        });
        w.push(next);
        k += 1;
    }
    if aw.len() < w.len() {
        aw.push(op.apply_vec(w.last().unwrap()));
    }
    let cols = w.len();
    shifts.truncate(cols - 1);

    let norms: Vec<f64> = aw.iter().map(|c| norm2(c)).collect();
    let gram = DenseMatrix::from_fn(cols, cols, |i, j| dot(&aw[i], &aw[j]) / (norms[i] * norms[j]));
    let rhs: Vec<f64> = (0..cols).map(|i| dot(&aw[i], b) / norms[i]).collect();
    let gs = lu_solve(&gram, &rhs)
        .map_err(|_| Error::Singular("Newton normal equations; reduce the degree".into()))?;
    let g: Vec<f64> = gs.iter().zip(&norms).map(|(x, nrm)| x / nrm).collect();
    let cond = spd_condition(&gram);
    let mut warnings = Vec::new();
    if cond > NORMAL_EQUATIONS_COND_WARN {
        warnings.push(format!(
            "Newton normal equations are ill conditioned (estimate {cond:.2e}); the polynomial may be inaccurate"
        ));
    }
    Ok(NewtonPolynomial {
        shifts,
        s0,
        steps,
        g,
        cond_estimate: cond,
        warnings,
    })
}
