use super::arnoldi::{arnoldi_step, assemble_hessenberg, ArnoldiFactorization};
use super::report::{CycleRecord, SolveReport};
use crate::error::{Error, Result};
use crate::la::{axpy, norm2, scale, sub_into, work_counts, GivensLsq};
use crate::operators::LinearOperator;

/// Relative residual change over a whole cycle below which a restarted run
/// is declared stagnated.
pub const STAGNATION_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct GmresCycle {
    pub x: Vec<f64>,
    /// Shortcut residual norms, starting with `‖r₀‖`, one per iteration.
    pub resnorms: Vec<f64>,
    pub factorization: ArnoldiFactorization,
}

#[derive(Debug, Clone, Copy)]
pub struct CycleOptions {
    /// End the cycle once the shortcut residual drops to this value.
    pub stop_below: f64,
    pub reorth: bool,
    /// End the cycle once `op.matvecs()` reaches this value.
    pub matvec_limit: u64,
}

impl Default for CycleOptions {
    fn default() -> Self {
        Self {
            stop_below: 0.0,
            reorth: true,
            matvec_limit: u64::MAX,
        }
    }
}

/// One GMRES(m) cycle from `x0`.
pub fn gmres_cycle(op: &dyn LinearOperator, b: &[f64], x0: &[f64], m: usize) -> Result<GmresCycle> {
    gmres_cycle_with(op, b, x0, m, &CycleOptions::default())
}

pub fn gmres_cycle_with(
    op: &dyn LinearOperator,
    b: &[f64],
    x0: &[f64],
    m: usize,
    opts: &CycleOptions,
) -> Result<GmresCycle> {
    let n = op.dim();
    if b.len() != n || x0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: if b.len() != n { b.len() } else { x0.len() },
        });
    }
    if m == 0 {
        return Err(Error::InvalidArgument("GMRES cycle length must be at least 1".into()));
    }
    let mut r = b.to_vec();
    if x0.iter().any(|&v| v != 0.0) {
        let ax = op.apply_vec(x0);
        sub_into(b, &ax, &mut r);
    }
    let beta = norm2(&r);
    if beta == 0.0 {
        return Ok(GmresCycle {
            x: x0.to_vec(),
            resnorms: vec![0.0],
            factorization: ArnoldiFactorization {
                basis: Vec::new(),
                h: crate::la::DenseMatrix::zeros(1, 0),
                beta,
                breakdown: true,
            },
        });
    }
    scale(1.0 / beta, &mut r);
    let mut basis = vec![r];
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut lsq = GivensLsq::new(beta);
    let mut resnorms = vec![beta];
    let mut breakdown = false;
    for _ in 0..m {
        if op.matvecs() >= opts.matvec_limit {
            break;
        }
        let (col, broke) = arnoldi_step(op, &mut basis, opts.reorth);
        let res = lsq.push_column(&col);
        cols.push(col);
        resnorms.push(res);
        if broke {
            breakdown = true;
            break;
        }
        if res <= opts.stop_below {
            break;
        }
    }
    let k = cols.len();
    let y = lsq.solve_prefix(k)?;
    let mut x = x0.to_vec();
    for (v, &c) in basis.iter().zip(&y) {
        axpy(c, v, &mut x);
    }
    Ok(GmresCycle {
        x,
        resnorms,
        factorization: ArnoldiFactorization {
            basis,
            h: assemble_hessenberg(&cols),
            beta,
            breakdown,
        },
    })
}

/// Settings for [`restarted_gmres_with`].
#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    pub m: usize,
    /// Relative tolerance on the shortcut residual.
    pub tol: f64,
    pub max_matvecs: u64,
    pub max_cycles: usize,
    pub reorth: bool,
}

impl GmresOptions {
    pub fn new(m: usize, tol: f64, max_matvecs: u64) -> Self {
        Self {
            m,
            tol,
            max_matvecs,
            max_cycles: usize::MAX,
            reorth: true,
        }
    }
}

/// Restarted GMRES(m) from a zero initial guess.
pub fn restarted_gmres(
    op: &dyn LinearOperator,
    b: &[f64],
    m: usize,
    tol: f64,
    max_mvp: u64,
) -> Result<(Vec<f64>, SolveReport)> {
    restarted_gmres_with(op, b, &GmresOptions::new(m, tol, max_mvp), None)
}

/// Restarted GMRES with an optional per-restart probe returning the true
/// residual norm of the underlying problem for the current iterate.
pub fn restarted_gmres_with(
    op: &dyn LinearOperator,
    b: &[f64],
    opts: &GmresOptions,
    mut true_residual: Option<&mut dyn FnMut(&[f64]) -> f64>,
) -> Result<(Vec<f64>, SolveReport)> {
    if opts.tol <= 0.0 || opts.tol.is_nan() {
        return Err(Error::InvalidArgument(format!("tolerance {} must be positive", opts.tol)));
    }
    let n = op.dim();
    let bnorm = norm2(b);
    let mv0 = op.matvecs();
    let work0 = work_counts();
    let target = opts.tol * bnorm;
    let cycle_opts = CycleOptions {
        stop_below: target,
        reorth: opts.reorth,
        matvec_limit: mv0.saturating_add(opts.max_matvecs),
    };

    let mut report = SolveReport::new("gmres", n, bnorm);
    report.m = opts.m;
    let mut x = vec![0.0; n];
    let mut shortcut = bnorm;
    while report.cycles < opts.max_cycles {
        if op.matvecs() - mv0 >= opts.max_matvecs || shortcut <= target {
            break;
        }
        let cycle = gmres_cycle_with(op, b, &x, opts.m, &cycle_opts)?;
        let start = cycle.resnorms[0];
        let end = *cycle.resnorms.last().unwrap();
        report.iterations += cycle.resnorms.len() - 1;
        report.cycles += 1;
        x = cycle.x;
        shortcut = end;
        let true_res = true_residual.as_mut().map(|f| f(&x));
        report.history.push(CycleRecord {
            cycle: report.cycles,
            shortcut: end,
            true_residual: true_res,
            cum_matvecs: op.matvecs() - mv0,
        });
        if cycle.resnorms.len() == 1 {
            // no iteration fit under the matvec cap
            break;
        }
        if end > target && start > 0.0 && (start - end) / start < STAGNATION_TOL {
            report.stagnated = true;
            break;
        }
    }
    report.converged = shortcut <= target;
    report.final_shortcut = shortcut;
    report.matvecs = op.matvecs() - mv0;
    let work = work_counts().since(work0);
    report.vector_ops = work.vector_ops;
    report.dot_products = work.dot_products;
    Ok((x, report))
}
