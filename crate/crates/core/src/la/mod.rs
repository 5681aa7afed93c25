//! Dense kernels shared by every solver in the crate.
//!
//! Length-n vector kernels tally their work in thread-local counters so solver
//! reports can state how many vector operations and dot products a run needed.

mod dense;
mod eig;
mod lsq;

pub use dense::{lu_solve, DenseMatrix};
pub use eig::{eig_small_dense, eig_with_vectors, sort_spectrum, EigenPairs, DEFAULT_EIG_CAP};
pub use lsq::{adjoint_solve_last_column, hessenberg_least_squares, GivensLsq};

use std::cell::Cell;

thread_local! {
    static DOTS: Cell<u64> = const { Cell::new(0) };
    static VOPS: Cell<u64> = const { Cell::new(0) };
}

/// Running totals of length-n work performed on the current thread.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WorkCounts {
    pub vector_ops: u64,
    pub dot_products: u64,
}

impl WorkCounts {
    pub fn since(self, earlier: WorkCounts) -> WorkCounts {
        WorkCounts {
            vector_ops: self.vector_ops - earlier.vector_ops,
            dot_products: self.dot_products - earlier.dot_products,
        }
    }
}

pub fn work_counts() -> WorkCounts {
    WorkCounts {
        vector_ops: VOPS.with(Cell::get),
        dot_products: DOTS.with(Cell::get),
    }
}

#[inline]
fn tally_dot(k: u64) {
    DOTS.with(|c| c.set(c.get() + k));
}

#[inline]
fn tally_vop(k: u64) {
    VOPS.with(|c| c.set(c.get() + k));
}

#[inline]
fn dot_raw(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [0.0f64; 4];
    let xc = x.chunks_exact(4);
    let yc = y.chunks_exact(4);
    let (xr, yr) = (xc.remainder(), yc.remainder());
    for (a, b) in xc.zip(yc) {
        acc[0] += a[0] * b[0];
        acc[1] += a[1] * b[1];
        acc[2] += a[2] * b[2];
        acc[3] += a[3] * b[3];
    }
    let mut tail = 0.0;
    for (a, b) in xr.iter().zip(yr) {
        tail += a * b;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    tally_dot(1);
    dot_raw(x, y)
}

pub fn norm2(x: &[f64]) -> f64 {
    tally_dot(1);
    dot_raw(x, x).sqrt()
}

/// y ← y + alpha·x
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    tally_vop(1);
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// x ← alpha·x
pub fn scale(alpha: f64, x: &mut [f64]) {
    tally_vop(1);
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

/// z ← x − y
pub fn sub_into(x: &[f64], y: &[f64], z: &mut [f64]) {
    tally_vop(1);
    for ((zi, xi), yi) in z.iter_mut().zip(x).zip(y) {
        *zi = xi - yi;
    }
}

pub fn copy_into(src: &[f64], dst: &mut [f64]) {
    tally_vop(1);
    dst.copy_from_slice(src);
}

/// Normalizes `x` in place and returns its former norm.
pub fn normalize(x: &mut [f64]) -> f64 {
    let nrm = norm2(x);
    if nrm > 0.0 {
        scale(1.0 / nrm, x);
    }
    nrm
}

/// Orthogonalizes `w` against the columns in `basis` with classical
/// Gram-Schmidt, optionally with a second full pass. Returns the projection
/// coefficients.
pub fn cgs_orthogonalize(basis: &[Vec<f64>], w: &mut [f64], reorth: bool) -> Vec<f64> {
    let k = basis.len();
    let mut h: Vec<f64> = basis.iter().map(|v| dot_raw(v, w)).collect();
    tally_dot(k as u64);
    for (v, &hj) in basis.iter().zip(&h) {
        for (wi, vi) in w.iter_mut().zip(v) {
            *wi -= hj * vi;
        }
    }
    tally_vop(k as u64);
    if reorth {
        let h2: Vec<f64> = basis.iter().map(|v| dot_raw(v, w)).collect();
        tally_dot(k as u64);
        for (v, &hj) in basis.iter().zip(&h2) {
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= hj * vi;
            }
        }
        tally_vop(k as u64);
        for (a, b) in h.iter_mut().zip(h2) {
            *a += b;
        }
    }
    h
}

/// Forms Σ_j coeffs[j]·basis[j].
pub fn combine(basis: &[Vec<f64>], coeffs: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (v, &c) in basis.iter().zip(coeffs) {
        axpy(c, v, &mut out);
    }
    out
}
