//! Linear operators: the matvec abstraction, CSR storage, the synthetic test
//! matrices, and Matrix Market I/O.

mod generators;
mod market;
mod sparse;

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use generators::{
    bidiagonal_operator, diagonal_operator, example_spectrum, hatano_nelson_operator, preset,
    ray_spectrum_operator, PRESET_NAMES,
};
pub use market::{read_matrix_market, write_matrix_market};
pub use sparse::SparseMatrix;

/// A square real operator `x ↦ A x`.
///
/// Implementations count every application; the count is what the solvers
/// report as matvecs.
pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;

    /// `y ← A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Applications performed so far.
    fn matvecs(&self) -> u64;

    /// Exact eigenvalues when the operator was built from a known spectrum.
    fn spectrum(&self) -> Option<&[Complex64]> {
        None
    }

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        y
    }
}

/// A sparse matrix with an atomic matvec counter and optional spectrum.
#[derive(Debug)]
pub struct MatrixOperator {
    matrix: SparseMatrix,
    spectrum: Option<Vec<Complex64>>,
    label: String,
    count: AtomicU64,
}

impl MatrixOperator {
    pub fn new(matrix: SparseMatrix, label: impl Into<String>) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::Dimension {
                expected: matrix.rows(),
                got: matrix.cols(),
            });
        }
        Ok(Self {
            matrix,
            spectrum: None,
            label: label.into(),
            count: AtomicU64::new(0),
        })
    }

    pub fn with_spectrum(mut self, spectrum: Vec<Complex64>) -> Result<Self> {
        if spectrum.len() != self.matrix.rows() {
            return Err(Error::Dimension {
                expected: self.matrix.rows(),
                got: spectrum.len(),
            });
        }
        self.spectrum = Some(spectrum);
        Ok(self)
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn reset_count(&self) {
        self.count.store(0, Ordering::Relaxed);
    }
}

impl LinearOperator for MatrixOperator {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.matrix.matvec_into(x, y);
    }

    fn matvecs(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    fn spectrum(&self) -> Option<&[Complex64]> {
        self.spectrum.as_deref()
    }
}

/// `A − σI`, counting through the wrapped operator.
pub struct Shifted<'a> {
    inner: &'a dyn LinearOperator,
    sigma: f64,
    spectrum: Option<Vec<Complex64>>,
}

impl<'a> Shifted<'a> {
    pub fn new(inner: &'a dyn LinearOperator, sigma: f64) -> Self {
        let spectrum = inner
            .spectrum()
            .map(|s| s.iter().map(|z| z - sigma).collect());
        Self {
            inner,
            sigma,
            spectrum,
        }
    }
}

impl LinearOperator for Shifted<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.inner.apply(x, y);
        if self.sigma != 0.0 {
            crate::la::axpy(-self.sigma, x, y);
        }
    }

    fn matvecs(&self) -> u64 {
        self.inner.matvecs()
    }

    fn spectrum(&self) -> Option<&[Complex64]> {
        self.spectrum.as_deref()
    }
}

/// `φ(λ_i)` for every known eigenvalue of `op`; the eigenvalues of `φ(A)`.
pub fn spectrum_image<F>(phi: F, op: &dyn LinearOperator) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Complex64,
{
    let spec = op.spectrum().ok_or(Error::UnknownSpectrum)?;
    Ok(spec.iter().map(|&z| phi(z)).collect())
}

/// `‖b − A x‖`, one matvec.
pub fn residual_norm(op: &dyn LinearOperator, b: &[f64], x: &[f64]) -> f64 {
    let ax = op.apply_vec(x);
    let mut r = vec![0.0; b.len()];
    crate::la::sub_into(b, &ax, &mut r);
    crate::la::norm2(&r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_increments_once_per_apply() {
        let op = diagonal_operator(&[1.0, 2.0]);
        assert_eq!(op.matvecs(), 0);
        let _ = op.apply_vec(&[1.0, 1.0]);
        let _ = op.apply_vec(&[1.0, 1.0]);
        assert_eq!(op.matvecs(), 2);
    }

    #[test]
    fn shifted_subtracts_sigma() {
        let op = diagonal_operator(&[1.0, 5.0]);
        let s = Shifted::new(&op, 2.0);
        assert_eq!(s.apply_vec(&[1.0, 1.0]), vec![-1.0, 3.0]);
        assert_eq!(op.matvecs(), 1);
        let spec = s.spectrum().unwrap();
        assert_eq!(spec[1], Complex64::new(3.0, 0.0));
    }

    #[test]
    fn spectrum_image_scales() {
        let op = diagonal_operator(&[2.0, 4.0]);
        let img = spectrum_image(|z| z / 2.0, &op).unwrap();
        assert_eq!(img, vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]);
        let zero = spectrum_image(|_| Complex64::new(0.0, 0.0), &op).unwrap();
        assert!(zero.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn spectrum_image_requires_spectrum() {
        let op = hatano_nelson_operator(4, 0.5, Some(vec![0.0; 4]), true, 0).unwrap();
        assert!(matches!(
            spectrum_image(|z| z, &op),
            Err(Error::UnknownSpectrum)
        ));
    }
}
