//! Method 4: an outer GMRES polynomial composed with the Method 3 polynomial.

use num_complex::Complex64;

use super::newton::{balance3, NewtonPolynomial};
use crate::error::{Error, Result};
use crate::krylov::{arnoldi, harmonic_ritz_values};
use crate::operators::LinearOperator;
use crate::polyprec::{PolyOperator, Preconditioner, PreconditionerPolynomial, RootSource};

/// `φ(z) = φ_out(φ_in(z))`, recovered through
/// `p(z) = p_in(z) · p_out(φ_in(z))`.
#[derive(Debug, Clone)]
pub struct CompositePolynomial {
    pub inner: NewtonPolynomial,
    pub outer: PreconditionerPolynomial,
}

impl CompositePolynomial {
    pub fn degree(&self) -> usize {
        self.inner.degree() * self.outer.degree()
    }
}

impl Preconditioner for CompositePolynomial {
    fn degree(&self) -> usize {
        CompositePolynomial::degree(self)
    }

    fn phi_apply(&self, op: &dyn LinearOperator, v: &[f64]) -> Vec<f64> {
        let inner_op = PolyOperator::new(&self.inner, op);
        self.outer.phi_apply(&inner_op, v)
    }

    fn p_apply(&self, op: &dyn LinearOperator, v: &[f64]) -> Vec<f64> {
        let inner_op = PolyOperator::new(&self.inner, op);
        let t = self.outer.p_apply(&inner_op, v);
        self.inner.p_apply(op, &t)
    }

    fn phi_eval(&self, z: Complex64) -> Complex64 {
        self.outer.phi_eval(self.inner.phi_eval(z))
    }
}

/// Inner polynomial of degree `d_inner` from Method 3, outer polynomial of
/// degree `d_outer` from the harmonic Ritz values of GMRES(d_outer) on
/// `φ_in(A)`. Both use `b` as their start vector.
pub fn balance4(
    op: &dyn LinearOperator,
    b: &[f64],
    d_inner: usize,
    d_outer: usize,
) -> Result<CompositePolynomial> {
    if d_inner < 2 || d_outer < 1 {
        return Err(Error::InvalidArgument(
            "composite polynomial needs inner degree >= 2 and outer degree >= 1".into(),
        ));
    }
    let inner = balance3(op, b, d_inner - 1)?;
    let inner_op = PolyOperator::new(&inner, op);
    let f = arnoldi(&inner_op, b, d_outer, true)?;
    let roots = harmonic_ritz_values(&f)?;
    let outer = PreconditionerPolynomial::from_roots(&roots, RootSource::Gmres)?;
    Ok(CompositePolynomial { inner, outer })
}
