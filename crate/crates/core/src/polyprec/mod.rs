//! The preconditioner polynomial as a list of roots.
//!
//! With `π(z) = Π (1 − z/θ_i)^{m_i}`, the preconditioned operator is
//! `φ(A) = I − π(A)` and the preconditioner is `p(z) = φ(z)/z`.

mod leja;
mod pof;

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::la::{axpy, copy_into, scale};
use crate::operators::LinearOperator;

pub use leja::leja_order;
pub use pof::{add_root_copies, copies_for, pof, PofEntry, PofReport, Side};

/// Where a root came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootSource {
    Gmres,
    Balance,
    Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
    /// Multiplicity before stability copies were added.
    pub base_multiplicity: usize,
    pub source: RootSource,
}

/// What every polynomial preconditioner offers the solver: `φ(A)v`, `p(A)v`
/// and scalar `φ(z)`.
pub trait Preconditioner: Send + Sync {
    fn degree(&self) -> usize;
    fn phi_apply(&self, op: &dyn LinearOperator, v: &[f64]) -> Vec<f64>;
    fn p_apply(&self, op: &dyn LinearOperator, v: &[f64]) -> Vec<f64>;
    fn phi_eval(&self, z: Complex64) -> Complex64;
}

/// One real factor of `π` as it is applied.
#[derive(Debug, Clone, Copy)]
enum Factor {
    /// `1 − z·inv`
    Linear { inv: f64 },
    /// `1 − c1·z + c2·z²` for the pair `θ, θ̄`
    Quadratic { c1: f64, c2: f64 },
}

impl Factor {
    fn eval(self, z: Complex64) -> Complex64 {
        match self {
            Factor::Linear { inv } => Complex64::new(1.0, 0.0) - z * inv,
            Factor::Quadratic { c1, c2 } => Complex64::new(1.0, 0.0) - z * c1 + z * z * c2,
        }
    }

    fn deriv(self, z: Complex64) -> Complex64 {
        match self {
            Factor::Linear { inv } => Complex64::new(-inv, 0.0),
            Factor::Quadratic { c1, c2 } => z * (2.0 * c2) - c1,
        }
    }
}

/// Roots in Leja order with multiplicities.
///
/// `roots` holds distinct values with each complex pair stored adjacently,
/// positive imaginary part first and equal multiplicities. `sequence` is the
/// order in which factors are applied; a complex pair appears once (by its
/// first member) per copy.
#[derive(Debug, Clone, PartialEq)]
pub struct PreconditionerPolynomial {
    roots: Vec<Root>,
    sequence: Vec<usize>,
}

impl PreconditionerPolynomial {
    /// The zero polynomial `φ ≡ 0` (degree 0, `π ≡ 1`).
    pub fn empty() -> Self {
        Self {
            roots: Vec::new(),
            sequence: Vec::new(),
        }
    }

    /// Builds from a conjugate-closed multiset; repeated values become
    /// multiplicities.
    pub fn from_roots(values: &[Complex64], source: RootSource) -> Result<Self> {
        let (vals, mult) = leja::group(values);
        let roots = vals
            .into_iter()
            .zip(mult)
            .map(|(value, m)| Root {
                value,
                multiplicity: m,
                base_multiplicity: m,
                source,
            })
            .collect();
        Self::from_parts(roots)
    }

    /// Validates and Leja-orders an explicit root list.
    pub fn from_parts(roots: Vec<Root>) -> Result<Self> {
        let mut i = 0;
        while i < roots.len() {
            let r = &roots[i];
            if !r.value.re.is_finite() || !r.value.im.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite root {}", r.value)));
            }
            if r.value.norm() == 0.0 {
                return Err(Error::InvalidArgument("zero root: π(0) = 1 would fail".into()));
            }
            if r.multiplicity == 0 {
                return Err(Error::InvalidArgument(format!("root {} has multiplicity 0", r.value)));
            }
            if r.value.im < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "root {} is not preceded by its conjugate",
                    r.value
                )));
            }
            if r.value.im > 0.0 {
                let ok = roots
                    .get(i + 1)
                    .is_some_and(|c| c.value == r.value.conj() && c.multiplicity == r.multiplicity);
                if !ok {
                    return Err(Error::InvalidArgument(format!(
                        "root {} lacks an adjacent conjugate of equal multiplicity",
                        r.value
                    )));
                }
                i += 2;
            } else {
                i += 1;
            }
        }
        for a in 0..roots.len() {
            for b in a + 1..roots.len() {
                if roots[a].value == roots[b].value {
                    return Err(Error::InvalidArgument(format!(
                        "root {} listed twice; use multiplicities",
                        roots[a].value
                    )));
                }
            }
        }
        let values: Vec<Complex64> = roots.iter().map(|r| r.value).collect();
        let mult: Vec<usize> = roots.iter().map(|r| r.multiplicity).collect();
        let sequence = leja::leja_sequence(&values, &mult);
        Ok(Self { roots, sequence })
    }

    /// Same roots applied in a caller-chosen order. `sequence` must list each
    /// real root and each pair head exactly `multiplicity` times.
    pub fn reordered(&self, sequence: Vec<usize>) -> Result<Self> {
        let mut count = vec![0usize; self.roots.len()];
        for &i in &sequence {
            if i >= self.roots.len() || self.roots[i].value.im < 0.0 {
                return Err(Error::InvalidArgument(format!("bad sequence entry {i}")));
            }
            count[i] += 1;
        }
        for (i, r) in self.roots.iter().enumerate() {
            if r.value.im >= 0.0 && count[i] != r.multiplicity {
                return Err(Error::InvalidArgument(format!(
                    "root {} appears {} times, multiplicity {}",
                    r.value, count[i], r.multiplicity
                )));
            }
        }
        Ok(Self {
            roots: self.roots.clone(),
            sequence,
        })
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    /// Application order as indices into [`roots`](Self::roots).
    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Copies added on top of the base multiplicities.
    pub fn added_copies(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity - r.base_multiplicity).sum()
    }

    /// Every copy of every root, in application order.
    pub fn expanded(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.degree());
        for &i in &self.sequence {
            let z = self.roots[i].value;
            out.push(z);
            if z.im != 0.0 {
                out.push(z.conj());
            }
        }
        out
    }

    /// Index of the conjugate partner of `roots[i]`, if complex.
    pub fn partner(&self, i: usize) -> Option<usize> {
        let z = self.roots[i].value;
        if z.im > 0.0 {
            Some(i + 1)
        } else if z.im < 0.0 {
            Some(i - 1)
        } else {
            None
        }
    }

    /// Returns a copy with `value` (and its conjugate, if complex) added.
    pub fn with_root(&self, value: Complex64, source: RootSource) -> Result<Self> {
        let mut roots = self.roots.clone();
        let value = if value.im < 0.0 { value.conj() } else { value };
        if let Some(p) = roots.iter().position(|r| r.value == value) {
            roots[p].multiplicity += 1;
            roots[p].base_multiplicity += 1;
            if value.im != 0.0 {
                roots[p + 1].multiplicity += 1;
                roots[p + 1].base_multiplicity += 1;
            }
        } else {
            roots.push(Root {
                value,
                multiplicity: 1,
                base_multiplicity: 1,
                source,
            });
            if value.im != 0.0 {
                roots.push(Root {
                    value: value.conj(),
                    multiplicity: 1,
                    base_multiplicity: 1,
                    source,
                });
            }
        }
        Self::from_parts(roots)
    }

    /// Returns a copy with one copy of `roots[i]` (and its partner) removed.
    pub fn without_one(&self, i: usize) -> Result<Self> {
        let mut roots = self.roots.clone();
        let first = match self.partner(i) {
            Some(p) if p < i => p,
            _ => i,
        };
        let width = if roots[first].value.im != 0.0 { 2 } else { 1 };
        if roots[first].multiplicity > 1 {
            for r in &mut roots[first..first + width] {
                r.multiplicity -= 1;
                r.base_multiplicity = r.base_multiplicity.min(r.multiplicity);
            }
        } else {
            roots.drain(first..first + width);
        }
        Self::from_parts(roots)
    }

    fn factors(&self) -> Vec<Factor> {
        self.sequence
            .iter()
            .map(|&i| {
                let z = self.roots[i].value;
                if z.im == 0.0 {
                    Factor::Linear { inv: 1.0 / z.re }
                } else {
                    let abs2 = z.norm_sqr();
                    Factor::Quadratic {
                        c1: 2.0 * z.re / abs2,
                        c2: 1.0 / abs2,
                    }
                }
            })
            .collect()
    }

    /// `π(z)`, evaluated factor by factor in application order.
    pub fn pi_eval(&self, z: Complex64) -> Complex64 {
        self.factors()
            .into_iter()
            .fold(Complex64::new(1.0, 0.0), |acc, f| acc * f.eval(z))
    }

    pub fn pi_deriv(&self, z: Complex64) -> Complex64 {
        let f = self.factors();
        let vals: Vec<Complex64> = f.iter().map(|g| g.eval(z)).collect();
        let one = Complex64::new(1.0, 0.0);
        let mut suffix = vec![one; vals.len() + 1];
        for k in (0..vals.len()).rev() {
            suffix[k] = suffix[k + 1] * vals[k];
        }
        let mut prefix = one;
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, g) in f.iter().enumerate() {
            sum += prefix * g.deriv(z) * suffix[k + 1];
            prefix *= vals[k];
        }
        sum
    }

    /// `φ(z) = 1 − π(z)`.
    pub fn phi_eval(&self, z: Complex64) -> Complex64 {
        Complex64::new(1.0, 0.0) - self.pi_eval(z)
    }

    pub fn phi_deriv(&self, z: Complex64) -> Complex64 {
        -self.pi_deriv(z)
    }

    /// `φ′(0) = Σ m_i / θ_i`, summed over distinct roots.
    pub fn slope_at_origin(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| r.multiplicity as f64 * (1.0 / r.value).re)
            .sum()
    }

    /// `Σ |m_i / θ_i|`, the scale for judging [`slope_at_origin`](Self::slope_at_origin).
    pub fn slope_scale(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| r.multiplicity as f64 / r.value.norm())
            .sum()
    }

    /// `π(A)v` in application order; exactly `degree()` matvecs.
    pub fn pi_apply(&self, op: &dyn LinearOperator, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut w = v.to_vec();
        let mut t = vec![0.0; n];
        let mut u = vec![0.0; n];
        for f in self.factors() {
            match f {
                Factor::Linear { inv } => {
                    op.apply(&w, &mut t);
                    axpy(-inv, &t, &mut w);
                }
                Factor::Quadratic { c1, c2 } => {
                    op.apply(&w, &mut t);
                    op.apply(&t, &mut u);
                    axpy(-c1, &t, &mut w);
                    axpy(c2, &u, &mut w);
                }
            }
        }
        w
    }

    /// `φ(A)v = v − π(A)v`; exactly `degree()` matvecs.
    pub fn phi_apply(&self, op: &dyn LinearOperator, v: &[f64]) -> Vec<f64> {
        let mut w = self.pi_apply(op, v);
        scale(-1.0, &mut w);
        axpy(1.0, v, &mut w);
        w
    }

    /// `p(A)v` by accumulating `Σ_k (Π_{i<k} factor_i)(A) · q_k(A) v` where
    /// `φ = Σ_k (Π_{i<k} factor_i)·(1 − factor_k)` and `q_k = (1 − factor_k)/z`.
    /// Uses `degree() − 1` matvecs.
    pub fn p_apply(&self, op: &dyn LinearOperator, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut y = vec![0.0; n];
        let factors = self.factors();
        let mut prod = v.to_vec();
        let mut t = vec![0.0; n];
        let mut u = vec![0.0; n];
        let last = factors.len().saturating_sub(1);
        for (k, f) in factors.into_iter().enumerate() {
            match f {
                Factor::Linear { inv } => {
                    axpy(inv, &prod, &mut y);
                    if k < last {
                        op.apply(&prod, &mut t);
                        axpy(-inv, &t, &mut prod);
                    }
                }
                Factor::Quadratic { c1, c2 } => {
                    op.apply(&prod, &mut t);
                    axpy(c1, &prod, &mut y);
                    axpy(-c2, &t, &mut y);
                    if k < last {
                        op.apply(&t, &mut u);
                        axpy(-c1, &t, &mut prod);
                        axpy(c2, &u, &mut prod);
                    }
                }
            }
        }
        y
    }

    /// `Π_{i≠j}(I − A/θ_i) b` with one copy of root `j` left out. For a
    /// complex `θ_j` the result is complex and returned as `(re, im)`; the
    /// rest of its pair is applied as a complex linear factor at the end.
    pub fn product_without(&self, j: usize, op: &dyn LinearOperator, b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = b.len();
        let head = match self.partner(j) {
            Some(p) if p < j => p,
            _ => j,
        };
        let mut skipped = false;
        let mut w = b.to_vec();
        let mut t = vec![0.0; n];
        let mut u = vec![0.0; n];
        let factors = self.factors();
        for (&i, f) in self.sequence.iter().zip(factors) {
            if i == head && !skipped {
                skipped = true;
                continue;
            }
            match f {
                Factor::Linear { inv } => {
                    op.apply(&w, &mut t);
                    axpy(-inv, &t, &mut w);
                }
                Factor::Quadratic { c1, c2 } => {
                    op.apply(&w, &mut t);
                    op.apply(&t, &mut u);
                    axpy(-c1, &t, &mut w);
                    axpy(c2, &u, &mut w);
                }
            }
        }
        let theta = self.roots[j].value;
        if theta.im == 0.0 {
            return (w, vec![0.0; n]);
        }
        // remaining factor (I − A/θ̄_j)
        let inv = 1.0 / theta.conj();
        op.apply(&w, &mut t);
        let mut re = w.clone();
        axpy(-inv.re, &t, &mut re);
        let mut im = vec![0.0; n];
        axpy(-inv.im, &t, &mut im);
        (re, im)
    }

    /// Serializable description of the polynomial.
    pub fn dump(&self) -> PolynomialDump {
        let mut leja_index = vec![None; self.roots.len()];
        for (pos, &i) in self.sequence.iter().enumerate() {
            if leja_index[i].is_none() {
                leja_index[i] = Some(pos);
                if let Some(p) = self.partner(i) {
                    leja_index[p] = Some(pos);
                }
            }
        }
        PolynomialDump {
            schema: crate::krylov::REPORT_SCHEMA,
            degree: self.degree(),
            added_copies: self.added_copies(),
            roots: self
                .roots
                .iter()
                .zip(leja_index)
                .map(|(r, li)| RootDump {
                    re: r.value.re,
                    im: r.value.im,
                    multiplicity: r.multiplicity,
                    base_multiplicity: r.base_multiplicity,
                    source: r.source,
                    leja_index: li.unwrap_or(0),
                })
                .collect(),
            sequence: self.sequence.clone(),
            spline: None,
        }
    }
}

impl Preconditioner for PreconditionerPolynomial {
    fn degree(&self) -> usize {
        PreconditionerPolynomial::degree(self)
    }
    fn phi_apply(&self, op: &dyn LinearOperator, v: &[f64]) -> Vec<f64> {
        PreconditionerPolynomial::phi_apply(self, op, v)
    }
    fn p_apply(&self, op: &dyn LinearOperator, v: &[f64]) -> Vec<f64> {
        PreconditionerPolynomial::p_apply(self, op, v)
    }
    fn phi_eval(&self, z: Complex64) -> Complex64 {
        PreconditionerPolynomial::phi_eval(self, z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootDump {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub base_multiplicity: usize,
    pub source: RootSource,
    /// Position of the root's first application.
    pub leja_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialDump {
    pub schema: u32,
    pub degree: usize,
    pub added_copies: usize,
    pub roots: Vec<RootDump>,
    pub sequence: Vec<usize>,
    pub spline: Option<crate::balance::SplineVerdict>,
}

/// `φ(A)` as an operator. Its matvec count is that of the underlying `A`.
pub struct PolyOperator<'a> {
    poly: &'a dyn Preconditioner,
    op: &'a dyn LinearOperator,
    spectrum: OnceLock<Option<Vec<Complex64>>>,
}

impl<'a> PolyOperator<'a> {
    pub fn new(poly: &'a dyn Preconditioner, op: &'a dyn LinearOperator) -> Self {
        Self {
            poly,
            op,
            spectrum: OnceLock::new(),
        }
    }
}

impl LinearOperator for PolyOperator<'_> {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let w = self.poly.phi_apply(self.op, x);
        copy_into(&w, y);
    }

    fn matvecs(&self) -> u64 {
        self.op.matvecs()
    }

    fn spectrum(&self) -> Option<&[Complex64]> {
        self.spectrum
            .get_or_init(|| {
                self.op
                    .spectrum()
                    .map(|s| s.iter().map(|&z| self.poly.phi_eval(z)).collect())
            })
            .as_deref()
    }
}
