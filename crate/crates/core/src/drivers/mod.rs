//! End-to-end solvers: polynomial construction with balancing and stability
//! control, PP(d)-GMRES(m), and the polynomial-preconditioned interior
//! eigensolver.

mod eigen;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::balance::{
    balance1, balance2, balance3, balance4, balance5, spline_definiteness_test, BalanceMethod,
    CompositePolynomial, NewtonPolynomial, SplineVerdict,
};
use crate::error::{Error, Result};
use crate::krylov::{arnoldi, harmonic_ritz_values, restarted_gmres_with, ritz_values, GmresOptions, SolveReport};
use crate::la::{norm2, work_counts};
use crate::operators::{residual_norm, LinearOperator};
use crate::polyprec::{PofReport, PolyOperator, PolynomialDump, Preconditioner, PreconditionerPolynomial, RootSource};
use crate::rng::{stream, streams, unit_normal_vector};
use crate::stability::{correction_phase, deflation_vectors, stabilize, StabilityConfig, StabilityOutcome};

pub use eigen::{pp_arnoldi_interior, EigConfig, EigenResult};

/// How the preconditioning polynomial is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolySpec {
    pub d: usize,
    pub balance: BalanceMethod,
    /// Half-width of the interval for Method 5.
    pub balance_a: Option<f64>,
    /// Method 4 uses the largest inner degree up to this that divides `d`.
    pub b4_inner_max: usize,
    pub stability: StabilityConfig,
}

impl Default for PolySpec {
    fn default() -> Self {
        Self {
            d: 50,
            balance: BalanceMethod::None,
            balance_a: None,
            b4_inner_max: 10,
            stability: StabilityConfig::default(),
        }
    }
}

/// The polynomial in whichever form its construction produced.
#[derive(Debug, Clone)]
pub enum BuiltPolynomial {
    Roots(PreconditionerPolynomial),
    Newton(NewtonPolynomial),
    Composite(CompositePolynomial),
}

impl BuiltPolynomial {
    pub fn as_dyn(&self) -> &dyn Preconditioner {
        match self {
            BuiltPolynomial::Roots(p) => p,
            BuiltPolynomial::Newton(p) => p,
            BuiltPolynomial::Composite(p) => p,
        }
    }

    pub fn roots(&self) -> Option<&PreconditionerPolynomial> {
        match self {
            BuiltPolynomial::Roots(p) => Some(p),
            _ => None,
        }
    }

    pub fn degree(&self) -> usize {
        self.as_dyn().degree()
    }

    pub fn phi_eval(&self, z: Complex64) -> Complex64 {
        self.as_dyn().phi_eval(z)
    }
}

#[derive(Debug, Clone)]
pub struct PolynomialBuild {
    pub poly: BuiltPolynomial,
    /// Polynomial straight from GMRES(d) on `start`, before balancing.
    pub base: PreconditionerPolynomial,
    pub start: Vec<f64>,
    pub eta: Option<f64>,
    pub removed: Vec<Complex64>,
    pub spline: Option<SplineVerdict>,
    pub stability: Option<StabilityOutcome>,
    pub added_copies: usize,
    pub matvecs: u64,
    pub notes: Vec<String>,
}

impl PolynomialBuild {
    pub fn pof(&self) -> Option<&PofReport> {
        self.stability.as_ref().map(|s| &s.report)
    }

    /// JSON-ready description; roots only for the root-list form.
    pub fn dump(&self) -> Option<PolynomialDump> {
        self.poly.roots().map(|p| {
            let mut d = p.dump();
            d.spline = self.spline.clone();
            d
        })
    }
}

/// Inner degree for Method 4: the largest divisor of `d` in `[2, max]`.
pub fn composite_split(d: usize, max: usize) -> Option<(usize, usize)> {
    (2..=max.min(d)).rev().find(|k| d % k == 0).map(|k| (k, d / k))
}

/// GMRES(d) polynomial from a random start vector drawn from `seed`, then
/// balancing and stability control as `spec` asks.
pub fn build_polynomial(op: &dyn LinearOperator, spec: &PolySpec, seed: u64) -> Result<PolynomialBuild> {
    if spec.d == 0 {
        return Err(Error::InvalidArgument("polynomial degree must be at least 1".into()));
    }
    let mv0 = op.matvecs();
    let start = unit_normal_vector(&mut stream(seed, streams::POLY_START), op.dim());
    let mut notes = Vec::new();
    let f = arnoldi(op, &start, spec.d, true)?;
    if f.breakdown {
        notes.push(format!(
            "Krylov space exhausted after {} steps; polynomial degree reduced",
            f.steps()
        ));
    }
    let harmonic = harmonic_ritz_values(&f)?;
    let base = PreconditionerPolynomial::from_roots(&harmonic, RootSource::Gmres)?;

    let mut eta = None;
    let mut removed = Vec::new();
    let poly = match spec.balance {
        BalanceMethod::None => BuiltPolynomial::Roots(base.clone()),
        BalanceMethod::B1 | BalanceMethod::B2 | BalanceMethod::B5 => {
            let out = match spec.balance {
                BalanceMethod::B1 => balance1(&base)?,
                BalanceMethod::B2 => balance2(&base)?,
                _ => {
                    let a = spec.balance_a.ok_or_else(|| {
                        Error::InvalidArgument("balance method 5 needs the half-width a".into())
                    })?;
                    balance5(&base, a)?
                }
            };
            eta = out.eta;
            removed = out.removed;
            notes.extend(out.note);
            BuiltPolynomial::Roots(out.poly)
        }
        BalanceMethod::B3 => {
            let q = balance3(op, &start, spec.d)?;
            notes.extend(q.warnings.iter().cloned());
            BuiltPolynomial::Newton(q)
        }
        BalanceMethod::B4 => {
            let (inner, outer) = match composite_split(spec.d, spec.b4_inner_max.max(2)) {
                Some(s) => s,
                None => {
                    let inner = spec.b4_inner_max.max(2).min(spec.d.max(2));
                    let outer = (spec.d as f64 / inner as f64).round().max(1.0) as usize;
                    notes.push(format!(
                        "degree {} has no divisor up to {}; using {inner} x {outer}",
                        spec.d, spec.b4_inner_max
                    ));
                    (inner, outer)
                }
            };
            let comp = balance4(op, &start, inner, outer)?;
            notes.extend(comp.inner.warnings.iter().cloned());
            BuiltPolynomial::Composite(comp)
        }
    };

    let (poly, stability, added) = match poly {
        BuiltPolynomial::Roots(p) => {
            let st = stabilize(&p, &base, op, &start, &spec.stability)?;
            notes.extend(st.warnings.iter().cloned());
            let added = st.added;
            (BuiltPolynomial::Roots(st.poly.clone()), Some(st), added)
        }
        other => (other, None, 0),
    };
    // the guard uses the ordinary Ritz values, which stay inside the
    // spectrum's hull where harmonic ones may not
    let ritz = ritz_values(&f)?;
    let spline = poly.roots().and_then(|p| {
        let v = spline_definiteness_test(p, &ritz);
        v.applicable.then_some(v)
    });
    Ok(PolynomialBuild {
        poly,
        base,
        start,
        eta,
        removed,
        spline,
        stability,
        added_copies: added,
        matvecs: op.matvecs() - mv0,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PPGmresConfig {
    #[serde(flatten)]
    pub poly: PolySpec,
    pub m: usize,
    pub tol: f64,
    pub max_mvp: u64,
    pub max_cycles: usize,
    pub seed: u64,
    /// Track the true residual at every restart and run the correction
    /// phase when it lags the shortcut residual.
    pub verify_true_residual: bool,
    /// Attempts at a 10% lower degree after a too-high small-side pof.
    pub max_retries: usize,
}

impl Default for PPGmresConfig {
    fn default() -> Self {
        Self {
            poly: PolySpec::default(),
            m: 50,
            tol: 1e-10,
            max_mvp: 10_000_000,
            max_cycles: usize::MAX,
            seed: 1,
            verify_true_residual: false,
            max_retries: 3,
        }
    }
}

impl PPGmresConfig {
    pub fn validate(&self) -> Result<()> {
        if self.poly.d == 0 || self.m == 0 {
            return Err(Error::InvalidArgument("d and m must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance {} must be positive", self.tol)));
        }
        self.poly.stability.validate()
    }
}

/// PP(d)-GMRES(m) from a zero initial guess: restarted GMRES on `φ(A)`,
/// then `x = p(A) y`.
pub fn pp_gmres(op: &dyn LinearOperator, b: &[f64], config: &PPGmresConfig) -> Result<(Vec<f64>, SolveReport)> {
    config.validate()?;
    if b.len() != op.dim() {
        return Err(Error::Dimension {
            expected: op.dim(),
            got: b.len(),
        });
    }
    let mv0 = op.matvecs();
    let work0 = work_counts();
    let mut spec = config.poly.clone();
    let mut retries = 0;
    let mut warnings = Vec::new();
    let build = loop {
        match build_polynomial(op, &spec, config.seed) {
            Ok(b) => break b,
            Err(Error::DegreeTooHigh { log10_pof, limit }) if retries < config.max_retries && spec.d > 1 => {
                let next = ((spec.d as f64 * 0.9).floor() as usize).clamp(1, spec.d - 1);
                warnings.push(format!(
                    "small-side log10 pof {log10_pof:.1} exceeds {limit}; degree {} -> {next}",
                    spec.d
                ));
                spec.d = next;
                retries += 1;
            }
            Err(e) => return Err(e),
        }
    };
    warnings.extend(build.notes.iter().cloned());
    let poly = build.poly.as_dyn();
    let phi_op = PolyOperator::new(poly, op);

    let bnorm = norm2(b);
    let remaining = config.max_mvp.saturating_sub(build.matvecs);
    let opts = GmresOptions {
        m: config.m,
        tol: config.tol,
        max_matvecs: remaining,
        max_cycles: config.max_cycles,
        reorth: true,
    };
    let (y, inner) = if config.verify_true_residual {
        let mut probe = |y: &[f64]| {
            let x = poly.p_apply(op, y);
            residual_norm(op, b, &x)
        };
        restarted_gmres_with(&phi_op, b, &opts, Some(&mut probe))?
    } else {
        restarted_gmres_with(&phi_op, b, &opts, None)?
    };
    let mut x = poly.p_apply(op, &y);
    let mut final_true = residual_norm(op, b, &x);

    let mut report = inner;
    let mut corrections = None;
    if config.verify_true_residual && final_true > 10.0 * config.tol * bnorm {
        let vectors = match (&build.stability, build.poly.roots()) {
            (Some(st), Some(_)) if !st.deflation_candidates.is_empty() => deflation_vectors(
                &build.base,
                op,
                &build.start,
                &st.deflation_candidates,
                config.poly.stability.max_deflation_vectors,
            ),
            _ => Vec::new(),
        };
        let (xc, mut rep) = correction_phase(op, &x, b, &vectors, &config.poly.stability)?;
        if let Some(st) = &build.stability {
            rep.spurious_roots = st.spurious.clone();
        }
        x = xc;
        final_true = residual_norm(op, b, &x);
        corrections = Some(rep);
    }

    report.method = "pp-gmres".into();
    report.d = spec.d;
    report.degree = build.poly.degree();
    report.added_copies = build.added_copies;
    report.balance = config.poly.balance.name().into();
    report.seed = Some(config.seed);
    report.retries = retries;
    report.polynomial_matvecs = build.matvecs;
    report.final_true_residual = Some(final_true);
    report.corrections = corrections;
    report.matvecs = op.matvecs() - mv0;
    let work = work_counts().since(work0);
    report.vector_ops = work.vector_ops;
    report.dot_products = work.dot_products;
    warnings.extend(report.warnings.drain(..));
    report.warnings = warnings;
    Ok((x, report))
}

#[cfg(test)]
mod tests;
