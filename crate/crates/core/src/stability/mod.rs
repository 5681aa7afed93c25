//! Stability control for high-degree polynomials: extra root copies,
//! side-aware augmentation for indefinite spectra, and the correction phase
//! (Galerkin deflation, then a short unpreconditioned GMRES run).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::krylov::{gmres_cycle, harmonic_ritz_residual, CorrectionReport};
use crate::la::{axpy, cgs_orthogonalize, dot, lu_solve, norm2, normalize, sub_into, DenseMatrix};
use crate::operators::{residual_norm, LinearOperator};
use crate::polyprec::{add_root_copies, pof, PofReport, PreconditionerPolynomial, RootSource, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StabilityMode {
    Off,
    /// Copies for every high-pof root, no side analysis.
    #[default]
    Standard,
    /// Side classification, spurious-root screening and the small-side
    /// abort rule.
    Indefinite,
}

impl StabilityMode {
    pub fn name(self) -> &'static str {
        match self {
            StabilityMode::Off => "off",
            StabilityMode::Standard => "standard",
            StabilityMode::Indefinite => "indefinite",
        }
    }
}

impl std::str::FromStr for StabilityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "off" | "none" => Ok(StabilityMode::Off),
            "standard" => Ok(StabilityMode::Standard),
            "indefinite" => Ok(StabilityMode::Indefinite),
            other => Err(Error::InvalidArgument(format!(
                "unknown stability mode {other:?}; expected off|standard|indefinite"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StabilityConfig {
    pub mode: StabilityMode,
    pub pofcutoff_log10: f64,
    /// Product-form residual norms above this mark a high-pof root spurious.
    pub rncutoff: f64,
    pub small_side_pof_abort_log10: f64,
    pub step1_enabled: bool,
    pub step1_pof_threshold_log10: f64,
    pub step1_max_roots: usize,
    pub max_deflation_vectors: usize,
    pub gmres_correction_iters: usize,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            mode: StabilityMode::Standard,
            pofcutoff_log10: 4.0,
            rncutoff: 1e-3,
            small_side_pof_abort_log10: 20.0,
            step1_enabled: false,
            step1_pof_threshold_log10: 14.0,
            step1_max_roots: 3,
            max_deflation_vectors: 8,
            gmres_correction_iters: 10,
        }
    }
}

impl StabilityConfig {
    pub fn off() -> Self {
        Self {
            mode: StabilityMode::Off,
            ..Self::default()
        }
    }

    pub fn indefinite() -> Self {
        Self {
            mode: StabilityMode::Indefinite,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pofcutoff", self.pofcutoff_log10),
            ("rncutoff", self.rncutoff),
            ("small-side abort", self.small_side_pof_abort_log10),
            ("step-1 threshold", self.step1_pof_threshold_log10),
        ];
        for (name, v) in positive {
            if v <= 0.0 || v.is_nan() {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.gmres_correction_iters == 0 {
            return Err(Error::InvalidArgument("correction GMRES needs at least one iteration".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideClassification {
    pub larger: Side,
    /// False when every root sits on one side.
    pub two_sided: bool,
}

/// Flags spurious roots in `report` (high pof and a product-form residual
/// above `rncutoff`) and picks the larger side: the one reaching furthest
/// from the imaginary axis, judged on `ritz` when given and otherwise on
/// the non-spurious roots.
pub fn classify_sides(
    report: &mut PofReport,
    cutoff_log10: f64,
    rncutoff: f64,
    ritz: Option<&[Complex64]>,
) -> SideClassification {
    for e in &mut report.entries {
        e.spurious = e.log10_pof > cutoff_log10 && e.residual.is_some_and(|r| r > rncutoff);
    }
    let reach = |side: Side, values: &mut dyn Iterator<Item = Complex64>| {
        values
            .filter(|z| Side::of(*z) == side)
            .map(|z| z.re.abs())
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let (neg, pos) = match ritz {
        Some(r) => (
            reach(Side::Negative, &mut r.iter().copied()),
            reach(Side::Positive, &mut r.iter().copied()),
        ),
        None => {
            let good = || report.entries.iter().filter(|e| !e.spurious).map(|e| e.root);
            (
                reach(Side::Negative, &mut good()),
                reach(Side::Positive, &mut good()),
            )
        }
    };
    let has = |s: Side| report.entries.iter().any(|e| e.side == s);
    SideClassification {
        larger: if neg > pos { Side::Negative } else { Side::Positive },
        two_sided: has(Side::Negative) && has(Side::Positive),
    }
}

#[derive(Debug, Clone)]
pub struct StabilityOutcome {
    pub poly: PreconditionerPolynomial,
    /// Pof values of the returned polynomial, with residuals and spurious
    /// flags where computed.
    pub report: PofReport,
    pub sides: Option<SideClassification>,
    pub step1_copies: usize,
    /// All copies added here, both members of a pair counted.
    pub added: usize,
    /// High-pof accurate roots on the smaller side (pair heads only),
    /// largest pof first; their product-form vectors feed the deflation.
    pub deflation_candidates: Vec<Complex64>,
    pub spurious: Vec<Complex64>,
    pub warnings: Vec<String>,
}

impl StabilityOutcome {
    fn unchanged(poly: &PreconditionerPolynomial) -> Self {
        Self {
            poly: poly.clone(),
            report: pof(poly),
            sides: None,
            step1_copies: 0,
            added: 0,
            deflation_candidates: Vec::new(),
            spurious: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

fn base_index(base: &PreconditionerPolynomial, z: Complex64) -> Option<usize> {
    base.roots().iter().position(|r| r.value == z)
}

/// Adds stability copies to `poly`. `base` is the polynomial straight from
/// GMRES(d) on `start`; residuals of its roots identify spurious values.
/// Balancing roots never receive copies.
///
/// In indefinite mode an error [`Error::DegreeTooHigh`] means the smaller
/// side cannot be stabilized and the degree should be lowered.
pub fn stabilize(
    poly: &PreconditionerPolynomial,
    base: &PreconditionerPolynomial,
    op: &dyn LinearOperator,
    start: &[f64],
    config: &StabilityConfig,
) -> Result<StabilityOutcome> {
    config.validate()?;
    let cutoff = config.pofcutoff_log10;
    match config.mode {
        StabilityMode::Off => Ok(StabilityOutcome::unchanged(poly)),
        StabilityMode::Standard => {
            let report = pof(poly);
            let (out, added) = add_root_copies(poly, &report, cutoff, |r, _| r.source != RootSource::Balance);
            let mut outcome = StabilityOutcome::unchanged(&out);
            outcome.added = added;
            Ok(outcome)
        }
        StabilityMode::Indefinite => stabilize_indefinite(poly, base, op, start, config),
    }
}

fn stabilize_indefinite(
    poly: &PreconditionerPolynomial,
    base: &PreconditionerPolynomial,
    op: &dyn LinearOperator,
    start: &[f64],
    config: &StabilityConfig,
) -> Result<StabilityOutcome> {
    let cutoff = config.pofcutoff_log10;
    let screen = cutoff.min(if config.step1_enabled {
        config.step1_pof_threshold_log10
    } else {
        f64::INFINITY
    });
    let mut report = pof(poly);
    let mut warnings = Vec::new();
    for k in 0..report.entries.len() {
        let (lp, root, index) = {
            let e = &report.entries[k];
            (e.log10_pof, e.root, e.index)
        };
        if lp <= screen || root.im < 0.0 || poly.roots()[index].source == RootSource::Balance {
            continue;
        }
        let Some(j) = base_index(base, root) else { continue };
        let res = match harmonic_ritz_residual(j, base, op, start) {
            Ok(r) => r,
            Err(err) => {
                warnings.push(format!("residual for root {root} unavailable: {err}"));
                f64::INFINITY
            }
        };
        report.entries[k].residual = Some(res);
        if root.im > 0.0 {
            report.entries[k + 1].residual = Some(res);
        }
    }
    let sides = classify_sides(&mut report, cutoff, config.rncutoff, None);
    let small = sides.larger.opposite();

    let mut current = poly.clone();
    let mut step1_copies = 0;
    let mut extra = vec![0usize; poly.roots().len()];
    if config.step1_enabled && sides.two_sided {
        let mut picks: Vec<(usize, f64)> = report
            .entries
            .iter()
            .filter(|e| {
                e.side == small
                    && e.root.im >= 0.0
                    && !e.spurious
                    && e.log10_pof > config.step1_pof_threshold_log10
                    && e.residual.is_some_and(|r| r <= config.rncutoff)
            })
            .map(|e| (e.index, e.log10_pof))
            .collect();
        picks.sort_by(|a, b| b.1.total_cmp(&a.1));
        picks.truncate(config.step1_max_roots);
        if !picks.is_empty() {
            let mut roots = current.roots().to_vec();
            for &(i, _) in &picks {
                roots[i].multiplicity += 1;
                extra[i] += 1;
                step1_copies += 1;
                if roots[i].value.im > 0.0 {
                    roots[i + 1].multiplicity += 1;
                    extra[i + 1] += 1;
                    step1_copies += 1;
                }
            }
            current = PreconditionerPolynomial::from_parts(roots)?;
            let mut fresh = pof(&current);
            for (f, old) in fresh.entries.iter_mut().zip(&report.entries) {
                f.residual = old.residual;
                f.spurious = old.spurious;
            }
            report = fresh;
        }
    }

    if sides.two_sided {
        // A root's own copies leave its pof unchanged; each one is credited
        // with the 14 orders it is meant to absorb.
        let worst = report
            .entries
            .iter()
            .filter(|e| e.side == small && !e.spurious)
            .map(|e| e.log10_pof - 14.0 * extra[e.index] as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        if worst > config.small_side_pof_abort_log10 {
            return Err(Error::DegreeTooHigh {
                log10_pof: worst,
                limit: config.small_side_pof_abort_log10,
            });
        }
    }

    let larger = sides.larger;
    let two_sided = sides.two_sided;
    let (augmented, added3) = add_root_copies(&current, &report, cutoff, |r, e| {
        r.source != RootSource::Balance && !e.spurious && (!two_sided || e.side == larger)
    });
    let mut final_report = pof(&augmented);
    for (f, old) in final_report.entries.iter_mut().zip(&report.entries) {
        f.residual = old.residual;
        f.spurious = old.spurious;
    }

    let mut candidates: Vec<(Complex64, f64)> = final_report
        .entries
        .iter()
        .filter(|e| {
            two_sided
                && e.side == small
                && e.root.im >= 0.0
                && !e.spurious
                && e.log10_pof > cutoff
                && e.residual.is_some_and(|r| r <= config.rncutoff)
        })
        .map(|e| (e.root, e.log10_pof))
        .collect();
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1));
    let spurious = final_report
        .entries
        .iter()
        .filter(|e| e.spurious && e.root.im >= 0.0)
        .map(|e| e.root)
        .collect();
    Ok(StabilityOutcome {
        poly: augmented,
        report: final_report,
        sides: Some(sides),
        step1_copies,
        added: step1_copies + added3,
        deflation_candidates: candidates.into_iter().map(|c| c.0).collect(),
        spurious,
        warnings,
    })
}

/// Product-form vectors `Π_{i≠j}(I − A/θ_i) start` for the given roots of
/// `base`, real and imaginary parts separately for complex roots, at most
/// `cap` vectors.
pub fn deflation_vectors(
    base: &PreconditionerPolynomial,
    op: &dyn LinearOperator,
    start: &[f64],
    roots: &[Complex64],
    cap: usize,
) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for &z in roots {
        if out.len() >= cap {
            break;
        }
        let Some(j) = base_index(base, z) else { continue };
        let (re, im) = base.product_without(j, op, start);
        out.push(re);
        if z.im != 0.0 && out.len() < cap {
            out.push(im);
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct DeflationResult {
    pub x: Vec<f64>,
    /// Independent directions actually used.
    pub rank: usize,
    pub warning: Option<String>,
}

/// Galerkin correction `x + Y g` with `(YᵀAY) g = Yᵀ(b − Ax)` over an
/// orthonormalized copy of `vectors`, which makes the new residual
/// orthogonal to their span.
pub fn galerkin_deflation(
    op: &dyn LinearOperator,
    x: &[f64],
    b: &[f64],
    vectors: &[Vec<f64>],
) -> Result<DeflationResult> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    let mut dropped = 0;
    for v in vectors {
        let nv = norm2(v);
        if nv == 0.0 || !nv.is_finite() {
            dropped += 1;
            continue;
        }
        let mut w = v.clone();
        cgs_orthogonalize(&basis, &mut w, true);
        if norm2(&w) <= 1e-10 * nv {
            dropped += 1;
            continue;
        }
        normalize(&mut w);
        basis.push(w);
    }
    let mut warning = (dropped > 0).then(|| format!("{dropped} dependent deflation vectors dropped"));
    if basis.is_empty() {
        return Ok(DeflationResult {
            x: x.to_vec(),
            rank: 0,
            warning,
        });
    }
    let ay: Vec<Vec<f64>> = basis.iter().map(|y| op.apply_vec(y)).collect();
    let ax = op.apply_vec(x);
    let mut r = vec![0.0; b.len()];
    sub_into(b, &ax, &mut r);
    let k = basis.len();
    let proj = DenseMatrix::from_fn(k, k, |i, j| dot(&basis[i], &ay[j]));
    let rhs: Vec<f64> = basis.iter().map(|y| dot(y, &r)).collect();
    let g = match lu_solve(&proj, &rhs) {
        Ok(g) if g.iter().all(|v| v.is_finite()) => g,
        _ => {
            warning = Some("projected matrix is singular; deflation skipped".into());
            return Ok(DeflationResult {
                x: x.to_vec(),
                rank: 0,
                warning,
            });
        }
    };
    let mut out = x.to_vec();
    for (gi, y) in g.iter().zip(&basis) {
        axpy(*gi, y, &mut out);
    }
    Ok(DeflationResult { x: out, rank: k, warning })
}

/// `k` GMRES iterations without preconditioning, from `x`.
pub fn gmres_correction(op: &dyn LinearOperator, x: &[f64], b: &[f64], k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Ok(x.to_vec());
    }
    Ok(gmres_cycle(op, b, x, k)?.x)
}

/// Deflation over `vectors` (skipped when empty) followed by GMRES. The best
/// iterate seen is returned, so the true residual never grows.
pub fn correction_phase(
    op: &dyn LinearOperator,
    x: &[f64],
    b: &[f64],
    vectors: &[Vec<f64>],
    config: &StabilityConfig,
) -> Result<(Vec<f64>, CorrectionReport)> {
    let mv0 = op.matvecs();
    let mut report = CorrectionReport {
        residual_before: residual_norm(op, b, x),
        ..CorrectionReport::default()
    };
    let mut best = (x.to_vec(), report.residual_before);
    let mut cur = x.to_vec();
    if !vectors.is_empty() {
        let d = galerkin_deflation(op, x, b, vectors)?;
        report.deflation_vectors = d.rank;
        report.warnings.extend(d.warning);
        let res = residual_norm(op, b, &d.x);
        report.residual_after_deflation = Some(res);
        cur = d.x;
        if res <= best.1 {
            best = (cur.clone(), res);
        }
    }
    let after = gmres_correction(op, &cur, b, config.gmres_correction_iters)?;
    let res = residual_norm(op, b, &after);
    report.residual_after_gmres = Some(res);
    if res <= best.1 {
        best = (after, res);
    } else {
        report
            .warnings
            .push("correction increased the residual; keeping the better iterate".into());
    }
    report.matvecs = op.matvecs() - mv0;
    Ok((best.0, report))
}
