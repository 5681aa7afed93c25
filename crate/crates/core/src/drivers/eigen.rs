//! Interior eigenvalues near σ: thick-restarted Arnoldi on `φ(A − σI)`,
//! with Ritz values read off `A` itself.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{build_polynomial, PolySpec};
use crate::error::{Error, Result};
use crate::krylov::arnoldi_step;
use crate::la::{cgs_orthogonalize, combine, dot, eig_with_vectors, lu_solve, norm2, normalize, DenseMatrix};
use crate::operators::{LinearOperator, Shifted};
use crate::polyprec::PolyOperator;
use crate::rng::{stream, streams, unit_normal_vector};
use crate::stability::StabilityConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EigConfig {
    #[serde(flatten)]
    pub poly: PolySpec,
    pub sigma: f64,
    pub nev: usize,
    /// Largest subspace dimension.
    pub m: usize,
    /// Ritz vectors kept at a restart.
    pub k: usize,
    pub tol: f64,
    pub max_cycles: usize,
    pub max_mvp: u64,
    pub seed: u64,
    /// Harmonic rather than regular Rayleigh–Ritz for the values of `A`.
    pub harmonic: bool,
}

impl Default for EigConfig {
    fn default() -> Self {
        Self {
            poly: PolySpec {
                stability: StabilityConfig::off(),
                ..PolySpec::default()
            },
            sigma: 0.0,
            nev: 10,
            m: 80,
            k: 40,
            tol: 1e-8,
            max_cycles: 2000,
            max_mvp: 50_000_000,
            seed: 1,
            harmonic: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub schema: u32,
    pub sigma: f64,
    pub seed: u64,
    pub degree: usize,
    /// Eigenvalue estimates of `A`, nearest to σ first.
    pub values: Vec<Complex64>,
    /// `‖A v − λ v‖ / ‖v‖` for each value.
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub cycles: usize,
    pub matvecs: u64,
    pub polynomial_matvecs: u64,
    pub warnings: Vec<String>,
}

struct RitzPair {
    value: Complex64,
    residual: f64,
    /// `|φ(λ − σ)|`.
    score: f64,
}

/// Ritz pairs of `A` on the orthonormal basis `w` (with `aw = A w`).
fn rayleigh_ritz(
    w: &[Vec<f64>],
    aw: &[Vec<f64>],
    sigma: f64,
    harmonic: bool,
    phi: &dyn Fn(Complex64) -> Complex64,
) -> Result<Vec<RitzPair>> {
    let k = w.len();
    let n = w[0].len();
    let g = DenseMatrix::from_fn(k, k, |i, j| dot(&w[i], &aw[j]));
    let proj = if harmonic {
        // (BᵀW)⁻¹ BᵀB with B = (A − σ) W, whose eigenvalues are λ − σ
        let b: Vec<Vec<f64>> = aw
            .iter()
            .zip(w)
            .map(|(a, x)| a.iter().zip(x).map(|(ai, xi)| ai - sigma * xi).collect())
            .collect();
        let btw = DenseMatrix::from_fn(k, k, |i, j| dot(&b[i], &w[j]));
        let btb = DenseMatrix::from_fn(k, k, |i, j| dot(&b[i], &b[j]));
        let mut m = DenseMatrix::zeros(k, k);
        for j in 0..k {
            let col = lu_solve(&btw, btb.col(j))?;
            m.col_mut(j).copy_from_slice(&col);
        }
        m
    } else {
        g.clone()
    };
    let pairs = eig_with_vectors(&proj)?;
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut value = pairs.values[i];
        if harmonic {
            value += sigma;
        }
        let (zr, zi) = pairs.vector(i);
        let vr = combine(w, &zr, n);
        let vi = combine(w, &zi, n);
        let avr = combine(aw, &zr, n);
        let avi = combine(aw, &zi, n);
        let nv = norm2(&vr).hypot(norm2(&vi));
        if harmonic && value.im == 0.0 && nv > 0.0 {
            value = Complex64::new(dot(&vr, &avr) / (nv * nv), 0.0);
        }
        let mut rr = 0.0;
        for t in 0..n {
            let re = avr[t] - (value.re * vr[t] - value.im * vi[t]);
            let im = avi[t] - (value.re * vi[t] + value.im * vr[t]);
            rr += re * re + im * im;
        }
        out.push(RitzPair {
            value,
            residual: rr.sqrt() / nv,
            score: phi(value - sigma).norm(),
        });
    }
    Ok(out)
}

/// Orthonormal basis (as length-`j` columns) of the span of the selected
/// eigenvectors, real and imaginary parts separately.
fn restart_basis(h: &DenseMatrix, j: usize, keep: usize) -> Result<Vec<Vec<f64>>> {
    let pairs = eig_with_vectors(&h.top_left(j, j))?;
    let mut order: Vec<usize> = (0..j).collect();
    order.sort_by(|&a, &b| pairs.values[a].norm().total_cmp(&pairs.values[b].norm()).then(a.cmp(&b)));
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(keep + 1);
    let mut taken = vec![false; j];
    for &i in &order {
        if q.len() >= keep {
            break;
        }
        if taken[i] {
            continue;
        }
        let z = pairs.values[i];
        let (re, im) = pairs.vector(i);
        taken[i] = true;
        let mut parts = vec![re];
        if z.im != 0.0 {
            let partner = if z.im > 0.0 { i + 1 } else { i - 1 };
            taken[partner] = true;
            parts.push(im);
        }
        for mut v in parts {
            let nv = norm2(&v);
            cgs_orthogonalize(&q, &mut v, true);
            if norm2(&v) > 1e-10 * nv {
                normalize(&mut v);
                q.push(v);
            }
        }
    }
    Ok(q)
}

/// The `nev` eigenvalues of `A` whose images under `φ(· − σ)` lie closest
/// to zero, from Arnoldi(m, k) on `φ(A − σI)` with thick restarts.
///
/// The polynomial comes from GMRES(d) on `A − σI`; with balancing it is flat
/// at σ, so the eigenvalues around σ map next to zero while the rest of the
/// spectrum gathers near one.
pub fn pp_arnoldi_interior(op: &dyn LinearOperator, config: &EigConfig) -> Result<EigenResult> {
    let (m, k, nev) = (config.m, config.k, config.nev);
    if !(m > k && k >= nev && nev >= 1) {
        return Err(Error::InvalidArgument(format!(
            "need m > k >= nev >= 1, got m={m}, k={k}, nev={nev}"
        )));
    }
    if !(config.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {} must be positive", config.tol)));
    }
    let n = op.dim();
    if m >= n {
        return Err(Error::InvalidArgument(format!("subspace size {m} must be below n = {n}")));
    }
    let mv0 = op.matvecs();
    let shifted = Shifted::new(op, config.sigma);
    let build = build_polynomial(&shifted, &config.poly, config.seed)?;
    let poly = build.poly.as_dyn();
    let phi_op = PolyOperator::new(poly, &shifted);
    let phi = |z: Complex64| poly.phi_eval(z);

    let mut warnings = build.notes.clone();
    let mut basis = vec![unit_normal_vector(&mut stream(config.seed, streams::EIG_START), n)];
    let mut h = DenseMatrix::zeros(m + 1, m);
    let mut cols = 0;
    let mut cycles = 0;
    let (best, converged) = loop {
        let mut broke = false;
        while cols < m {
            let (col, b) = arnoldi_step(&phi_op, &mut basis, true);
            for (i, &v) in col.iter().enumerate() {
                h[(i, cols)] = v;
            }
            cols += 1;
            if b {
                broke = true;
                break;
            }
        }
        cycles += 1;
        let j = cols;
        let q = restart_basis(&h, j, k)?;
        let w: Vec<Vec<f64>> = q.iter().map(|qc| combine(&basis[..j], qc, n)).collect();
        let aw: Vec<Vec<f64>> = w.iter().map(|x| op.apply_vec(x)).collect();
        let mut pairs = rayleigh_ritz(&w, &aw, config.sigma, config.harmonic, &phi)?;
        pairs.sort_by(|a, b| a.score.total_cmp(&b.score));
        pairs.truncate(nev);
        let converged = pairs.len() == nev && pairs.iter().all(|p| p.residual <= config.tol);
        let out_of_budget = op.matvecs() - mv0 >= config.max_mvp || cycles >= config.max_cycles;
        if converged || broke || out_of_budget {
            if broke && !converged {
                warnings.push("Krylov space became invariant before convergence".into());
            }
            break (pairs, converged);
        }
        // compress: H ← QᵀHQ with the residual row h_{j+1,j} e_jᵀ Q
        let kk = q.len();
        let hq: Vec<Vec<f64>> = q
            .iter()
            .map(|qc| {
                (0..j)
                    .map(|r| (0..j).map(|c| h[(r, c)] * qc[c]).sum())
                    .collect()
            })
            .collect();
        let tail = h[(j, j - 1)];
        let mut hn = DenseMatrix::zeros(m + 1, m);
        for a in 0..kk {
            for (bcol, hqb) in hq.iter().enumerate() {
                hn[(a, bcol)] = dot(&q[a], hqb);
            }
        }
        for (bcol, qc) in q.iter().enumerate() {
            hn[(kk, bcol)] = tail * qc[j - 1];
        }
        let next = basis[j].clone();
        basis = w;
        basis.push(next);
        h = hn;
        cols = kk;
    };
    let mut best = best;
    if !converged {
        warnings.push(format!("stopped after {cycles} cycles without convergence"));
    }
    best.sort_by(|a, b| {
        (a.value - config.sigma)
            .norm()
            .total_cmp(&(b.value - config.sigma).norm())
    });
    let dist: Vec<f64> = best.iter().map(|p| (p.value - config.sigma).norm()).collect();
    if let (Some(&far), Some(&mid)) = (dist.last(), dist.get(dist.len() / 2)) {
        if mid > 0.0 && far > 10.0 * mid {
            warnings.push(format!(
                "returned values reach {far:.3e} from the target against a median of {mid:.3e}; \
                 the polynomial is probably too volatile at the ends of the spectrum"
            ));
        }
    }
    Ok(EigenResult {
        schema: crate::krylov::REPORT_SCHEMA,
        sigma: config.sigma,
        seed: config.seed,
        degree: build.poly.degree(),
        values: best.iter().map(|p| p.value).collect(),
        residuals: best.iter().map(|p| p.residual).collect(),
        converged,
        cycles,
        matvecs: op.matvecs() - mv0,
        polynomial_matvecs: build.matvecs,
        warnings,
    })
}
