//! Chebyshev-based convergence estimates for two-interval spectra, and
//! sampling of polynomials for plotting.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyprec::Preconditioner;

/// Spectrum inside `[u, v] ∪ [a, b]` with `u < v < 0 < a < b` and the longer
/// interval on the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpectrum {
    pub u: f64,
    pub v: f64,
    pub a: f64,
    pub b: f64,
}

impl IntervalSpectrum {
    pub fn new(u: f64, v: f64, a: f64, b: f64) -> Result<Self> {
        let all_finite = [u, v, a, b].iter().all(|x| x.is_finite());
        if !(all_finite && u < v && v < 0.0 && 0.0 < a && a < b) {
            return Err(Error::InvalidArgument(format!(
                "need u < v < 0 < a < b, got u={u}, v={v}, a={a}, b={b}"
            )));
        }
        if b - a < v - u {
            return Err(Error::InvalidArgument(
                "the right interval must be the longer one; reflect the spectrum".into(),
            ));
        }
        Ok(Self { u, v, a, b })
    }

    /// `h(x) = (x − a)(x − b)(x − v)`.
    pub fn h(&self, x: f64) -> f64 {
        (x - self.a) * (x - self.b) * (x - self.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Scaled by `h(u)`: the left end is the lowest point.
    U,
    /// Scaled by `h(γ₂)`: the local minimum is the lowest point.
    Gamma2,
}

/// The cubic `f(x) = 1 − 2 h(x)/h(ξ)` taking both intervals into `[−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicMap {
    pub spectrum: IntervalSpectrum,
    pub gamma1: f64,
    pub gamma2: f64,
    pub branch: Branch,
    pub xi: f64,
    /// `f(0) − 1`.
    pub delta: f64,
    /// `δ` under the other branch when the branch test is marginal.
    pub alternate_delta: Option<f64>,
}

impl CubicMap {
    pub fn eval(&self, x: f64) -> f64 {
        1.0 - 2.0 * self.spectrum.h(x) / self.spectrum.h(self.xi)
    }
}

pub fn cubic_map(s: IntervalSpectrum) -> CubicMap {
    let (a, b, v) = (s.a, s.b, s.v);
    let root = (a * a + b * b + v * v - (a * b + a * v + b * v)).sqrt();
    let gamma1 = (a + b + v - root) / 3.0;
    let gamma2 = (a + b + v + root) / 3.0;
    let mirror = a + b + v - 2.0 * gamma2;
    let (branch, xi) = if s.u <= mirror {
        (Branch::U, s.u)
    } else {
        (Branch::Gamma2, gamma2)
    };
    let delta_for = |xi: f64| -2.0 * s.h(0.0) / s.h(xi);
    let alternate_delta = ((s.u - mirror).abs() < 1e-9 * s.u.abs()).then(|| match branch {
        Branch::U => delta_for(gamma2),
        Branch::Gamma2 => delta_for(s.u),
    });
    CubicMap {
        spectrum: s,
        gamma1,
        gamma2,
        branch,
        xi,
        delta: delta_for(xi),
        alternate_delta,
    }
}

/// `T_m(x)` by the three-term recurrence.
pub fn chebyshev(m: usize, x: f64) -> f64 {
    match m {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut t0, mut t1) = (1.0, x);
            for _ in 1..m {
                let t2 = 2.0 * x * t1 - t0;
                t0 = t1;
                t1 = t2;
            }
            t1
        }
    }
}

/// `T_ν(x) = cosh(ν · acosh x)` for `x ≥ 1`; `ν` may be fractional.
pub fn chebyshev_cosh(nu: f64, x: f64) -> f64 {
    debug_assert!(x >= 1.0);
    (nu * x.acosh()).cosh()
}

/// `ln T_ν(x)` for `x ≥ 1`, finite where `T_ν(x)` itself would overflow.
fn ln_chebyshev(nu: f64, x: f64) -> f64 {
    let t = nu * x.acosh();
    // ln cosh t = t + ln(1 + e^{−2t}) − ln 2
    t + (-2.0 * t).exp().ln_1p() - std::f64::consts::LN_2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub spectrum: IntervalSpectrum,
    pub d: usize,
    pub m: usize,
    pub branch: Branch,
    pub delta: f64,
    pub alternate_delta: Option<f64>,
    /// Residual reduction per GMRES(m) cycle, `1/T_{m/3}(1+δ)`.
    pub per_cycle_gmres: f64,
    /// Residual reduction per PP(d)-GMRES(m) cycle, `1/T_m(T_{d/3}(1+δ))`.
    pub per_cycle_ppgmres: f64,
    /// Predicted ratio of matvecs, plain over preconditioned, for the same
    /// reduction.
    pub speedup_matvecs: f64,
    /// The first-order prediction `d`.
    pub speedup_first_order: f64,
}

/// Per-cycle factors from the cubic model; fractional Chebyshev indices use
/// the `cosh` form. Reduction factors are reported in log space where
/// they underflow.
pub fn estimate_improvement(spec: IntervalSpectrum, d: usize, m: usize) -> Result<Estimate> {
    if d == 0 || m == 0 {
        return Err(Error::InvalidArgument("d and m must be at least 1".into()));
    }
    let map = cubic_map(spec);
    if !(map.delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cubic model gives delta = {}; the interval model does not apply",
            map.delta
        )));
    }
    let x = 1.0 + map.delta;
    let ln_g = -ln_chebyshev(m as f64 / 3.0, x);
    // T_m(T_{d/3}(x)) = T_{m d/3}(x) for x ≥ 1
    let ln_pp = -ln_chebyshev(m as f64 * d as f64 / 3.0, x);
    Ok(Estimate {
        spectrum: spec,
        d,
        m,
        branch: map.branch,
        delta: map.delta,
        alternate_delta: map.alternate_delta,
        per_cycle_gmres: ln_g.exp(),
        per_cycle_ppgmres: ln_pp.exp(),
        speedup_matvecs: ln_pp / (d as f64 * ln_g),
        speedup_first_order: d as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: f64,
    pub y: f64,
    pub re_phi: f64,
    pub im_phi: f64,
}

/// Rectangular grid `lo..=hi` with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_lo: f64,
    pub x_hi: f64,
    pub nx: usize,
    pub y_lo: f64,
    pub y_hi: f64,
    pub ny: usize,
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `φ` on every grid point, rows of constant `y`.
pub fn sample_polynomial(poly: &dyn Preconditioner, grid: &Grid) -> Vec<Sample> {
    let xs = axis(grid.x_lo, grid.x_hi, grid.nx);
    let ys = axis(grid.y_lo, grid.y_hi, grid.ny);
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            let p = poly.phi_eval(Complex64::new(x, y));
            out.push(Sample {
                x,
                y,
                re_phi: p.re,
                im_phi: p.im,
            });
        }
    }
    out
}

/// `φ` on `lo, lo + step, …` up to `hi` along the real axis.
pub fn sample_real_axis(poly: &dyn Preconditioner, lo: f64, hi: f64, step: f64) -> Result<Vec<Sample>> {
    if !(step > 0.0) || !(hi >= lo) {
        return Err(Error::InvalidArgument(format!("bad sampling range {lo}:{hi}:{step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| {
            let x = lo + i as f64 * step;
            let p = poly.phi_eval(Complex64::new(x, 0.0));
            Sample {
                x,
                y: 0.0,
                re_phi: p.re,
                im_phi: p.im,
            }
        })
        .collect())
}

pub fn write_samples_csv(samples: &[Sample], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "x,y,re_phi,im_phi")?;
    for s in samples {
        writeln!(w, "{:e},{:e},{:e},{:e}", s.x, s.y, s.re_phi, s.im_phi)?;
    }
    Ok(())
}
