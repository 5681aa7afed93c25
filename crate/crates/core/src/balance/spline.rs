//! Cubic Hermite screen for `π ≤ 1` between consecutive real roots.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::polyprec::PreconditionerPolynomial;

/// `C(x) = a t³/6 + b t²/2 + c t` with `t = x − θ₀`: the cubic vanishing at
/// both roots and matching the slopes `p₀, p₁` there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteCubic {
    pub theta0: f64,
    pub h: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub fn hermite_cubic(theta0: f64, theta1: f64, p0: f64, p1: f64) -> HermiteCubic {
    let h = theta1 - theta0;
    HermiteCubic {
        theta0,
        h,
        a: 6.0 * (p1 + p0) / (h * h),
        b: -(2.0 * p1 + 4.0 * p0) / h,
        c: p0,
    }
}

impl HermiteCubic {
    pub fn eval(&self, x: f64) -> f64 {
        let t = x - self.theta0;
        t * (self.c + t * (self.b / 2.0 + t * self.a / 6.0))
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let t = x - self.theta0;
        self.c + t * (self.b + t * self.a / 2.0)
    }

    /// Critical points strictly inside the interval.
    pub fn critical_points(&self) -> Vec<f64> {
        let mut ts = Vec::new();
        if self.a == 0.0 {
            if self.b != 0.0 {
                ts.push(-self.c / self.b);
            }
        } else {
            let disc = self.b * self.b - 2.0 * self.a * self.c;
            if disc >= 0.0 {
                let s = disc.sqrt();
                ts.push((-self.b + s) / self.a);
                ts.push((-self.b - s) / self.a);
            }
        }
        ts.into_iter()
            .filter(|&t| t > 0.0 && t < self.h)
            .map(|t| self.theta0 + t)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlaggedInterval {
    pub left: f64,
    pub right: f64,
    pub x_hat: f64,
    pub peak: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineVerdict {
    /// False when the polynomial has fewer than two real roots.
    pub applicable: bool,
    pub pass: bool,
    pub intervals_checked: usize,
    pub flagged: Vec<FlaggedInterval>,
}

/// Screens each interval between consecutive real roots of `π` on which `π`
/// starts upward. `ritz` supplies the extreme Ritz values used to discount
/// interval parts outside the spectrum; with no Ritz values every
/// interval peak above 1 is flagged.
pub fn spline_definiteness_test(poly: &PreconditionerPolynomial, ritz: &[Complex64]) -> SplineVerdict {
    let mut real: Vec<f64> = poly
        .roots()
        .iter()
        .filter(|r| r.value.im == 0.0)
        .map(|r| r.value.re)
        .collect();
    real.sort_by(f64::total_cmp);
    if real.len() < 2 {
        return SplineVerdict {
            applicable: false,
            pass: true,
            intervals_checked: 0,
            flagged: Vec::new(),
        };
    }
    let rmin = ritz.iter().map(|z| z.re).reduce(f64::min);
    let rmax = ritz.iter().map(|z| z.re).reduce(f64::max);
    let inside = |x: Option<f64>, lo: f64, hi: f64| x.is_some_and(|x| x > lo && x < hi);
    let within = |x: Option<f64>, lo: f64, hi: f64| x.is_some_and(|x| x >= lo && x <= hi);

    let slopes: Vec<f64> = real
        .iter()
        .map(|&t| poly.pi_deriv(Complex64::new(t, 0.0)).re)
        .collect();
    let mut flagged = Vec::new();
    let mut checked = 0;
    for j in 0..real.len() - 1 {
        let (t0, t1, p0, p1) = (real[j], real[j + 1], slopes[j], slopes[j + 1]);
        if p0 < 0.0 || (p0 == 0.0 && p1 == 0.0) {
            continue;
        }
        checked += 1;
        let cub = hermite_cubic(t0, t1, p0, p1);
        let Some((x_hat, peak)) = cub
            .critical_points()
            .into_iter()
            .map(|x| (x, cub.eval(x)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            continue;
        };
        if peak <= 1.0 {
            continue;
        }
        let g1 = within(rmin, x_hat, t1) && cub.eval(rmin.unwrap()) > 1.0;
        let g2 = within(rmax, t0, x_hat) && cub.eval(rmax.unwrap()) > 1.0;
        let g3 = !inside(rmin, x_hat, t1) && !inside(rmax, t0, x_hat);
        if g1 || g2 || g3 {
            flagged.push(FlaggedInterval {
                left: t0,
                right: t1,
                x_hat,
                peak,
            });
        }
    }
    SplineVerdict {
        applicable: true,
        pass: flagged.is_empty(),
        intervals_checked: checked,
        flagged,
    }
}
