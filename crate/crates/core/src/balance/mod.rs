//! Balancing: making `φ` flat at the origin (or level across an interval)
//! so that an indefinite spectrum is mapped to a definite one.

mod composite;
mod newton;
mod spline;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyprec::{PreconditionerPolynomial, RootSource};

pub use composite::{balance4, CompositePolynomial};
pub use newton::{balance3, NewtonPolynomial, NORMAL_EQUATIONS_COND_WARN};
pub use spline::{hermite_cubic, spline_definiteness_test, FlaggedInterval, HermiteCubic, SplineVerdict};

/// Balancing methods selectable from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BalanceMethod {
    #[default]
    None,
    B1,
    B2,
    B3,
    B4,
    B5,
}

impl BalanceMethod {
    pub fn name(self) -> &'static str {
        match self {
            BalanceMethod::None => "none",
            BalanceMethod::B1 => "b1",
            BalanceMethod::B2 => "b2",
            BalanceMethod::B3 => "b3",
            BalanceMethod::B4 => "b4",
            BalanceMethod::B5 => "b5",
        }
    }
}

impl std::str::FromStr for BalanceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "none" => BalanceMethod::None,
            "b1" => BalanceMethod::B1,
            "b2" => BalanceMethod::B2,
            "b3" => BalanceMethod::B3,
            "b4" => BalanceMethod::B4,
            "b5" => BalanceMethod::B5,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown balance method {other:?}; expected none|b1|b2|b3|b4|b5"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceOutcome {
    pub poly: PreconditionerPolynomial,
    /// The added balancing root.
    pub eta: Option<f64>,
    /// Roots taken out (Method 2).
    pub removed: Vec<Complex64>,
    pub note: Option<String>,
}

impl BalanceOutcome {
    fn unchanged(poly: &PreconditionerPolynomial, note: &str) -> Self {
        Self {
            poly: poly.clone(),
            eta: None,
            removed: Vec::new(),
            note: Some(note.to_string()),
        }
    }
}

fn add_eta(poly: &PreconditionerPolynomial, eta: f64) -> Result<PreconditionerPolynomial> {
    if !eta.is_finite() || eta == 0.0 {
        return Err(Error::Degenerate(format!("balancing root {eta} is unusable")));
    }
    poly.with_root(Complex64::new(eta, 0.0), RootSource::Balance)
}

/// Method 1: append `η = −1/Σ m_i/θ_i` so that `φ′(0) = 0`.
pub fn balance1(poly: &PreconditionerPolynomial) -> Result<BalanceOutcome> {
    let s = poly.slope_at_origin();
    if s == 0.0 {
        return Ok(BalanceOutcome::unchanged(poly, "already balanced"));
    }
    let eta = -1.0 / s;
    Ok(BalanceOutcome {
        poly: add_eta(poly, eta)?,
        eta: Some(eta),
        removed: Vec::new(),
        note: None,
    })
}

/// Method 2: drop the real root or conjugate pair whose reciprocal (sum)
/// ξ is closest to `φ′(0)`, then balance the remainder with one new root.
/// Falls back to Method 1 when no removal brings the slope closer to zero.
pub fn balance2(poly: &PreconditionerPolynomial) -> Result<BalanceOutcome> {
    if poly.degree() < 2 {
        return Err(Error::InvalidArgument("balance method 2 needs degree >= 2".into()));
    }
    let s = poly.slope_at_origin();
    let mut best: Option<(usize, f64)> = None;
    for (i, r) in poly.roots().iter().enumerate() {
        if r.value.im < 0.0 {
            continue;
        }
        let xi = if r.value.im == 0.0 {
            1.0 / r.value.re
        } else {
            2.0 * (1.0 / r.value).re
        };
        if best.is_none_or(|(_, b)| (s - xi).abs() < (s - b).abs()) {
            best = Some((i, xi));
        }
    }
    let (i, xi) = best.expect("degree >= 2 has roots");
    if (s - xi).abs() >= s.abs() {
        let mut out = balance1(poly)?;
        out.note = Some("no removal reduces the slope; same as method 1".into());
        return Ok(out);
    }
    let eta = -1.0 / (s - xi);
    if !eta.is_finite() {
        let mut out = balance1(poly)?;
        out.note = Some("removal leaves an exactly balanced sum; same as method 1".into());
        return Ok(out);
    }
    let z = poly.roots()[i].value;
    let mut removed = vec![z];
    if z.im != 0.0 {
        removed.push(z.conj());
    }
    let reduced = poly.without_one(i)?;
    Ok(BalanceOutcome {
        poly: add_eta(&reduced, eta)?,
        eta: Some(eta),
        removed,
        note: None,
    })
}

/// Method 5: append `η = a(β+1)/(β−1)`, `β = π(a)/π(−a)`, so that
/// `φ(a) = φ(−a)`.
pub fn balance5(poly: &PreconditionerPolynomial, a: f64) -> Result<BalanceOutcome> {
    if a <= 0.0 || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("interval half-width {a} must be positive")));
    }
    let pa = poly.pi_eval(Complex64::new(a, 0.0)).re;
    let pm = poly.pi_eval(Complex64::new(-a, 0.0)).re;
    if pa == pm {
        return Ok(BalanceOutcome::unchanged(poly, "already level on the interval"));
    }
    let eta = if pm == 0.0 {
        a
    } else {
        let beta = pa / pm;
        a * (beta + 1.0) / (beta - 1.0)
    };
    Ok(BalanceOutcome {
        poly: add_eta(poly, eta)?,
        eta: Some(eta),
        removed: Vec::new(),
        note: None,
    })
}
