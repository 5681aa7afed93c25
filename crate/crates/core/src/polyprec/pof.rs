use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{PreconditionerPolynomial, Root};

/// Sign of the real part of a root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Negative,
    Positive,
}

impl Side {
    pub fn of(z: Complex64) -> Side {
        if z.re < 0.0 {
            Side::Negative
        } else {
            Side::Positive
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Negative => Side::Positive,
            Side::Positive => Side::Negative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PofEntry {
    /// Index into the polynomial's distinct roots.
    pub index: usize,
    pub root: Complex64,
    pub log10_pof: f64,
    /// Harmonic Ritz residual norm, filled in when computed.
    pub residual: Option<f64>,
    pub spurious: bool,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PofReport {
    pub entries: Vec<PofEntry>,
    /// Set when some factor vanished (coincident roots); the affected pof
    /// is reported as `−∞`.
    pub degenerate: bool,
}

impl PofReport {
    pub fn max_log10(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.log10_pof)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `log10 |Π_{i≠j} (1 − θ_j/θ_i)^{m_i}|` for every distinct root `θ_j`.
///
/// All copies of `θ_j` itself are left out of its own product; its
/// multiplicity plays no part in its pof.
pub fn pof(poly: &PreconditionerPolynomial) -> PofReport {
    let roots = poly.roots();
    let mut degenerate = false;
    let entries = roots
        .iter()
        .enumerate()
        .map(|(j, rj)| {
            let mut s = 0.0;
            for (i, ri) in roots.iter().enumerate() {
                if i == j {
                    continue;
                }
                let f = (Complex64::new(1.0, 0.0) - rj.value / ri.value).norm();
                if f == 0.0 {
                    degenerate = true;
                }
                s += ri.multiplicity as f64 * f.log10();
            }
            PofEntry {
                index: j,
                root: rj.value,
                log10_pof: s,
                residual: None,
                spurious: false,
                side: Side::of(rj.value),
            }
        })
        .collect();
    PofReport {
        entries,
        degenerate,
    }
}

/// Least integer ≥ `(log10 pof − cutoff)/14`, zero at or below the cutoff.
pub fn copies_for(log10_pof: f64, cutoff_log10: f64) -> usize {
    if log10_pof > cutoff_log10 {
        ((log10_pof - cutoff_log10) / 14.0).ceil() as usize
    } else {
        0
    }
}

/// Adds stability copies to every root accepted by `filter` whose pof is
/// above the cutoff. Pairs are augmented together. Returns the new
/// polynomial and the number of copies added (counting both members of a
/// pair).
pub fn add_root_copies(
    poly: &PreconditionerPolynomial,
    report: &PofReport,
    cutoff_log10: f64,
    filter: impl Fn(&Root, &PofEntry) -> bool,
) -> (PreconditionerPolynomial, usize) {
    let mut roots = poly.roots().to_vec();
    let mut added = 0;
    for e in &report.entries {
        let r = &poly.roots()[e.index];
        if r.value.im < 0.0 || !filter(r, e) {
            continue;
        }
        let k = copies_for(e.log10_pof, cutoff_log10);
        if k == 0 {
            continue;
        }
        roots[e.index].multiplicity += k;
        added += k;
        if r.value.im > 0.0 {
            roots[e.index + 1].multiplicity += k;
            added += k;
        }
    }
    if added == 0 {
        return (poly.clone(), 0);
    }
    let out = PreconditionerPolynomial::from_parts(roots).expect("augmentation keeps validity");
    (out, added)
}
