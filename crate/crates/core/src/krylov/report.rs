use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Version of the JSON layout written by [`SolveReport::to_json`].
pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle: usize,
    pub shortcut: f64,
    pub true_residual: Option<f64>,
    pub cum_matvecs: u64,
}

/// Outcome of the correction phase run after a polynomial-preconditioned
/// solve whose true residual lags the shortcut residual.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrectionReport {
    pub residual_before: f64,
    pub residual_after_deflation: Option<f64>,
    pub residual_after_gmres: Option<f64>,
    pub deflation_vectors: usize,
    /// Roots judged spurious by the residual test.
    pub spurious_roots: Vec<Complex64>,
    pub matvecs: u64,
    pub warnings: Vec<String>,
}

impl CorrectionReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_after_gmres
            .or(self.residual_after_deflation)
            .unwrap_or(self.residual_before)
    }
}

/// Everything a solve reports. Counters cover the whole call: vector ops are
/// length-n updates (axpy, scaling, subtraction, copies) and dot products
/// include norms, both inside and outside the polynomial application.
///
/// Timings are deliberately absent so equal seeds give identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema: u32,
    pub method: String,
    pub n: usize,
    pub m: usize,
    /// Requested polynomial degree (1 for plain GMRES).
    pub d: usize,
    /// Degree of the polynomial actually used, including added roots.
    pub degree: usize,
    pub added_copies: usize,
    pub balance: String,
    pub seed: Option<u64>,
    pub converged: bool,
    pub stagnated: bool,
    pub cycles: usize,
    pub iterations: usize,
    pub matvecs: u64,
    pub polynomial_matvecs: u64,
    pub vector_ops: u64,
    pub dot_products: u64,
    pub rhs_norm: f64,
    pub final_shortcut: f64,
    pub final_true_residual: Option<f64>,
    pub retries: usize,
    pub history: Vec<CycleRecord>,
    pub corrections: Option<CorrectionReport>,
    pub warnings: Vec<String>,
}

impl SolveReport {
    pub fn new(method: &str, n: usize, rhs_norm: f64) -> Self {
        Self {
            schema: REPORT_SCHEMA,
            method: method.to_string(),
            n,
            m: 0,
            d: 1,
            degree: 1,
            added_copies: 0,
            balance: "none".into(),
            seed: None,
            converged: false,
            stagnated: false,
            cycles: 0,
            iterations: 0,
            matvecs: 0,
            polynomial_matvecs: 0,
            vector_ops: 0,
            dot_products: 0,
            rhs_norm,
            final_shortcut: rhs_norm,
            final_true_residual: None,
            retries: 0,
            history: Vec::new(),
            corrections: None,
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// `cycle,shortcut,true,cum_matvecs`, true residual blank when not computed.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "cycle,shortcut,true,cum_matvecs")?;
        writeln!(w, "0,{:e},,0", self.rhs_norm)?;
        for r in &self.history {
            match r.true_residual {
                Some(t) => writeln!(w, "{},{:e},{:e},{}", r.cycle, r.shortcut, t, r.cum_matvecs)?,
                None => writeln!(w, "{},{:e},,{}", r.cycle, r.shortcut, r.cum_matvecs)?,
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut r = SolveReport::new("pp-gmres", 10, 1.0);
        r.history.push(CycleRecord {
            cycle: 1,
            shortcut: 0.5,
            true_residual: Some(0.25),
            cum_matvecs: 7,
        });
        r.corrections = Some(CorrectionReport {
            spurious_roots: vec![Complex64::new(1.0, -2.0)],
            ..Default::default()
        });
        let back = SolveReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_json().contains("\"schema\": 1"));
    }

    #[test]
    fn csv_layout() {
        let mut r = SolveReport::new("gmres", 3, 2.0);
        r.history.push(CycleRecord {
            cycle: 1,
            shortcut: 0.5,
            true_residual: None,
            cum_matvecs: 4,
        });
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "cycle,shortcut,true,cum_matvecs");
        assert_eq!(lines[1], "0,2e0,,0");
        assert_eq!(lines[2], "1,5e-1,,4");
    }
}
