//! Arnoldi, GMRES and Ritz extraction.

mod arnoldi;
mod gmres;
mod report;
mod ritz;

pub use arnoldi::{arnoldi, ArnoldiFactorization, BREAKDOWN_TOL};
pub(crate) use arnoldi::arnoldi_step;
pub use gmres::{
    gmres_cycle, gmres_cycle_with, restarted_gmres, restarted_gmres_with, CycleOptions, GmresCycle,
    GmresOptions, STAGNATION_TOL,
};
pub use report::{CorrectionReport, CycleRecord, SolveReport, REPORT_SCHEMA};
pub use ritz::{harmonic_ritz_residual, harmonic_ritz_values, ritz_values};
