//! GMRES-polynomial preconditioning for indefinite linear systems and
//! interior eigenvalue problems.

pub mod analysis;
pub mod balance;
pub mod drivers;
pub mod error;
pub mod krylov;
pub mod la;
pub mod operators;
pub mod polyprec;
pub mod rng;
pub mod stability;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use balance::BalanceMethod;
pub use drivers::{EigConfig, EigenResult, PPGmresConfig, PolySpec};
pub use krylov::SolveReport;
pub use operators::{LinearOperator, MatrixOperator};
pub use polyprec::{Preconditioner, PreconditionerPolynomial};
pub use stability::{StabilityConfig, StabilityMode};
