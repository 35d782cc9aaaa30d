//! Quantum Fisher information of Gibbs states with respect to Hamiltonian
//! coefficients, with analytic bounds, exact model solvers and numerical
//! cross-checks.
//!
//! ```
//! use thermal_qfi::{bounds::bound_report, models::spin_chain};
//!
//! let h = spin_chain(3, 1.0, 0.5).unwrap();
//! let report = bound_report(&h, 0.8, 1, 0.1).unwrap();
//! assert!(report.check_sandwich(1e-9).is_empty());
//! ```

// NaN must fail validation, so negated comparisons are intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod gibbs;
pub mod models;
pub mod operator;
mod par;
pub mod qfi;
pub mod random;

pub use error::{Error, Result};
pub use gibbs::{thermal_state, HamiltonianTerm, ParamHamiltonian, ThermalState};
pub use operator::{eigendecompose, HermitianOperator, PauliString};
pub use par::is_parallel;
pub use qfi::{qfi_matrix, QfiMatrix};
