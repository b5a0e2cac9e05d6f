//! Turns ledgers into verdicts.
//!
//! Every check compares a differenced left side against the logged right
//! side row by row. Where the inequality carries an unnamed constant, the
//! smallest constant that makes it hold over the trajectory is reported as a
//! certificate, so runs at different resolutions can be compared.

mod checks;
mod derivative;
pub mod fixtures;
mod ledger;
mod report;

pub use checks::{
    two_route_audit, verify_blowup_rate, verify_decomposition_decay, verify_h1_inequality,
    verify_h2_inequality, verify_l2_inequality, LabTolerance,
};
pub use derivative::{d_dtau, derivative_error};
pub use ledger::{EnergyLedger, LedgerRow, LEDGER_COLUMNS};
pub use report::{CertificateConstant, Check, InequalityId, InequalityReport, Status};

#[cfg(test)]
mod tests;
