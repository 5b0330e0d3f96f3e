//! Verification tools: manufactured solutions, residuals, an independent
//! boundary-value oracle and estimate sweeps.

pub mod estimates;
pub mod manufactured;
pub mod oracle;
pub mod residual;
pub mod suites;
