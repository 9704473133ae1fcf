//! Verification harness for `weakrel`: seeded sweeps over the uncertainty
//! and complementarity relations, named fixtures, convergence studies and
//! JSON / CSV reports.

pub mod config;
pub mod fixtures;
pub mod report;
pub mod studies;
pub mod sweep;

pub use config::SweepConfig;
pub use fixtures::run_fixtures;
pub use report::{emit_report, ReportSet};
pub use sweep::run_sweep;
