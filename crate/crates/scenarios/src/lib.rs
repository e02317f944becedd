//! Scenario files, built-in examples, sweeps and residual reports on top of
//! `pbh-core`, plus the acceptance suite behind `pbh verify-paper`.

pub mod acceptance;
pub mod builtins;
pub mod corpus;
pub mod error;
pub mod report;
pub mod run;
pub mod schema;

pub use builtins::builtin;
pub use error::{Result, ScenarioError};
pub use report::{ResidualReport, Row, SweepReport, Verdict};
pub use run::{run, sweep, Overrides};
pub use schema::{Check, Scenario};
