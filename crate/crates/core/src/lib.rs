//! Code ownership analytics over version-control history.
//!
//! The crate is organised as a pipeline:
//!
//! * [`ingest`] turns `git log --numstat` output, portable JSON-lines commit
//!   journals and issue-tracker exports into normalized records, and links
//!   bug issues to the files their fixing commits touched.
//! * [`ownership`] computes contribution ledgers, normalized ownership
//!   vectors and the file- and directory-level ownership metrics.
//! * [`stats`] holds the regression track: Spearman tables, OLS fits,
//!   nested-model F-tests, the R² sweep and LMG relative importance.
//! * [`learn`] holds the classification track: standardization, PCA,
//!   a random forest defect classifier and impurity importances.
//! * [`pipeline`] wires everything together behind a config file and emits
//!   CSV / Markdown / JSON reports.
//! * [`synth`] generates seeded synthetic histories with known ground truth
//!   and a brute-force metric oracle used by the test suites.

pub mod exec;
pub mod ingest;
pub mod learn;
pub mod ownership;
pub mod pipeline;
pub mod rng;
pub mod stats;
pub mod synth;

pub use exec::Execution;

/// Toolkit version recorded in every emitted report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
