//! Scenario runner for the `genconvex` library.
//!
//! A scenario file names a command (`certify`, `falsify`, `verify`, `reduce`
//! or `sweep`) and its inputs; [`runner::run`] executes it and
//! [`report`] renders the result as text, JSON or CSV.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod report;
pub mod runner;
pub mod scenario;

pub use runner::{exit, run, Report};
pub use scenario::{Overrides, Scenario, SchemaError};
