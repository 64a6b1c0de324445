//! Scenario loading, batch runs and artifact output for the coverage
//! simulator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod config;
pub mod report;
pub mod snapshot;
pub mod trace;
