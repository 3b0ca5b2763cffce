//! Experiment harness over the core pipeline: configuration, stage
//! orchestration, and report emission. The `qxai` binary is a thin clap
//! wrapper over these functions.

pub mod config;
pub mod pipeline;
pub mod report;
