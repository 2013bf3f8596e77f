//! Experiment driver: JSON configs in, CSV tables and JSON gate reports out.

pub mod config;
pub mod report;
pub mod stats;
pub mod sweep;
