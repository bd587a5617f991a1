//! Experiment driver for radio stripe WPT planning: scenario ingestion,
//! cluster / deploy / evaluate orchestration, parameter sweeps, and CSV
//! report emission.

pub mod config;
pub mod experiment;
pub mod report;
