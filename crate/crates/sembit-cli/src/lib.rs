//! Batch front end: config parsing, command dispatch, deterministic CSV,
//! SVG and JSON artifacts.

pub mod commands;
pub mod config;
pub mod plot;
pub mod report;
