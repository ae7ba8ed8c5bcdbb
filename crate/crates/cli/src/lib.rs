//! Experiment runner and validation suite built on the `hetmarket` library.

pub mod checks;
pub mod config;
pub mod csv;
pub mod experiments;
