//! Scenario files, experiment commands and result files for
//! [`invarion_core`].

pub mod commands;
pub mod config;
pub mod output;
pub mod parallel;
pub mod verify;
