//! Configuration, experiments and report writers behind the `dap` binary.

pub mod commands;
pub mod config;
pub mod models;
pub mod output;
