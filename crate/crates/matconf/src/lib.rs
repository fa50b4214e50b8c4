//! File formats, simulation harness and command-line support for
//! [`matconf_core`].

pub mod config;
pub mod harness;
pub mod matrix_csv;
pub mod predict;
pub mod records;
pub mod report;
