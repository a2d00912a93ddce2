//! Command-line front end for the first-integral library: problem files
//! describe a dynamical system together with symmetry data, a sampling
//! box, and optional numeric runs; the subcommands dispatch to the library
//! constructors and emit human-readable or newline-delimited JSON reports.
//!
//! The exit-code contract is stable across subcommands: `0` means every
//! check passed, `1` means a check ran and failed (the report carries a
//! witness), and `2` means the input could not be processed at all.

pub mod commands;
pub mod problem;
pub mod report;
