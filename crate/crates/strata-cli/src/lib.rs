//! Library half of the `strata` binary: input loading, command
//! implementations, and report rendering. The thin `main` maps command-line
//! flags onto [`commands`] and turns the outcome into an exit code:
//! 0 when every check passed, 1 when a check ran and failed, 2 when the
//! input could not be parsed or validated.

pub mod commands;
pub mod input;
pub mod report;
