//! File formats, experiment runner and command-line front end for
//! `tiedmatch-core`.

pub mod cli;
pub mod experiments;
pub mod io;
pub mod report;
