//! File formats, reports, and the batch experiment engine for the
//! participatory budgeting toolkit; `pbtool` is the binary front end.

pub mod cli;
pub mod constructions;
pub mod native;
pub mod pabulib;
pub mod report;
pub mod satspec;
pub mod sweep;
