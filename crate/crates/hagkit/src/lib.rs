//! Std companion to `hagedorn-core`: file formats, batch evaluation over
//! worker threads, the benchmark, the acceptance suite and the `hagkit`
//! command line.

pub mod acceptance;
pub mod bench;
pub mod cli;
pub mod error;
pub mod io;
pub mod parallel;
pub mod testkit;

pub use error::{Failure, Outcome};
