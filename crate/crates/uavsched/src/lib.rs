//! File formats, batch drivers and the command-line front end for
//! [`uavsched_core`].
//!
//! - [`io`]: versioned JSON documents for scenarios, plans, validation and
//!   evaluation reports.
//! - [`run`]: plan a scenario with any algorithm and validate the result.
//! - [`parallel`]: the exact search spread over a rayon pool.
//! - [`sweep`]: grid search over uniform mission weights.
//! - [`bench`]: runtime scaling of the heuristics.
//! - [`report`]: CSV tables.
//! - [`manifest`]: per-run provenance of inputs and outputs.

pub mod bench;
pub mod error;
pub mod io;
pub mod manifest;
pub mod parallel;
pub mod report;
pub mod run;
pub mod sweep;

pub use error::{Error, Result};
