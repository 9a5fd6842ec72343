//! File formats, remote scoring, report output, and benchmarking around the
//! compression engine.

pub mod bench;
pub mod config;
pub mod formats;
pub mod remote;
pub mod run;
pub mod synth;

pub use config::{EntropyKind, EvalMode, RunConfig};
pub use run::{execute, RunOutcome};
