//! File formats, text processing and pipeline stages around `semidx-core`.

pub mod config;
pub mod corpus;
pub mod error;
pub mod io;
pub mod parallel;
pub mod pipeline;
pub mod synth;
pub mod textprep;

pub use error::{Error, Result};
pub use semidx_core;
