//! Allocation-only core of the semantic importance index toolkit.
//!
//! Everything in this crate is a pure function of in-memory data: building
//! word co-occurrence networks from token streams, the three node measures
//! (prevalence, distinctiveness, weighted betweenness) and their per-period
//! standardization, the composite score matrix, the co-occurrence sentiment
//! index, weekly market targets, one-component PLS aggregation, recursive
//! expanding-window ARX forecasting and the accuracy statistics used to
//! evaluate it.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, text
//! normalization, calendars and the command line live in the `semidx`
//! companion crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(feature = "std")]
extern crate std;

pub mod centrality;
pub mod error;
pub mod eval;
pub mod forecast;
pub mod graph;
pub mod index;
pub mod linalg;
pub mod market;
pub mod math;
pub mod network;
pub mod pls;
pub mod sentiment;
pub mod token;

pub use error::{Error, Result};
pub use graph::WeightedGraph;
pub use network::CooccurrenceNetwork;
pub use token::Token;
