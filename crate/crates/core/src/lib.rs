//! Resolution of liquid democracy delegations with multiple nominations per
//! delegator, plus the random graph process and experiment harness used to
//! study them.

pub mod analysis;
pub mod error;
pub mod experiments;
mod fenwick;
pub mod generator;
pub mod graph;
mod maxflow;
pub mod resolvers;

pub use error::{Error, Result};
