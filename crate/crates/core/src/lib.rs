//! Exact and Monte Carlo tools for singularity of discrete random matrices.

pub mod bounds;
pub mod dist;
pub mod ensembles;
pub mod error;
pub mod exact;
pub mod harness;
pub mod oracle;
pub mod seed;
pub mod xlinalg;

pub use error::{Error, Result};
