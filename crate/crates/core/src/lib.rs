//! Replicator dynamics of a four-strategy social interaction game: payoffs,
//! analytic classification of stationary states and phase-portrait regimes,
//! numerical integration, welfare comparison and basin estimation.

pub mod basins;
pub mod classify;
pub mod cli;
pub mod dynamics;
mod error;
pub mod model;
pub mod welfare;

pub use error::{Error, Result};
