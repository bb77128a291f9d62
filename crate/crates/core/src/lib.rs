//! Expected-loss modeling, Monte-Carlo simulation and budget optimization
//! for crowdsourced screening of candidate papers.

pub mod analytic;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod model;
pub mod optimizer;
pub mod simulator;

pub use error::{Error, Result};
