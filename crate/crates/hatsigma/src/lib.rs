//! Std companion of `hatsigma-core`: JSON formats, a caching transporter,
//! seeded samplers, the invariant suite and the command-line runner.

pub mod cache;
pub mod cli;
pub mod error;
pub mod format;
pub mod report;
pub mod sample;
pub mod suite;

pub use error::{Error, Result};
