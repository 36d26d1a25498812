//! Configuration files, deterministic tabular output, parameter sweeps and
//! the figure and counterexample pipelines built on [`floquet_qa`].

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod report;
pub mod sweep;
pub mod verify;

pub use error::{AppError, AppResult};
