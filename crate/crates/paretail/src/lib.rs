//! File formats, run manifests and the command-line front end for
//! [`paretail_core`].

pub mod cli;
pub mod commands;
pub mod csvio;
pub mod data;
pub mod error;
pub mod manifest;
pub mod output;
pub mod svg;

pub use error::{AppError, Result};
pub use manifest::RunManifest;
