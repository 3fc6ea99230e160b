//! Toolchain around [`matra_core`]: the `*.matra.json` document format,
//! report renderers, the `matra` command line and its HTTP service.

pub mod cli;
pub mod io;
pub mod report;
pub mod service;

pub use matra_core as core;

/// The OpenClaw case-study model shipped with the crate.
pub const OPENCLAW_MODEL: &str = include_str!("../models/openclaw.matra.json");
