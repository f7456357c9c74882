//! Scene analysis for table-top object estimates.
//!
//! The pipeline: oriented-box geometry turns a scene into relational
//! evidence (`geometry`, `scene`); weighted first-order rules score that
//! evidence and answer per-object queries such as "is this estimate
//! false" or "does something unseen support this object" (`knowledge`);
//! pinhole keypoint likelihoods score poses against images (`sensing`);
//! correspondence-based estimation produces initial poses (`estimation`);
//! a data-driven Metropolis-Hastings chain refines them (`sampler`);
//! `scenegraph` renders the result, and `harness` generates synthetic
//! scenarios and carries the independent inference oracle used in tests.

pub mod error;
pub mod estimation;
pub mod geometry;
pub mod harness;
pub mod knowledge;
pub mod sampler;
pub mod scene;
pub mod scenegraph;
pub mod sensing;

pub use error::{Error, Result};
