//! Widget matching across GUI versions.
//!
//! This crate takes two versions of an application's GUI model (a forest of
//! windows, each a tree of property-mapped widgets) and partitions their
//! widgets into *maintained* pairs, *deleted* widgets (old version only) and
//! *created* widgets (new version only). Matching is driven by a prioritized,
//! configurable pipeline of heuristics executed under a cyclic or priority
//! strategy.
//!
//! The crate also ships the surrounding infrastructure: the canonical model
//! file formats, a combinatorial heuristic-set generator driven by a property
//! priority table, an oracle-based metric suite (decision/match/dissimilar
//! rates), and a synthetic mutation generator that produces version pairs
//! with exact ground truth.
//!
//! Candidate scoring inside the heuristics is data parallel; the `parallel`
//! feature (default) uses rayon for large windows and falls back to the
//! sequential path otherwise.

pub mod engine;
pub mod error;
pub mod evaluation;
pub mod evogen;
pub mod heuristics;
pub mod index;
pub mod model;
pub mod textdiff;

pub use error::{Error, Result};
