//! Metric tools for countably branching trees and slash-power diamond graphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: trees, st-graphs, slash products, diamonds and their exact
//!   shortest-path metrics.
//! - [`metric`]: sparse `l_p` points, embedding tables, distortion and
//!   compression analyzers, and residual checkers for the umbel and diamond
//!   inequalities.
//! - [`lemmas`]: the sequence and path extraction lemmas and the umbel /
//!   diamond witness checks with their quantitative bounds.
//! - [`ramsey`]: finite pigeonhole extraction of horizontally monochromatic
//!   subtrees and sub-diamonds.
//! - [`certifier`]: the lower-bound pipeline producing replayable certificates.
//! - [`embedder`]: the explicit coarse embedding of trees into `l_p` with
//!   verified Lipschitz and compression bounds.

pub mod certifier;
pub mod embedder;
pub mod error;
pub mod graph;
pub mod lemmas;
pub mod limits;
pub mod metric;
pub mod ramsey;

pub use error::{Error, Result};
pub use limits::Limits;

/// Absolute tolerance used by every floating point inequality check.
pub const TOLERANCE: f64 = 1e-9;
