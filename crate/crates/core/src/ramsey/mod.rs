//! Finite pigeonhole extraction of horizontally monochromatic subtrees and
//! sub-diamonds.

mod coloring;
mod subdiamond;
mod subtree;

use serde::{Deserialize, Serialize};

pub use coloring::{log_color, log_distortion_coloring, max_color, Color, Coloring, FnColoring, PairColoring};
pub use subdiamond::{
    extract_monochromatic_subdiamond, subdiamond_threshold, verify_subdiamond, CopyChoice,
    SubdiamondSelection,
};
pub(crate) use subdiamond::path_key;
pub use subtree::{extract_monochromatic_subtree, subtree_threshold, verify_subtree, SubtreeSelection};

/// Colour shared by all vertical pairs whose endpoints sit at levels
/// `upper < lower`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelColor {
    pub upper: usize,
    pub lower: usize,
    pub color: Color,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionFailure {
    pub target: u32,
    /// Largest branching the extractor could realise, 0 if none.
    pub achieved: u32,
    /// Vertex id or edge path where the target could not be met.
    pub blocking: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Extraction<S> {
    Found(S),
    Failed(ExtractionFailure),
}

impl<S> Extraction<S> {
    pub fn found(self) -> Option<S> {
        match self {
            Extraction::Found(s) => Some(s),
            Extraction::Failed(_) => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Extraction::Found(_))
    }
}
