//! The lower-bound pipeline run on a concrete embedding: log-distortion
//! colouring, monochromatic extraction, path lemma, umbel or diamond
//! witness, and the inequality's tip-gap bound, with a replayable trail.

mod config;
mod pipeline;
mod trail;

use serde::{Deserialize, Serialize};

pub use config::{CertifierConfig, Mode};
pub use pipeline::{certify_diamond, certify_tree};
pub use trail::{EvalContext, Quantity, Relation, TrailEntry, TRAIL_TOLERANCE};

use crate::lemmas::{PathWitness, Rejection, WitnessRecord};
use crate::metric::EmbeddingTable;
use crate::ramsey::ExtractionFailure;
use crate::{Error, Result};

pub const CERTIFICATE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    BoundAsserted,
    WitnessContradiction,
    ScaleTooSmall,
    ExtractionFailed,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::BoundAsserted => "BOUND_ASSERTED",
            Verdict::WitnessContradiction => "WITNESS_CONTRADICTION",
            Verdict::ScaleTooSmall => "SCALE_TOO_SMALL",
            Verdict::ExtractionFailed => "EXTRACTION_FAILED",
        }
    }
}

/// What a contradiction shows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContradictionKind {
    /// The tip gap exceeds the lemma bound and the configuration violates the
    /// inequality with the given constant.
    InequalityViolated,
    /// A step that holds at large enough scale failed here.
    FiniteScale,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub gamma: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub theta: Option<f64>,
    pub delta_or_epsilon: Option<f64>,
    #[serde(rename = "K")]
    pub k: f64,
    pub p: f64,
    #[serde(rename = "C_U_or_C_D")]
    pub c_space: f64,
    /// Smallest `d_X / d_G`; all trail distances are divided by it.
    pub lambda: f64,
}

/// Sizes needed before the pipeline is guaranteed to run, as base-2
/// logarithms since they are usually astronomical.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RequiredSizes {
    /// Height (tree) or level count (diamond) of the input.
    pub size: usize,
    pub branching: u32,
    /// Smallest size for which the path lemma can run at all.
    pub structural_minimum: usize,
    /// `log2` of the required root-leaf or st-path length.
    pub path_length_log2: f64,
    /// `log2` of the pigeonhole branching threshold for 2 branches.
    pub branching_log2: f64,
    pub colors: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub configuration: Option<WitnessRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub anchor_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tip_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejection: Option<Rejection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: String,
    pub mode: Mode,
    pub verdict: Verdict,
    /// The trivial-branch threshold on the distortion.
    pub bound: f64,
    pub constants: Constants,
    pub required: RequiredSizes,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contradiction: Option<ContradictionKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extraction: Option<ExtractionFailure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gates_bypassed: Vec<String>,
    pub witnesses: Witnesses,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub trail: Vec<TrailEntry>,
}

impl Certificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// The certificate for the table with every distance multiplied by
    /// `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::param("scale factor must be positive"));
        }
        let mut out = self.clone();
        out.constants.lambda *= factor;
        out.trail = self.trail.iter().map(|e| e.rescaled(factor)).collect();
        Ok(out)
    }

    /// Trail entries whose relation fails.
    pub fn broken(&self) -> impl Iterator<Item = &TrailEntry> {
        self.trail.iter().filter(|e| !e.holds)
    }
}

/// Re-evaluates every trail entry from the table's raw distances. True iff
/// all values agree within [`TRAIL_TOLERANCE`] and every relation has its
/// recorded outcome.
pub fn replay_certificate(cert: &Certificate, table: &EmbeddingTable) -> Result<bool> {
    if cert.version != CERTIFICATE_VERSION {
        return Err(Error::VersionMismatch {
            found: cert.version.clone(),
            expected: CERTIFICATE_VERSION.to_string(),
        });
    }
    let ctx = EvalContext::new(table, cert.constants.lambda);
    for entry in &cert.trail {
        match entry.replays(&ctx) {
            Ok(true) => {}
            Ok(false) | Err(Error::Mismatch(_)) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}
