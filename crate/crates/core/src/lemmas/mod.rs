//! The sequence and path extraction lemmas and the umbel / diamond witness
//! checks with their quantitative bounds.

mod path;
mod sequence;
mod witness;

pub use path::{
    path_lemma_extract, refined_regime, scale_profile, PathMode, PathWitness, RefinedBound,
    ScaleProfile,
};
pub use sequence::{ratio_bound, refined_ratio_bound, sequence_stable_index};
pub use witness::{
    check_diamond, check_umbel, diamond_lemma_bound, minimal_diamond_epsilon, minimal_umbel_delta,
    taylor_step, umbel_lemma_bound, DiamondWitness, LemmaBound, Rejection, UmbelWitness,
    WitnessRecord,
};
