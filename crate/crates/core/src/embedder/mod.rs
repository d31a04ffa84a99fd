//! An explicit map of `T_h^b` into `l_p` whose Lipschitz constant stays
//! bounded in `h` and whose compression dominates `f(t/8)`.

mod construct;
mod profile;
mod report;

pub use construct::{phi_build, IndexMap, TreeEmbedding};
pub use profile::{
    xi_build, CompressionProfile, IntegralDiagnostic, ProfileFn, XiSequence, DIAGNOSTIC_TERMS,
    PLATEAU_TOLERANCE,
};
pub use report::{
    chain_check, compression_bound, compression_report, lipschitz_report, ChainReport,
    CompressionReport, LipschitzReport, PairViolation,
};
