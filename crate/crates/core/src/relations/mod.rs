//! Non-Hermitian variances and the uncertainty relations built on them.
//!
//! Every check returns a [`RelationReport`] carrying the two sides of the
//! inequality, the named right-hand terms, the slack and the fingerprints
//! of its inputs.

mod fock;
mod report;
mod sum_relations;
mod variance;

pub use fock::{conjugate_pair_check, TruncatedFockPair};
pub use report::{NamedValue, PsibarKind, RelationId, RelationReport, SignBranch};
pub use sum_relations::{
    mp1_check, mp2_check, parallelogram_identity_check, robertson_check, ur1_check, ur1_terms,
    ur2_check, PsibarMode, Ur1Terms,
};
pub use variance::{nh_variance, vaidman_decompose, NHVariance, VaidmanParts};
