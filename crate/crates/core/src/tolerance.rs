use serde::{Deserialize, Serialize};

/// Numerical tolerances used throughout the crate.
///
/// Every check in the library reads its thresholds from one of these
/// fields, so a harness can loosen or tighten them in one place (CV grids,
/// for instance, are dominated by discretization rather than roundoff).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Finite-entry, normalization, hermiticity and orthogonality checks.
    pub construction: f64,
    /// Eigen-residuals, projector laws, operator identities.
    pub spectral: f64,
    /// Slack allowed on inequality reports before they count as failures.
    pub relation: f64,
    /// Minimum post-selection overlap `k = |<phi|psi>|^2` (and minimum
    /// amplitude modulus for projector weak values).
    pub overlap: f64,
    /// Relative gap under which two eigenvalues share a spectral projector.
    pub degeneracy: f64,
    /// Largest imaginary residue tolerated on quantities that must be real.
    pub reality: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        construction: 1e-12,
        spectral: 1e-10,
        relation: 1e-9,
        overlap: 1e-10,
        degeneracy: 1e-9,
        reality: 1e-10,
    };

    /// Returns the first field that is out of range, if any.
    ///
    /// `relation` may be zero (roundoff studies run with no slack at all);
    /// every other field must be strictly positive.
    pub fn first_invalid(&self) -> Option<(&'static str, f64)> {
        if !(self.relation >= 0.0 && self.relation.is_finite()) {
            return Some(("relation", self.relation));
        }
        [
            ("construction", self.construction),
            ("spectral", self.spectral),
            ("overlap", self.overlap),
            ("degeneracy", self.degeneracy),
            ("reality", self.reality),
        ]
        .into_iter()
        .find(|(_, v)| !(*v > 0.0 && v.is_finite()))
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
