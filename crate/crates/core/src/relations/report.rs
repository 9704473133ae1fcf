use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::fingerprint::Fingerprint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationId {
    /// First weak-operator relation (commutator, non-Hermitian and overlap terms).
    Ur1,
    /// Second weak-operator relation, half the overlap of the summed operator.
    Ur2,
    /// First relation for Hermitian pairs, no post-selection.
    Mp1,
    /// Second relation for Hermitian pairs, no post-selection.
    Mp2,
    /// `dA dB >= |<[A,B]>|/2`, the triviality baseline.
    Robertson,
    /// First relation instantiated for truncated position and momentum.
    ConjugatePair,
    /// Product of reverse-order projector weak values.
    Complementarity,
}

impl RelationId {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationId::Ur1 => "ur1",
            RelationId::Ur2 => "ur2",
            RelationId::Mp1 => "mp1",
            RelationId::Mp2 => "mp2",
            RelationId::Robertson => "robertson",
            RelationId::ConjugatePair => "conjugate_pair",
            RelationId::Complementarity => "complementarity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignBranch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl SignBranch {
    pub fn sign(self) -> f64 {
        match self {
            SignBranch::Plus => 1.0,
            SignBranch::Minus => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SignBranch::Plus => "+",
            SignBranch::Minus => "-",
        }
    }
}

/// How the orthogonal state entering a bound was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsibarKind {
    Optimal,
    Supplied,
    Random,
}

impl PsibarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PsibarKind::Optimal => "optimal",
            PsibarKind::Supplied => "supplied",
            PsibarKind::Random => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

impl NamedValue {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }
}

/// One evaluated relation instance.
///
/// `rhs_terms` always sum to `rhs_total`; `diagnostics` carries auxiliary
/// numbers (ideal closed forms, discrepancies, imaginary residues) that are
/// not part of the bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub relation: RelationId,
    pub lhs: f64,
    pub rhs_terms: Vec<NamedValue>,
    pub rhs_total: f64,
    /// `lhs - rhs_total`
    pub slack: f64,
    pub sign_branch: Option<SignBranch>,
    pub psibar_mode: Option<PsibarKind>,
    pub tight: bool,
    /// Largest imaginary part discarded from a quantity that must be real.
    pub imag_residue: f64,
    pub diagnostics: Vec<NamedValue>,
    pub notes: Vec<String>,
    pub inputs: BTreeMap<String, Fingerprint>,
}

impl RelationReport {
    pub(crate) fn new(
        relation: RelationId,
        lhs: f64,
        rhs_terms: Vec<NamedValue>,
        tightness: f64,
    ) -> Self {
        let rhs_total = rhs_terms.iter().map(|t| t.value).sum::<f64>();
        let slack = lhs - rhs_total;
        Self {
            relation,
            lhs,
            rhs_terms,
            rhs_total,
            slack,
            sign_branch: None,
            psibar_mode: None,
            tight: slack.abs() <= tightness,
            imag_residue: 0.0,
            diagnostics: Vec::new(),
            notes: Vec::new(),
            inputs: BTreeMap::new(),
        }
    }

    pub(crate) fn input(mut self, name: &str, fp: Fingerprint) -> Self {
        self.inputs.insert(name.to_owned(), fp);
        self
    }

    pub(crate) fn diagnostic(mut self, name: &str, value: f64) -> Self {
        self.diagnostics.push(NamedValue::new(name, value));
        self
    }

    /// Value of a named right-hand term.
    pub fn term(&self, name: &str) -> Option<f64> {
        self.rhs_terms
            .iter()
            .find(|t| t.name == name)
            .map(|t| t.value)
    }

    pub fn diagnostic_value(&self, name: &str) -> Option<f64> {
        self.diagnostics
            .iter()
            .find(|t| t.name == name)
            .map(|t| t.value)
    }

    /// `slack >= -tolerance`.
    pub fn holds(&self, tolerance: f64) -> bool {
        self.slack >= -tolerance
    }
}
