use nalgebra::DMatrix;

use super::report::{RelationId, RelationReport, SignBranch};
use super::sum_relations::{ur1_branch, ur1_check, PsibarMode};
use crate::error::{Error, Result};
use crate::model::{weak_value, Observable, PpsEnsemble};
use crate::numeric::{ComplexMatrix, StateVector, C64, I};
use crate::tolerance::Tolerances;

/// Population threshold on the two highest Fock levels.
pub const TRUNCATION_GUARD: f64 = 1e-8;

/// Position and momentum built from a ladder operator truncated to `dim` levels.
///
/// `[X, P] = i hbar` holds on every level but the top one, where the
/// truncated commutator `[a, a^dagger]` equals `-(dim - 1)`.
#[derive(Debug, Clone)]
pub struct TruncatedFockPair {
    dim: usize,
    hbar: f64,
    x: Observable,
    p: Observable,
    a_dagger: ComplexMatrix,
}

impl TruncatedFockPair {
    pub fn new(dim: usize, hbar: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: format!("truncation needs at least two levels, got {dim}"),
            });
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "hbar",
                reason: format!("must be positive, got {hbar}"),
            });
        }
        // a|n> = sqrt(n)|n-1>
        let a = DMatrix::from_fn(dim, dim, |r, c| {
            if c == r + 1 {
                C64::new((c as f64).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let ad = a.adjoint();
        let s = (hbar / 2.0).sqrt();
        let x = (&a + &ad) * C64::new(s, 0.0);
        let p = (&ad - &a) * (I * s);
        Ok(Self {
            dim,
            hbar,
            x: Observable::new(ComplexMatrix::new(x)?)?,
            p: Observable::new(ComplexMatrix::new(p)?)?,
            a_dagger: ComplexMatrix::new(ad)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn x(&self) -> &Observable {
        &self.x
    }

    pub fn p(&self) -> &Observable {
        &self.p
    }

    pub fn a_dagger(&self) -> &ComplexMatrix {
        &self.a_dagger
    }

    pub fn fock_state(&self, n: usize) -> Result<StateVector> {
        StateVector::basis(self.dim, n)
    }

    /// Coherent state `|alpha>` truncated and renormalized.
    pub fn coherent_state(&self, alpha: C64) -> Result<StateVector> {
        let mut amps = Vec::with_capacity(self.dim);
        let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        for n in 0..self.dim {
            if n > 0 {
                c *= alpha / (n as f64).sqrt();
            }
            amps.push(c);
        }
        StateVector::from_amplitudes(&amps)
    }

    /// Population on the two highest levels.
    pub fn top_population(&self, state: &StateVector) -> f64 {
        state.iter().rev().take(2).map(|z| z.norm_sqr()).sum()
    }

    /// `(max deviation of [X,P] from i hbar off the top level, deviation at the top level)`.
    pub fn commutator_defect(&self) -> (f64, f64) {
        let comm = self
            .x
            .matrix()
            .commutator(self.p.matrix())
            .expect("same dim")
            .into_dmatrix();
        let ideal = DMatrix::<C64>::identity(self.dim, self.dim) * (I * self.hbar);
        let diff = comm - ideal;
        let top = self.dim - 1;
        let mut bulk = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                if r != top && c != top {
                    bulk = bulk.max(diff[(r, c)].norm());
                }
            }
        }
        (bulk, diff[(top, top)].norm())
    }
}

/// First relation with `A = X`, `B = P`, using the matrix commutator, plus
/// the closed form with the ideal commutator `i hbar`.
///
/// For the branch whose commutator term is `+hbar/k`, the closed form reads
/// `hbar/k - 2 Im(<X>_w <P>_w^*) + (2 hbar/k)|<phi|a^dagger|psibar>|^2`; it is
/// evaluated against the generic terms and the gap is recorded in the
/// `closed_form_discrepancy` diagnostic.
pub fn conjugate_pair_check(
    fock: &TruncatedFockPair,
    ens: &PpsEnsemble,
    mode: &PsibarMode,
    tol: &Tolerances,
) -> Result<RelationReport> {
    if ens.dim() != fock.dim() {
        return Err(Error::ShapeMismatch {
            expected: fock.dim(),
            found: ens.dim(),
        });
    }
    let pop = fock
        .top_population(ens.pre())
        .max(fock.top_population(ens.post()));
    if pop > TRUNCATION_GUARD {
        return Err(Error::Truncation(pop));
    }
    let (x, p) = (fock.x(), fock.p());
    let mut report = ur1_check(ens, x, p, mode, tol)?;
    report.relation = RelationId::ConjugatePair;

    let k = ens.overlap_k();
    let hbar = fock.hbar();
    let sign = report.sign_branch.unwrap_or(SignBranch::Plus);
    // s(i/k)<phi| i hbar |phi> = -s hbar/k
    let ideal_commutator = -sign.sign() * hbar / k;
    let matrix_commutator = report.term("commutator").unwrap_or(0.0);

    // closed form on the +hbar/k branch, with that branch's psibar
    let (generic, bar) = ur1_branch(ens, x, p, mode, SignBranch::Minus, tol)?;
    let wx = weak_value(ens, x)?.value;
    let wp = weak_value(ens, p)?.value;
    let a_dag_term = match &bar {
        Some(b) => fock.a_dagger().sandwich(ens.post(), b)?.norm_sqr(),
        None => 0.0,
    };
    let closed = hbar / k - 2.0 * (wx * wp.conj()).im + 2.0 * hbar / k * a_dag_term;

    report = report
        .diagnostic("ideal_commutator_term", ideal_commutator)
        .diagnostic(
            "commutator_discrepancy",
            (matrix_commutator - ideal_commutator).abs(),
        )
        .diagnostic("closed_form_rhs", closed)
        .diagnostic("closed_form_discrepancy", (closed - generic.total).abs())
        .diagnostic("top_level_population", pop);
    if (ens.post().as_dvector() - ens.pre().as_dvector()).norm() <= tol.construction {
        report.notes.push(
            "post-selection equals pre-selection: closed form bra <phi| read as <psi|".into(),
        );
    }
    Ok(report)
}
