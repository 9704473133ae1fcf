use nalgebra::DVector;

use super::report::{NamedValue, PsibarKind, RelationId, RelationReport, SignBranch};
use super::variance::{nh_variance, shifted_adjoint_action, vaidman_decompose};
use crate::error::{Error, Result};
use crate::model::{weak_operator, Observable, PpsEnsemble};
use crate::numeric::{
    orthogonal_component, random_orthogonal_state, ComplexMatrix, Seed, StateVector, C64, I,
};
use crate::tolerance::Tolerances;

/// Choice of the orthogonal state `|psibar>` entering a bound.
#[derive(Debug, Clone, PartialEq)]
pub enum PsibarMode {
    /// The state that saturates the Cauchy-Schwarz step.
    Optimal,
    /// A caller-provided state, which must be orthogonal to the pre-selection.
    Supplied(StateVector),
    /// A seeded random state orthogonal to the pre-selection.
    Random(Seed),
}

impl PsibarMode {
    pub fn kind(&self) -> PsibarKind {
        match self {
            PsibarMode::Optimal => PsibarKind::Optimal,
            PsibarMode::Supplied(_) => PsibarKind::Supplied,
            PsibarMode::Random(_) => PsibarKind::Random,
        }
    }
}

/// Right-hand terms of the first relation for one sign branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ur1Terms {
    pub sign: SignBranch,
    /// `+-(i/k)<phi|[A,B]|phi>`
    pub commutator: f64,
    /// `+-i(<A>_w^* <B>_w - <A>_w <B>_w^*)`
    pub non_hermitian: f64,
    /// `|<psi|(A_w +- i B_w)|psibar>|^2`
    pub overlap: f64,
    pub total: f64,
    /// Largest imaginary part dropped from the first two terms.
    pub imag_residue: f64,
}

/// Ingredients shared by the first relation in its weak (`ur1`) and
/// Hermitian (`mp1`) forms.
struct FirstRelationInputs<'a> {
    psi: &'a StateVector,
    /// sum of the two variances
    lhs: f64,
    /// `(O_a^dagger - <O_a^dagger>)|psi>`
    f: DVector<C64>,
    /// `(O_b^dagger - <O_b^dagger>)|psi>`
    g: DVector<C64>,
    /// operators whose matrix elements form the overlap term
    op_a: ComplexMatrix,
    op_b: ComplexMatrix,
    /// `<phi|[A,B]|phi>/k` (or `<psi|[A,B]|psi>` without post-selection)
    commutator_mean: C64,
    mean_a: C64,
    mean_b: C64,
}

impl FirstRelationInputs<'_> {
    fn terms(
        &self,
        psibar: Option<&StateVector>,
        sign: SignBranch,
        tol: &Tolerances,
    ) -> Result<Ur1Terms> {
        let s = sign.sign();
        let t1 = I * self.commutator_mean * s;
        let t2 = I * (self.mean_a.conj() * self.mean_b - self.mean_a * self.mean_b.conj()) * s;
        for (name, t) in [("commutator", t1), ("non-Hermitian", t2)] {
            if t.im.abs() > tol.reality * t.norm().max(1.0) {
                return Err(Error::ContractViolation(format!(
                    "{name} term is not real (imaginary part {:e})",
                    t.im
                )));
            }
        }
        let overlap = match psibar {
            Some(bar) => {
                let psi = self.psi.as_dvector();
                let ma = psi.dotc(&(self.op_a.as_dmatrix() * bar.as_dvector()));
                let mb = psi.dotc(&(self.op_b.as_dmatrix() * bar.as_dvector()));
                (ma + I * mb * s).norm_sqr()
            }
            None => 0.0,
        };
        Ok(Ur1Terms {
            sign,
            commutator: t1.re,
            non_hermitian: t2.re,
            overlap,
            total: t1.re + t2.re + overlap,
            imag_residue: t1.im.abs().max(t2.im.abs()),
        })
    }

    /// Normalized `(f - s i g)`, the Cauchy-Schwarz partner of branch `s`.
    fn optimal_psibar(&self, sign: SignBranch, tol: &Tolerances) -> Result<Option<StateVector>> {
        let v = &self.f - &self.g * (I * sign.sign());
        optimal_from(self.psi, v, self.lhs, tol)
    }

    fn evaluate(
        &self,
        relation: RelationId,
        mode: &PsibarMode,
        tol: &Tolerances,
    ) -> Result<(RelationReport, Option<StateVector>)> {
        let fixed = fixed_psibar(self.psi, mode, tol)?;
        let mut best: Option<(Ur1Terms, Option<StateVector>)> = None;
        let mut other_total = f64::NAN;
        for sign in [SignBranch::Plus, SignBranch::Minus] {
            let bar = match mode {
                PsibarMode::Optimal => self.optimal_psibar(sign, tol)?,
                _ => fixed.clone(),
            };
            let terms = self.terms(bar.as_ref(), sign, tol)?;
            match &best {
                Some((b, _)) if !prefer(&terms, b, tol) => other_total = terms.total,
                _ => {
                    if let Some((b, _)) = &best {
                        other_total = b.total;
                    }
                    best = Some((terms, bar));
                }
            }
        }
        let (terms, bar) = best.expect("two branches evaluated");
        let mut report = RelationReport::new(
            relation,
            self.lhs,
            vec![
                NamedValue::new("commutator", terms.commutator),
                NamedValue::new("non_hermitian", terms.non_hermitian),
                NamedValue::new("overlap", terms.overlap),
            ],
            tol.relation,
        )
        .diagnostic("other_branch_rhs", other_total);
        report.sign_branch = Some(terms.sign);
        report.psibar_mode = Some(mode.kind());
        report.imag_residue = terms.imag_residue;
        if let Some(b) = &bar {
            report = report.input("psibar", b.fingerprint());
        } else {
            report
                .notes
                .push("optimal psibar degenerate: overlap term set to 0".into());
        }
        Ok((report, bar))
    }
}

/// Whether branch `cand` should replace `current`: the larger bound wins;
/// within the relation tolerance the branch whose first two terms are
/// non-negative wins, and `+` is kept on a full tie.
fn prefer(cand: &Ur1Terms, current: &Ur1Terms, tol: &Tolerances) -> bool {
    let gap = cand.total - current.total;
    if gap.abs() > tol.relation {
        return gap > 0.0;
    }
    let lead = |t: &Ur1Terms| t.commutator + t.non_hermitian;
    lead(cand) > lead(current)
}

fn optimal_from(
    psi: &StateVector,
    v: DVector<C64>,
    lhs: f64,
    tol: &Tolerances,
) -> Result<Option<StateVector>> {
    let (w, n) = orthogonal_component(psi, &crate::numeric::ComplexVector::new(v)?)?;
    if n <= tol.construction * lhs.sqrt().max(1.0) {
        Ok(None)
    } else {
        Ok(Some(w.normalized()?))
    }
}

fn fixed_psibar(
    psi: &StateVector,
    mode: &PsibarMode,
    tol: &Tolerances,
) -> Result<Option<StateVector>> {
    match mode {
        PsibarMode::Optimal => Ok(None),
        PsibarMode::Supplied(bar) => {
            let ov = psi.inner(bar)?.norm();
            if ov > tol.spectral {
                return Err(Error::ContractViolation(format!(
                    "supplied psibar is not orthogonal to the pre-selected state (overlap {ov:e})"
                )));
            }
            Ok(Some(bar.clone()))
        }
        PsibarMode::Random(seed) => Ok(Some(random_orthogonal_state(psi, *seed)?)),
    }
}

struct WeakPair {
    aw: ComplexMatrix,
    bw: ComplexMatrix,
    wa: C64,
    wb: C64,
    f: DVector<C64>,
    g: DVector<C64>,
}

fn weak_pair(ens: &PpsEnsemble, a: &Observable, b: &Observable) -> Result<WeakPair> {
    let aw = weak_operator(ens, a)?;
    let bw = weak_operator(ens, b)?;
    let psi = ens.pre();
    let (ma, f) = shifted_adjoint_action(psi, aw.matrix())?;
    let (mb, g) = shifted_adjoint_action(psi, bw.matrix())?;
    Ok(WeakPair {
        wa: ma.conj(),
        wb: mb.conj(),
        aw: aw.matrix().clone(),
        bw: bw.matrix().clone(),
        f,
        g,
    })
}

fn first_relation_weak<'a>(
    ens: &'a PpsEnsemble,
    a: &Observable,
    b: &Observable,
) -> Result<FirstRelationInputs<'a>> {
    let pair = weak_pair(ens, a, b)?;
    let comm = a.matrix().commutator(b.matrix())?;
    let phi = ens.post();
    let commutator_mean = comm.sandwich(phi, phi)? / ens.overlap_k();
    Ok(FirstRelationInputs {
        psi: ens.pre(),
        lhs: pair.f.norm_squared() + pair.g.norm_squared(),
        f: pair.f,
        g: pair.g,
        op_a: pair.aw,
        op_b: pair.bw,
        commutator_mean,
        mean_a: pair.wa,
        mean_b: pair.wb,
    })
}

/// Terms of one fixed sign branch of the first relation, with that
/// branch's own optimal `psibar` in optimal mode.
pub(crate) fn ur1_branch(
    ens: &PpsEnsemble,
    a: &Observable,
    b: &Observable,
    mode: &PsibarMode,
    sign: SignBranch,
    tol: &Tolerances,
) -> Result<(Ur1Terms, Option<StateVector>)> {
    let inputs = first_relation_weak(ens, a, b)?;
    let bar = match mode {
        PsibarMode::Optimal => inputs.optimal_psibar(sign, tol)?,
        _ => fixed_psibar(ens.pre(), mode, tol)?,
    };
    Ok((inputs.terms(bar.as_ref(), sign, tol)?, bar))
}

/// The three right-hand terms of the first relation for an explicit
/// orthogonal state and sign branch.
///
/// The overlap term pairs with the Cauchy-Schwarz partner
/// `|<psi|(C + s i D)|psibar>|^2 <= ||(C^dagger - s i D^dagger)|psi>||^2`.
pub fn ur1_terms(
    ens: &PpsEnsemble,
    a: &Observable,
    b: &Observable,
    psibar: &StateVector,
    sign: SignBranch,
    tol: &Tolerances,
) -> Result<Ur1Terms> {
    fixed_psibar(ens.pre(), &PsibarMode::Supplied(psibar.clone()), tol)?;
    first_relation_weak(ens, a, b)?.terms(Some(psibar), sign, tol)
}

/// `dA_w^2 + dB_w^2 >= +-(i/k)<phi|[A,B]|phi> +- i(<A>_w^*<B>_w - <A>_w<B>_w^*) + |<psi|(A_w +- i B_w)|psibar>|^2`,
/// reporting the larger of the two
/// coherent sign branches.
pub fn ur1_check(
    ens: &PpsEnsemble,
    a: &Observable,
    b: &Observable,
    mode: &PsibarMode,
    tol: &Tolerances,
) -> Result<RelationReport> {
    let inputs = first_relation_weak(ens, a, b)?;
    let (report, _) = inputs.evaluate(RelationId::Ur1, mode, tol)?;
    Ok(report
        .input("ensemble", ens.fingerprint())
        .input("a", a.fingerprint())
        .input("b", b.fingerprint()))
}

/// Stronger sum-of-variances relation for Hermitian `A`, `B` in `|psi>`
/// (the first relation without post-selection).
pub fn mp1_check(
    state: &StateVector,
    a: &Observable,
    b: &Observable,
    mode: &PsibarMode,
    tol: &Tolerances,
) -> Result<RelationReport> {
    let (ma, f) = shifted_adjoint_action(state, a.matrix())?;
    let (mb, g) = shifted_adjoint_action(state, b.matrix())?;
    let comm = a.matrix().commutator(b.matrix())?;
    let inputs = FirstRelationInputs {
        psi: state,
        lhs: f.norm_squared() + g.norm_squared(),
        f,
        g,
        op_a: a.matrix().clone(),
        op_b: b.matrix().clone(),
        commutator_mean: comm.sandwich(state, state)?,
        // Hermitian means are real; dropping the roundoff keeps term two at 0
        mean_a: C64::new(ma.re, 0.0),
        mean_b: C64::new(mb.re, 0.0),
    };
    let (report, _) = inputs.evaluate(RelationId::Mp1, mode, tol)?;
    Ok(report
        .input("state", state.fingerprint())
        .input("a", a.fingerprint())
        .input("b", b.fingerprint()))
}

fn second_relation(
    relation: RelationId,
    psi: &StateVector,
    lhs: f64,
    sum: &ComplexMatrix,
    mode: &PsibarMode,
    tol: &Tolerances,
) -> Result<RelationReport> {
    let bar = match mode {
        PsibarMode::Optimal => vaidman_decompose(psi, sum)?.orthogonal_state,
        _ => fixed_psibar(psi, mode, tol)?,
    };
    let overlap = match &bar {
        Some(b) => {
            0.5 * psi
                .as_dvector()
                .dotc(&(sum.as_dmatrix() * b.as_dvector()))
                .norm_sqr()
        }
        None => 0.0,
    };
    let half_var = 0.5 * nh_variance(psi, sum)?.value;
    let mut report = RelationReport::new(
        relation,
        lhs,
        vec![NamedValue::new("half_overlap", overlap)],
        tol.relation,
    )
    .diagnostic("half_sum_variance", half_var);
    report.psibar_mode = Some(mode.kind());
    match &bar {
        Some(b) => report = report.input("psibar", b.fingerprint()),
        None => report
            .notes
            .push("optimal psibar degenerate: overlap term set to 0".into()),
    }
    Ok(report)
}

/// `dA_w^2 + dB_w^2 >= |<psi|(A_w + B_w)|psibar>|^2 / 2`.
///
/// In optimal mode `psibar` is the Vaidman orthogonal state of `A_w + B_w`
/// and the right side equals `d^2(A_w + B_w)/2`. The slack is then
/// `d^2(A_w - B_w)/2`, which is not zero in general.
pub fn ur2_check(
    ens: &PpsEnsemble,
    a: &Observable,
    b: &Observable,
    mode: &PsibarMode,
    tol: &Tolerances,
) -> Result<RelationReport> {
    let pair = weak_pair(ens, a, b)?;
    let lhs = pair.f.norm_squared() + pair.g.norm_squared();
    let sum = pair.aw.add(&pair.bw)?;
    Ok(
        second_relation(RelationId::Ur2, ens.pre(), lhs, &sum, mode, tol)?
            .input("ensemble", ens.fingerprint())
            .input("a", a.fingerprint())
            .input("b", b.fingerprint()),
    )
}

/// `dA^2 + dB^2 >= |<psi|(A + B)|psibar>|^2 / 2` for Hermitian `A`, `B`.
pub fn mp2_check(
    state: &StateVector,
    a: &Observable,
    b: &Observable,
    mode: &PsibarMode,
    tol: &Tolerances,
) -> Result<RelationReport> {
    let lhs = nh_variance(state, a.matrix())?.value + nh_variance(state, b.matrix())?.value;
    let sum = a.matrix().add(b.matrix())?;
    Ok(
        second_relation(RelationId::Mp2, state, lhs, &sum, mode, tol)?
            .input("state", state.fingerprint())
            .input("a", a.fingerprint())
            .input("b", b.fingerprint()),
    )
}

/// Largest residual of
/// `2dA_w^2 + 2dB_w^2 = ||(C^dagger + alpha D^dagger)psi||^2 + ||(C^dagger - alpha D^dagger)psi||^2`
/// over `alpha` in `{1, i}`.
pub fn parallelogram_identity_check(
    ens: &PpsEnsemble,
    a: &Observable,
    b: &Observable,
) -> Result<f64> {
    let pair = weak_pair(ens, a, b)?;
    let psi = ens.pre();
    let var_a = nh_variance(psi, &pair.aw)?.value;
    let var_b = nh_variance(psi, &pair.bw)?.value;
    let lhs = 2.0 * var_a + 2.0 * var_b;
    Ok([C64::new(1.0, 0.0), I]
        .into_iter()
        .map(|alpha| {
            let plus = (&pair.f + &pair.g * alpha).norm_squared();
            let minus = (&pair.f - &pair.g * alpha).norm_squared();
            (lhs - plus - minus).abs()
        })
        .fold(0.0, f64::max))
}

/// Robertson baseline `dA dB >= |<psi|[A,B]|psi>| / 2`.
pub fn robertson_check(
    state: &StateVector,
    a: &Observable,
    b: &Observable,
    tol: &Tolerances,
) -> Result<RelationReport> {
    let var_a = nh_variance(state, a.matrix())?.value;
    let var_b = nh_variance(state, b.matrix())?.value;
    let comm = a.matrix().commutator(b.matrix())?.sandwich(state, state)?;
    let report = RelationReport::new(
        RelationId::Robertson,
        (var_a * var_b).sqrt(),
        vec![NamedValue::new("half_commutator", 0.5 * comm.norm())],
        tol.relation,
    );
    Ok(report
        .input("state", state.fingerprint())
        .input("a", a.fingerprint())
        .input("b", b.fingerprint()))
}
