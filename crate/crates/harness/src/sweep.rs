//! Seeded randomized sweeps.
//!
//! Every trial draws its inputs from a ChaCha8 stream seeded by
//! [`sub_seed`], so a trial is reproducible from `(seed, relation, dim,
//! trial)` alone and independent of scheduling.

use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use weakrel::complementarity::{anomalous_decomposition, complementarity_check};
use weakrel::model::{Observable, PpsEnsemble};
use weakrel::numeric::{sample_haar_state, sample_hermitian, Seed, StateVector, C64};
use weakrel::relations::{
    conjugate_pair_check, parallelogram_identity_check, ur1_check, ur2_check, NamedValue,
    PsibarMode, RelationReport, TruncatedFockPair,
};
use weakrel::{Error, Tolerances};

use crate::config::{ConfigError, PsibarChoice, SweepConfig, SweepRelation};
use crate::report::{ReportSet, SubSeed, TrialRow};

/// Redraws allowed per trial before the sweep gives up.
pub const MAX_REJECTIONS: u32 = 10_000;

/// First 8 bytes (little endian) of
/// `SHA-256("weakrel-trial" | seed | relation | dim | trial)`, integers as u64 LE.
pub fn sub_seed(seed: u64, relation: SweepRelation, dim: usize, trial: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(b"weakrel-trial");
    h.update(seed.to_le_bytes());
    h.update(relation.as_str().as_bytes());
    h.update((dim as u64).to_le_bytes());
    h.update((trial as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{relation} dim {dim} trial {trial}: {source}")]
    Trial {
        relation: &'static str,
        dim: usize,
        trial: usize,
        #[source]
        source: Error,
    },
}

fn push_diag(report: &mut RelationReport, name: &str, value: f64) {
    report.diagnostics.push(NamedValue::new(name, value));
}

struct TrialInputs<'a> {
    config: &'a SweepConfig,
    tol: &'a Tolerances,
    dim: usize,
}

impl TrialInputs<'_> {
    fn mode(&self, rng: &mut impl RngCore) -> PsibarMode {
        match self.config.psibar {
            PsibarChoice::Random => PsibarMode::Random(Seed(rng.next_u64())),
            PsibarChoice::Optimal => PsibarMode::Optimal,
        }
    }

    fn two_observables(&self, rng: &mut impl RngCore) -> Result<(Observable, Observable), Error> {
        let a = Observable::with_tolerances(sample_hermitian(rng, self.dim, 1.0)?, self.tol)?;
        let b = Observable::with_tolerances(sample_hermitian(rng, self.dim, 1.0)?, self.tol)?;
        Ok((a, b))
    }

    /// Haar pre/post pair, redrawn while `k` is at or below the overlap tolerance.
    fn ensemble(&self, rng: &mut impl RngCore, rejections: &mut u32) -> Result<PpsEnsemble, Error> {
        loop {
            let pre = sample_haar_state(rng, self.dim)?;
            let post = sample_haar_state(rng, self.dim)?;
            match PpsEnsemble::with_threshold(pre, post, self.tol.overlap) {
                Err(Error::OrthogonalPostselection(_)) if *rejections < MAX_REJECTIONS => {
                    *rejections += 1
                }
                other => return other,
            }
        }
    }
}

fn run_trial(
    config: &SweepConfig,
    relation: SweepRelation,
    dim: usize,
    trial: usize,
) -> Result<TrialRow, Error> {
    let seed = sub_seed(config.seed, relation, dim, trial);
    let mut rng = Seed(seed).rng();
    let tol = &config.tolerances;
    let inputs = TrialInputs { config, tol, dim };
    let mut rejections = 0u32;
    let report = match relation {
        SweepRelation::Ur1 => {
            let ens = inputs.ensemble(&mut rng, &mut rejections)?;
            let (a, b) = inputs.two_observables(&mut rng)?;
            let mut r = ur1_check(&ens, &a, &b, &inputs.mode(&mut rng), tol)?;
            push_diag(
                &mut r,
                "parallelogram_residual",
                parallelogram_identity_check(&ens, &a, &b)?,
            );
            r
        }
        SweepRelation::Ur2 => {
            let ens = inputs.ensemble(&mut rng, &mut rejections)?;
            let (a, b) = inputs.two_observables(&mut rng)?;
            ur2_check(&ens, &a, &b, &inputs.mode(&mut rng), tol)?
        }
        SweepRelation::Complementarity => loop {
            let psi = sample_haar_state(&mut rng, dim)?;
            let a = sample_haar_state(&mut rng, dim)?;
            let b = sample_haar_state(&mut rng, dim)?;
            match complementarity_check(&psi, &a, &b, tol) {
                Err(Error::OrthogonalPostselection(_)) if rejections < MAX_REJECTIONS => {
                    rejections += 1
                }
                Err(e) => return Err(e),
                Ok(mut r) => {
                    let parts = anomalous_decomposition(&psi, &a, &b)?;
                    let pa = a.inner(&psi)?.norm_sqr();
                    push_diag(
                        &mut r,
                        "anomalous_residual",
                        parts.reconstruction_residual(),
                    );
                    push_diag(
                        &mut r,
                        "spread_residual",
                        (parts.spread.powi(2) - pa * (1.0 - pa)).abs(),
                    );
                    break r;
                }
            }
        },
        SweepRelation::ConjugatePair => {
            let fock = TruncatedFockPair::new(dim, config.hbar)?;
            let support = dim / 2;
            let lift = |s: StateVector| {
                let mut amps = vec![C64::new(0.0, 0.0); dim];
                amps[..support].copy_from_slice(s.as_slice());
                StateVector::from_amplitudes(&amps)
            };
            let ens = loop {
                let pre = lift(sample_haar_state(&mut rng, support)?)?;
                let post = lift(sample_haar_state(&mut rng, support)?)?;
                match PpsEnsemble::with_threshold(pre, post, tol.overlap) {
                    Err(Error::OrthogonalPostselection(_)) if rejections < MAX_REJECTIONS => {
                        rejections += 1
                    }
                    other => break other?,
                }
            };
            conjugate_pair_check(&fock, &ens, &inputs.mode(&mut rng), tol)?
        }
    };
    Ok(TrialRow {
        relation: report.relation,
        dim,
        trial,
        sub_seed: SubSeed(seed),
        rejections,
        report,
    })
}

/// Runs every `(relation, dim, trial)` of `config` in parallel and gathers
/// the rows in that nesting order.
pub fn run_sweep(config: &SweepConfig) -> Result<ReportSet, SweepError> {
    config.validate()?;
    let start = Instant::now();
    let jobs: Vec<(SweepRelation, usize, usize)> = config
        .relations
        .iter()
        .flat_map(|&r| {
            config
                .dims
                .iter()
                .flat_map(move |&d| (0..config.trials).map(move |t| (r, d, t)))
        })
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(relation, dim, trial)| {
            run_trial(config, relation, dim, trial).map_err(|source| SweepError::Trial {
                relation: relation.as_str(),
                dim,
                trial,
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut set = ReportSet::new(
        Some(config.clone()),
        config.tolerances.relation,
        rows,
        Vec::new(),
    );
    set.wall_clock_ms = start.elapsed().as_millis() as u64;
    Ok(set)
}
