//! Multi-run ensembles: generate, compute one hardening curve per user and
//! run, then average the dB curves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gscm::{gen_gscm, GscmConfig};
use super::iid::{gen_iid_gaussian, gen_keyhole};
use super::scatterer::gen_finite_scatterer;
use super::seed::{SeedPath, STREAM_RUN, STREAM_USER};
use crate::analysis::{average_curves, hardening_curve};
use crate::arrays::{ArrayGeometry, UserPattern};
use crate::error::{Error, Result};
use crate::gain::HardeningCurve;
use crate::tensor::{ChannelTensor, OrderLabel};

/// Which generator an ensemble draws from.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Gaussian {
        snapshots: usize,
        freqs: usize,
        antennas: usize,
    },
    Keyhole {
        snapshots: usize,
        freqs: usize,
        antennas: usize,
    },
    Scatterer {
        paths: usize,
        geometry: ArrayGeometry,
        snapshots: usize,
        freqs: usize,
    },
    Gscm {
        config: GscmConfig,
        geometry: ArrayGeometry,
        pattern: UserPattern,
    },
}

impl GeneratorSpec {
    pub fn geometry(&self) -> Option<&ArrayGeometry> {
        match self {
            GeneratorSpec::Scatterer { geometry, .. } | GeneratorSpec::Gscm { geometry, .. } => {
                Some(geometry)
            }
            _ => None,
        }
    }

    /// One tensor with `users` users for the given run seed.
    pub fn generate(&self, seed: u64, users: usize) -> Result<ChannelTensor> {
        let per_user = |f: &dyn Fn(u64) -> Result<ChannelTensor>| {
            let parts = (0..users as u64)
                .map(|k| f(SeedPath::root(seed).child(STREAM_USER).child(k).value()))
                .collect::<Result<Vec<_>>>()?;
            ChannelTensor::concat_users(parts)
        };
        match self {
            GeneratorSpec::Gaussian {
                snapshots,
                freqs,
                antennas,
            } => gen_iid_gaussian(users, *snapshots, *freqs, *antennas, seed),
            GeneratorSpec::Keyhole {
                snapshots,
                freqs,
                antennas,
            } => per_user(&|s| gen_keyhole(*snapshots, *freqs, *antennas, s)),
            GeneratorSpec::Scatterer {
                paths,
                geometry,
                snapshots,
                freqs,
            } => per_user(&|s| gen_finite_scatterer(*paths, geometry, *snapshots, *freqs, s)),
            GeneratorSpec::Gscm {
                config,
                geometry,
                pattern,
            } => {
                let mut config = config.clone().with_seed(seed);
                config.users = users;
                gen_gscm(&config, geometry, pattern)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunPlan {
    pub runs: usize,
    pub users_per_run: usize,
    pub seed: u64,
    /// Reuse `seed` for every run instead of deriving one per run.
    pub repeat_seed: bool,
    pub order: OrderLabel,
}

impl RunPlan {
    pub fn new(runs: usize, seed: u64) -> Self {
        Self {
            runs,
            users_per_run: 1,
            seed,
            repeat_seed: false,
            order: OrderLabel::Original,
        }
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        if self.repeat_seed {
            self.seed
        } else {
            SeedPath::root(self.seed)
                .child(STREAM_RUN)
                .child(run as u64)
                .value()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleOutcome {
    /// Mean of the member curves in dB, per subset size.
    pub curve: HardeningCurve,
    /// One curve per (run, user), run-major.
    pub members: Vec<HardeningCurve>,
    pub run_seeds: Vec<u64>,
}

/// Runs are independent and evaluated in parallel; results are collected in
/// run order so the average does not depend on scheduling.
pub fn run_ensemble(plan: &RunPlan, spec: &GeneratorSpec) -> Result<EnsembleOutcome> {
    if plan.runs == 0 || plan.users_per_run == 0 {
        return Err(Error::InvalidArgument(
            "runs and users per run must be >= 1".into(),
        ));
    }
    let run_seeds: Vec<u64> = (0..plan.runs).map(|r| plan.run_seed(r)).collect();
    let per_run = run_seeds
        .par_iter()
        .map(|&seed| {
            let tensor = spec.generate(seed, plan.users_per_run)?;
            (0..tensor.users())
                .map(|k| hardening_curve(&tensor, k, plan.order, spec.geometry()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let members: Vec<HardeningCurve> = per_run.into_iter().flatten().collect();
    let curve = average_curves(&members)?;
    Ok(EnsembleOutcome {
        curve,
        members,
        run_seeds,
    })
}
