//! Reduction of trajectory records into ensemble statistics.
//!
//! Records must be pushed in trajectory-index order; the fold is then a fixed
//! sequence of floating-point operations and the statistics do not depend on
//! how the trajectories were scheduled.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::{LevelDistribution, SimConfig, Simulation, TrajectoryRecord};
use crate::analytic::InitialCondition;
use crate::{Error, PhysicalParams, Result};

/// Ensemble mean, standard error and level histogram at each sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub t: Vec<f64>,
    pub mean_n: Vec<f64>,
    /// Standard error of `mean_n`; NaN when fewer than two trajectories were
    /// accepted.
    pub sem: Vec<f64>,
    /// `populations[i][m]` is the fraction of trajectories in level `m` at
    /// `t[i]`.
    pub populations: Vec<Vec<f64>>,
    pub population_sem: Vec<Vec<f64>>,
    /// Trajectories that entered the statistics.
    pub n_traj: usize,
    /// Trajectories aborted by truncation overflow.
    pub aborted: usize,
    pub seed: u64,
    pub jumps_down: u64,
    pub jumps_up: u64,
}

/// Streaming fold of [`TrajectoryRecord`]s.
#[derive(Debug, Clone)]
pub struct EnsembleAccumulator {
    t: Vec<f64>,
    dim: usize,
    seed: u64,
    requested: usize,
    accepted: usize,
    aborted: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
    pop_sum: Vec<f64>,
    pop_sq: Vec<f64>,
    jumps_down: u64,
    jumps_up: u64,
}

impl EnsembleAccumulator {
    pub fn new(config: &SimConfig) -> Self {
        let n_t = config.t_grid.len();
        Self {
            t: config.t_grid.clone(),
            dim: config.dim,
            seed: config.seed,
            requested: config.n_traj,
            accepted: 0,
            aborted: 0,
            mean: vec![0.0; n_t],
            m2: vec![0.0; n_t],
            pop_sum: vec![0.0; n_t * config.dim],
            pop_sq: vec![0.0; n_t * config.dim],
            jumps_down: 0,
            jumps_up: 0,
        }
    }

    /// Folds one trajectory outcome. Truncation overflows are counted as
    /// aborts; any other error is returned.
    pub fn push(&mut self, outcome: Result<TrajectoryRecord>) -> Result<()> {
        let record = match outcome {
            Ok(record) => record,
            Err(Error::TruncationOverflow { dim, population }) => {
                self.aborted += 1;
                log::debug!("trajectory aborted at truncation edge (dim {dim}, population {population:e})");
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        self.accepted += 1;
        let count = self.accepted as f64;
        for (i, sample) in record.samples.iter().enumerate() {
            // Welford update of mean and squared deviations.
            let x = sample.mean_n();
            let delta = x - self.mean[i];
            self.mean[i] += delta / count;
            self.m2[i] += delta * (x - self.mean[i]);
            let row = i * self.dim;
            match sample {
                LevelDistribution::Fock(n) => {
                    self.pop_sum[row + n] += 1.0;
                    self.pop_sq[row + n] += 1.0;
                }
                LevelDistribution::Spread { first, probs } => {
                    for (j, p) in probs.iter().enumerate() {
                        self.pop_sum[row + first + j] += p;
                        self.pop_sq[row + first + j] += p * p;
                    }
                }
            }
        }
        self.jumps_down += record.jumps_down;
        self.jumps_up += record.jumps_up;
        Ok(())
    }

    pub fn finish(self) -> Result<EnsembleStats> {
        let total = self.accepted + self.aborted;
        // More than 0.1% aborted trajectories bias the estimator.
        if self.aborted * 1000 > total || self.accepted == 0 {
            return Err(Error::TooManyAborts {
                aborted: self.aborted,
                total,
            });
        }
        if total != self.requested {
            log::warn!("ensemble folded {total} trajectories, {} requested", self.requested);
        }
        let n = self.accepted as f64;
        let sem_of = |m2: f64| {
            if self.accepted < 2 {
                f64::NAN
            } else {
                (m2.max(0.0) / (n - 1.0) / n).sqrt()
            }
        };
        let sem = self.m2.iter().map(|&m2| sem_of(m2)).collect();
        let mut populations = Vec::with_capacity(self.t.len());
        let mut population_sem = Vec::with_capacity(self.t.len());
        for i in 0..self.t.len() {
            let sums = &self.pop_sum[i * self.dim..(i + 1) * self.dim];
            let squares = &self.pop_sq[i * self.dim..(i + 1) * self.dim];
            populations.push(sums.iter().map(|s| s / n).collect());
            population_sem.push(sums.iter().zip(squares).map(|(s, q)| sem_of(q - s * s / n)).collect());
        }
        Ok(EnsembleStats {
            t: self.t,
            mean_n: self.mean,
            sem,
            populations,
            population_sem,
            n_traj: self.accepted,
            aborted: self.aborted,
            seed: self.seed,
            jumps_down: self.jumps_down,
            jumps_up: self.jumps_up,
        })
    }
}

/// Runs and folds all trajectories sequentially.
pub fn ensemble_average(init: InitialCondition, config: &SimConfig, params: &PhysicalParams) -> Result<EnsembleStats> {
    let sim = Simulation::new(init, config.clone(), params)?;
    let mut acc = sim.accumulator();
    for index in 0..config.n_traj as u64 {
        acc.push(sim.trajectory(index))?;
    }
    acc.finish()
}
