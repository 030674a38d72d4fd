//! Parallel ensemble execution.
//!
//! Trajectories run on a dedicated rayon pool in fixed-size blocks; each
//! block is collected in index order and folded sequentially, so the result
//! is the same for every worker count.

use ionheat_core::mcwf::{EnsembleStats, Simulation};
use ionheat_core::Result;
use rayon::prelude::*;

const BLOCK: u64 = 1024;

/// Worker count: explicit value, else the machine's available parallelism.
pub fn resolve_workers(requested: Option<usize>) -> usize {
    requested
        .filter(|w| *w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn ensemble(sim: &Simulation, workers: usize, progress: bool) -> Result<EnsembleStats> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    let n_traj = sim.config().n_traj as u64;
    let mut acc = sim.accumulator();
    let mut next_report = n_traj / 10;
    let mut start = 0;
    while start < n_traj {
        let end = (start + BLOCK).min(n_traj);
        let block: Vec<_> = pool.install(|| (start..end).into_par_iter().map(|i| sim.trajectory(i)).collect());
        for outcome in block {
            acc.push(outcome)?;
        }
        if progress && end >= next_report && end < n_traj {
            log::info!("{end}/{n_traj} trajectories");
            next_report += n_traj / 10;
        }
        start = end;
    }
    acc.finish()
}
