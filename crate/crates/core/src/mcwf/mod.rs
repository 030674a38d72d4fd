//! Quantum-jump unraveling of the time-dependent Lindblad equation.
//!
//! The two dissipators are read as jump channels `â` at rate
//! `Γ₁ = Δ̄ + γ` and `â†` at rate `Γ₂ = Δ̄ − γ`. No Hamiltonian term is
//! present, so the no-jump evolution is diagonal in the Fock basis and a
//! trajectory started in `|k⟩` stays a Fock state between jumps.
//!
//! Two integration schemes share the same random-number consumption (one
//! norm threshold per waiting period, one channel draw per jump):
//!
//! * [`Scheme::Exact`] solves the waiting-time condition exactly from the
//!   closed-form rate integrals. It only supports Fock states, which is all a
//!   Fock initial condition ever produces.
//! * [`Scheme::Stepped`] is the first-order stepping scheme: midpoint rates,
//!   step size capped by a jump-probability budget, jumps resolved at step
//!   ends.

mod ensemble;
mod rng;
mod state;

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::analytic::{self, InitialCondition};
use crate::reservoir::{TclCoefficients, POSITIVITY_SLACK};
use crate::{Error, PhysicalParams, Result};

pub use ensemble::{ensemble_average, EnsembleAccumulator, EnsembleStats};
pub use rng::trajectory_rng;
pub use state::FockStateVector;

/// Default per-step jump-probability budget.
pub const DEFAULT_DP_MAX: f64 = 1e-2;
/// Default bound on the population of the two highest levels.
pub const DEFAULT_LEAK_TOL: f64 = 1e-6;
/// An initial level must sit at least this far below the truncation edge.
pub const EDGE_MARGIN: usize = 2;
/// Step cap `TRANSIENT_STEP/ω_c` applies while `t < TRANSIENT_WINDOW/ω_c`.
pub const TRANSIENT_STEP: f64 = 0.05;
pub const TRANSIENT_WINDOW: f64 = 10.0;

/// Channel rates at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    /// `Γ₁` of the lowering channel `â`.
    pub rate_down: f64,
    /// `Γ₂` of the raising channel `â†`.
    pub rate_up: f64,
}

impl RatePair {
    pub const ZERO: Self = Self {
        rate_down: 0.0,
        rate_up: 0.0,
    };

    /// Total no-jump decay rate of `|n⟩`: `Γ₁n + Γ₂(n+1)`.
    pub fn level_rate(&self, n: f64) -> f64 {
        self.rate_down * n + self.rate_up * (n + 1.0)
    }

    fn checked(t: f64, rate_down: f64, rate_up: f64) -> Result<Self> {
        // The slack is absolute in s⁻¹ and absorbs rounding around t = 0.
        if rate_down < -POSITIVITY_SLACK || rate_up < -POSITIVITY_SLACK || rate_down.is_nan() || rate_up.is_nan() {
            return Err(Error::NonLindbladRates { t, rate_down, rate_up });
        }
        Ok(Self {
            rate_down: rate_down.max(0.0),
            rate_up: rate_up.max(0.0),
        })
    }
}

/// `(Δ̄+γ, Δ̄−γ)` at time `t`.
pub fn jump_rates(t: f64, params: &PhysicalParams) -> Result<RatePair> {
    RateModel::new(RateModelKind::TimeDependent, params).at(t)
}

/// Which rates drive the trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateModelKind {
    /// The full time-dependent coefficients.
    #[default]
    TimeDependent,
    /// Rates frozen at their `t → ∞` values (memoryless dynamics).
    FrozenAsymptotic,
}

/// Rate evaluation with closed-form time integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateModel {
    TimeDependent(TclCoefficients),
    Frozen(RatePair),
}

impl RateModel {
    pub fn new(kind: RateModelKind, params: &PhysicalParams) -> Self {
        let coeffs = TclCoefficients::new(params);
        match kind {
            RateModelKind::TimeDependent => Self::TimeDependent(coeffs),
            RateModelKind::FrozenAsymptotic => {
                let (d, g) = coeffs.asymptotic();
                Self::Frozen(RatePair {
                    rate_down: d + g,
                    rate_up: (d - g).max(0.0),
                })
            }
        }
    }

    pub fn at(&self, t: f64) -> Result<RatePair> {
        match self {
            Self::TimeDependent(c) => {
                let p = c.at(t);
                RatePair::checked(t, p.rate_down(), p.rate_up())
            }
            Self::Frozen(rates) => Ok(*rates),
        }
    }

    /// `(∫Γ₁, ∫Γ₂)` over `[t0, t1]`.
    pub fn integrated(&self, t0: f64, t1: f64) -> (f64, f64) {
        match self {
            Self::TimeDependent(c) => {
                let (d, g) = c.integrals_between(t0, t1);
                (d + g, (d - g).max(0.0))
            }
            Self::Frozen(rates) => {
                let dt = t1 - t0;
                (rates.rate_down * dt, rates.rate_up * dt)
            }
        }
    }

    /// From this time on the rates are constant to double precision.
    pub fn constant_from(&self) -> f64 {
        match self {
            Self::TimeDependent(c) => c.settling_time(),
            Self::Frozen(_) => 0.0,
        }
    }

    /// Rates once the transient has died out.
    pub fn stationary(&self) -> Result<RatePair> {
        match self {
            Self::TimeDependent(c) => {
                let (d, g) = c.asymptotic();
                RatePair::checked(f64::INFINITY, d + g, d - g)
            }
            Self::Frozen(rates) => Ok(*rates),
        }
    }
}

/// Time-integration scheme for trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Exact waiting times for Fock-state trajectories.
    #[default]
    Exact,
    /// First-order stepping with a jump-probability budget.
    Stepped,
}

/// Step-size policy of the stepped scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtPolicy {
    /// Largest predicted jump probability per step.
    pub dp_max: f64,
    /// Largest step in seconds.
    pub dt_max: f64,
}

impl Default for DtPolicy {
    fn default() -> Self {
        Self {
            dp_max: DEFAULT_DP_MAX,
            dt_max: f64::INFINITY,
        }
    }
}

/// Simulation settings shared by every trajectory of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dim: usize,
    pub n_traj: usize,
    pub seed: u64,
    /// Sample times; strictly increasing, starting at 0.
    pub t_grid: Vec<f64>,
    pub dt_policy: DtPolicy,
    pub leak_tol: f64,
    pub scheme: Scheme,
    pub rate_model: RateModelKind,
}

impl SimConfig {
    pub fn new(dim: usize, n_traj: usize, seed: u64, t_grid: Vec<f64>) -> Self {
        Self {
            dim,
            n_traj,
            seed,
            t_grid,
            dt_policy: DtPolicy::default(),
            leak_tol: DEFAULT_LEAK_TOL,
            scheme: Scheme::default(),
            rate_model: RateModelKind::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |name, value, reason| Err(Error::InvalidParameter { name, value, reason });
        if self.dim < 2 {
            return invalid("dim", self.dim as f64, "must be at least 2");
        }
        if self.n_traj == 0 {
            return invalid("n_traj", 0.0, "must be at least 1");
        }
        match self.t_grid.first() {
            Some(&t0) if t0 == 0.0 => {}
            other => return invalid("t_grid", other.copied().unwrap_or(f64::NAN), "must start at 0"),
        }
        if let Some(w) = self.t_grid.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return invalid("t_grid", w[1], "must be strictly increasing and finite");
        }
        let dp = self.dt_policy.dp_max;
        if !(dp > 0.0 && dp <= 0.1) {
            return invalid("dp_max", dp, "must lie in (0, 0.1]");
        }
        if !(self.dt_policy.dt_max > 0.0) {
            return invalid("dt_max", self.dt_policy.dt_max, "must be positive");
        }
        if !(self.leak_tol > 0.0 && self.leak_tol < 1.0) {
            return invalid("leak_tol", self.leak_tol, "must lie in (0, 1)");
        }
        Ok(())
    }
}

/// Truncation dimension that keeps a thermal-like distribution with mean
/// `n_target` below `leak_tol` at the edge with a further factor 10³ margin.
///
/// A geometric tail falls as `e^{−m/(n̄+1)}`, so the edge must sit about
/// `(n̄+1)·ln(10³/leak_tol)` levels above the mean.
pub fn default_dim(n_target: f64, leak_tol: f64) -> usize {
    let n = n_target.max(0.0);
    let dim = n + (n + 1.0) * (1e3 / leak_tol).ln() + 10.0;
    dim.ceil() as usize
}

/// [`default_dim`] with `n_target` taken as the largest of `k` and the exact
/// mean phonon number over `t_grid`.
pub fn default_dim_for(init: InitialCondition, params: &PhysicalParams, t_grid: &[f64], leak_tol: f64) -> Result<usize> {
    let curve = analytic::heating_curve(t_grid, init, params, analytic::DEFAULT_DELTA_TOLERANCE)?;
    let peak = curve.iter().map(|s| s.mean_n).fold(init.k() as f64, f64::max);
    Ok(default_dim(peak, leak_tol).max(init.k() + EDGE_MARGIN + 1))
}

/// No-jump evolution over `dt` with `rates` taken at the step midpoint.
///
/// Each amplitude is damped by `exp(−½·dt·(Γ₁n + Γ₂(n+1)))`. Returns the
/// jump probability of the step, `1 − ‖ψ′‖²/‖ψ‖²`; the state is left
/// sub-normalized.
pub fn deterministic_step(state: &mut FockStateVector, dt: f64, rates: RatePair, dp_max: f64) -> Result<f64> {
    let before = state.norm_sqr();
    state.scale_levels(|n| (-0.5 * dt * rates.level_rate(n as f64)).exp());
    let dp = 1.0 - state.norm_sqr() / before;
    if dp > 2.0 * dp_max {
        return Err(Error::StepTooLarge {
            realized: dp,
            limit: dp_max,
        });
    }
    Ok(dp)
}

/// Jump channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// `â`, one quantum emitted into the reservoir.
    Lower,
    /// `â†`, one quantum absorbed from the reservoir.
    Raise,
}

/// Applies one jump chosen by `u ∈ [0, 1)` and renormalizes.
///
/// `â` is taken with probability `Γ₁⟨â†â⟩/(Γ₁⟨â†â⟩ + Γ₂⟨ââ†⟩)`. A raising jump
/// that would push population above `leak_tol` into the two highest levels
/// invalidates the trajectory.
pub fn jump_step(state: &mut FockStateVector, rates: RatePair, u: f64, leak_tol: f64) -> Result<Channel> {
    let (n, norm) = state_moments(state);
    let w_down = rates.rate_down * n;
    let w_up = rates.rate_up * (n + norm);
    let total = w_down + w_up;
    if !(total > 0.0) {
        return Err(Error::Domain {
            operation: "jump_step weight",
            value: total,
        });
    }
    let channel = if u * total < w_down { Channel::Lower } else { Channel::Raise };
    match channel {
        Channel::Lower => state.lower(),
        Channel::Raise => {
            let edge = state.top_population(1);
            if edge > leak_tol {
                return Err(Error::TruncationOverflow {
                    dim: state.dim(),
                    population: edge,
                });
            }
            state.raise();
            state.normalize();
            let top = state.top_population(EDGE_MARGIN);
            if top > leak_tol {
                return Err(Error::TruncationOverflow {
                    dim: state.dim(),
                    population: top,
                });
            }
            return Ok(channel);
        }
    }
    state.normalize();
    Ok(channel)
}

fn state_moments(state: &FockStateVector) -> (f64, f64) {
    let norm = state.norm_sqr();
    (state.mean_n() * norm, norm)
}

/// Level occupation of one trajectory at one sample time.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelDistribution {
    Fock(usize),
    /// Normalized populations of levels `first, first+1, …`.
    Spread { first: usize, probs: Vec<f64> },
}

impl LevelDistribution {
    pub fn from_state(state: &FockStateVector) -> Self {
        match state.as_fock() {
            Some(n) => Self::Fock(n),
            None => Self::Spread {
                first: state.support().start,
                probs: state.populations(),
            },
        }
    }

    pub fn mean_n(&self) -> f64 {
        match self {
            Self::Fock(n) => *n as f64,
            Self::Spread { first, probs } => probs.iter().enumerate().map(|(i, p)| (first + i) as f64 * p).sum(),
        }
    }
}

/// Samples and jump counts of a single trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub index: u64,
    /// One entry per time of `t_grid`.
    pub samples: Vec<LevelDistribution>,
    pub jumps_down: u64,
    pub jumps_up: u64,
}

/// A validated ensemble definition from which trajectories can be drawn in
/// any order.
#[derive(Debug, Clone)]
pub struct Simulation {
    init: InitialCondition,
    config: SimConfig,
    model: RateModel,
    omega_c: f64,
}

impl Simulation {
    pub fn new(init: InitialCondition, config: SimConfig, params: &PhysicalParams) -> Result<Self> {
        let model = RateModel::new(config.rate_model, params);
        Self::with_model(init, config, model, params.omega_c())
    }

    /// An ensemble driven by an explicit rate model; `config.rate_model` is
    /// ignored. `omega_c` sets the transient step cap of the stepped scheme.
    pub fn with_model(init: InitialCondition, config: SimConfig, model: RateModel, omega_c: f64) -> Result<Self> {
        config.validate()?;
        if init.k() + EDGE_MARGIN >= config.dim {
            return Err(Error::InvalidParameter {
                name: "dim",
                value: config.dim as f64,
                reason: "initial Fock level too close to the truncation edge",
            });
        }
        Ok(Self {
            init,
            model,
            config,
            omega_c,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn init(&self) -> InitialCondition {
        self.init
    }

    /// Runs trajectory `index`; the outcome depends only on the master seed
    /// and `index`.
    pub fn trajectory(&self, index: u64) -> Result<TrajectoryRecord> {
        match self.config.scheme {
            Scheme::Exact => self.exact_trajectory(index),
            Scheme::Stepped => self.stepped_trajectory(index),
        }
    }

    pub fn accumulator(&self) -> EnsembleAccumulator {
        EnsembleAccumulator::new(&self.config)
    }

    fn exact_trajectory(&self, index: u64) -> Result<TrajectoryRecord> {
        let mut rng = trajectory_rng(self.config.seed, index);
        let grid = &self.config.t_grid;
        let dim = self.config.dim;
        let constant_from = self.model.constant_from();
        let stationary = self.model.stationary()?;
        let mut record = TrajectoryRecord {
            index,
            samples: Vec::with_capacity(grid.len()),
            jumps_down: 0,
            jumps_up: 0,
        };
        let mut n = self.init.k();
        let mut t = 0.0;
        let mut budget = rng::exponential(&mut rng);
        record.samples.push(LevelDistribution::Fock(n));
        for &t_next in &grid[1..] {
            loop {
                let jump_at = if t >= constant_from {
                    let lam = stationary.level_rate(n as f64);
                    let tj = t + budget / lam;
                    if tj <= t_next {
                        Some((tj, stationary))
                    } else {
                        budget -= lam * (t_next - t);
                        None
                    }
                } else {
                    let hazard = self.hazard(n, t, t_next);
                    if hazard < budget {
                        budget -= hazard;
                        None
                    } else {
                        let tj = self.solve_hazard(n, t, t_next, budget)?;
                        Some((tj, self.model.at(tj)?))
                    }
                };
                let Some((tj, rates)) = jump_at else {
                    t = t_next;
                    break;
                };
                let w_down = rates.rate_down * n as f64;
                let w_up = rates.rate_up * (n + 1) as f64;
                let u = rng::unit(&mut rng);
                if u * (w_down + w_up) < w_down {
                    n -= 1;
                    record.jumps_down += 1;
                } else {
                    if n + 1 + EDGE_MARGIN > dim {
                        return Err(Error::TruncationOverflow { dim, population: 1.0 });
                    }
                    n += 1;
                    record.jumps_up += 1;
                }
                t = tj;
                budget = rng::exponential(&mut rng);
            }
            record.samples.push(LevelDistribution::Fock(n));
        }
        Ok(record)
    }

    /// `∫ (Γ₁n + Γ₂(n+1))` over `[t0, t1]`.
    fn hazard(&self, n: usize, t0: f64, t1: f64) -> f64 {
        let (down, up) = self.model.integrated(t0, t1);
        (n as f64 * down + (n + 1) as f64 * up).max(0.0)
    }

    /// The time in `(t0, t1]` at which the accumulated hazard reaches `target`.
    fn solve_hazard(&self, n: usize, t0: f64, t1: f64, target: f64) -> Result<f64> {
        let (mut lo, mut hi) = (t0, t1);
        let mut s = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.hazard(n, t0, s) - target;
            if f < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            if f.abs() <= 1e-14 * target || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(s);
            }
            let slope = self.model.at(s)?.level_rate(n as f64);
            let newton = s - f / slope;
            s = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        }
        Ok(s)
    }

    fn stepped_trajectory(&self, index: u64) -> Result<TrajectoryRecord> {
        let mut rng = trajectory_rng(self.config.seed, index);
        let cfg = &self.config;
        let transient_end = match self.model {
            RateModel::TimeDependent(_) => TRANSIENT_WINDOW / self.omega_c,
            RateModel::Frozen(_) => 0.0,
        };
        let transient_step = TRANSIENT_STEP / self.omega_c;
        let mut state = FockStateVector::fock(self.init.k(), cfg.dim)?;
        let mut record = TrajectoryRecord {
            index,
            samples: Vec::with_capacity(cfg.t_grid.len()),
            jumps_down: 0,
            jumps_up: 0,
        };
        record.samples.push(LevelDistribution::from_state(&state));
        let mut threshold = rng::open_unit(&mut rng);
        let mut t = 0.0;
        for &t_next in &cfg.t_grid[1..] {
            while t < t_next {
                let mut dt = (t_next - t).min(cfg.dt_policy.dt_max);
                if t < transient_end {
                    dt = dt.min(transient_step);
                }
                let w = self.model.at(t)?.level_rate(state.mean_n());
                if w > 0.0 {
                    dt = dt.min(cfg.dt_policy.dp_max / w);
                }
                let rates = self.model.at(t + 0.5 * dt)?;
                deterministic_step(&mut state, dt, rates, cfg.dt_policy.dp_max)?;
                t = if t + dt >= t_next { t_next } else { t + dt };
                if state.norm_sqr() <= threshold {
                    match jump_step(&mut state, rates, rng::unit(&mut rng), cfg.leak_tol)? {
                        Channel::Lower => record.jumps_down += 1,
                        Channel::Raise => record.jumps_up += 1,
                    }
                    threshold = rng::open_unit(&mut rng);
                }
            }
            let mut sample = state.clone();
            sample.normalize();
            record.samples.push(LevelDistribution::from_state(&sample));
        }
        Ok(record)
    }
}

/// Runs trajectory `traj_index` of the ensemble defined by `config`.
pub fn run_trajectory(
    init: InitialCondition,
    config: &SimConfig,
    params: &PhysicalParams,
    traj_index: u64,
) -> Result<TrajectoryRecord> {
    Simulation::new(init, config.clone(), params)?.trajectory(traj_index)
}
