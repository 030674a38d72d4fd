use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("argument outside the domain of {operation}: {value}")]
    Domain { operation: &'static str, value: f64 },
    #[error("correlation kernel diverges at tau = {tau}")]
    DivergentAtZero { tau: f64 },
    #[error("error estimate {estimate:e} exceeds requested tolerance {requested:e}")]
    ToleranceNotMet { estimate: f64, requested: f64 },
    #[error("adaptive stepper failed at t = {t:e}: {reason}")]
    StepFailure { t: f64, reason: &'static str },
    #[error("population quadrature is ill-conditioned (Δ + T_γ/2 = {width} < 1/4)")]
    IllConditioned { width: f64 },
    #[error("Markovian limit undefined: asymptotic damping γ∞ = {gamma_inf}")]
    Degenerate { gamma_inf: f64 },
    #[error("negative jump rate at t = {t:e}: down = {rate_down:e}, up = {rate_up:e}")]
    NonLindbladRates {
        t: f64,
        rate_down: f64,
        rate_up: f64,
    },
    #[error("step jump probability {realized} exceeds twice the limit {limit}")]
    StepTooLarge { realized: f64, limit: f64 },
    #[error("population {population:e} reached the truncation edge (dim = {dim})")]
    TruncationOverflow { dim: usize, population: f64 },
    #[error("{aborted} of {total} trajectories aborted (limit 0.1%)")]
    TooManyAborts { aborted: usize, total: usize },
}
