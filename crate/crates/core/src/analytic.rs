//! Exact solution of the time-local master equation for Fock initial states.
//!
//! The characteristic function evolves as
//! `χ_t(λ) = exp(−Δ(t)|λ|²) · χ₀(T_γ^{1/2}(t) λ)` with
//!
//! * `T_γ(t) = exp(−2∫₀^t γ)`, evaluated from the closed-form antiderivative of `γ`;
//! * `Δ(t) = ∫₀^t T_γ(t)/T_γ(t′) Δ̄(t′) dt′`, obtained from the equivalent
//!   initial-value problem `dΔ/dt = Δ̄(t) − 2γ(t)Δ`, `Δ(0) = 0`.
//!
//! For `|k⟩` the mean phonon number is `Δ + (T_γ − 1)/2 + k T_γ`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::ode::Dopri5;
use crate::quad::{self, Tolerance};
use crate::reservoir::{markovian_limit, TclCoefficients};
use crate::{Error, PhysicalParams, Result};

/// Largest Fock index accepted for the initial state and population vectors.
pub const MAX_FOCK_INDEX: usize = 10_000;
/// Default relative tolerance of the `Δ(t)` integration.
pub const DEFAULT_DELTA_TOLERANCE: f64 = 1e-10;
/// Default absolute tolerance on each Fock population.
pub const DEFAULT_POPULATION_TOLERANCE: f64 = 1e-10;
/// Relaxation law used as the memoryless reference for `|k⟩`.
pub const MARKOV_REFERENCE_FORMULA: &str = "n(w0) (1 - exp(-2 Gamma t)) + k exp(-2 Gamma t)";

/// `T_γ(t)` and `Δ(t)` at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionFunctions {
    pub t: f64,
    pub t_gamma: f64,
    pub big_delta: f64,
}

impl EvolutionFunctions {
    /// `Δ + T_γ/2`, the Gaussian width of `χ_t` in `|λ|²`.
    pub fn width(&self) -> f64 {
        self.big_delta + 0.5 * self.t_gamma
    }

    /// `⟨n̂⟩` for the initial state `|k⟩`.
    pub fn mean_phonons(&self, k: usize) -> f64 {
        self.big_delta + 0.5 * (self.t_gamma - 1.0) + k as f64 * self.t_gamma
    }
}

/// Initial motional state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialCondition {
    Fock { k: usize },
}

impl InitialCondition {
    pub fn fock(k: usize) -> Result<Self> {
        if k > MAX_FOCK_INDEX {
            return Err(Error::InvalidParameter {
                name: "k",
                value: k as f64,
                reason: "Fock index above the supported maximum",
            });
        }
        Ok(Self::Fock { k })
    }

    pub fn ground() -> Self {
        Self::Fock { k: 0 }
    }

    pub fn k(&self) -> usize {
        match *self {
            Self::Fock { k } => k,
        }
    }
}

/// `⟨n̂(t)⟩` at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatingSample {
    pub t: f64,
    pub mean_n: f64,
}

/// `T_γ(t) = exp(−2∫₀^t γ)`.
pub fn t_gamma_factor(t: f64, params: &PhysicalParams) -> f64 {
    let (_, g) = TclCoefficients::new(params).integrals(t);
    (-2.0 * g).exp()
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            operation: "time",
            value: t,
        })
    }
}

/// Solves for `(T_γ, Δ)` at every time of an ascending grid with one sweep of
/// the adaptive integrator.
pub fn evolution_on_grid(params: &PhysicalParams, grid: &[f64], tol: f64) -> Result<Vec<EvolutionFunctions>> {
    if let Some(&t) = grid.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::Domain {
            operation: "time",
            value: t,
        });
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter {
            name: "grid",
            value: f64::NAN,
            reason: "times must be ascending",
        });
    }
    let coeffs = TclCoefficients::new(params);
    let solver = Dopri5 {
        rtol: tol,
        atol: 1e-300,
        max_steps: 1_000_000,
        initial_step: Some(1e-3 / params.omega_c()),
        max_step: f64::INFINITY,
    };
    let mut out = Vec::with_capacity(grid.len());
    solver.integrate_grid(
        |t, y: &[f64; 1]| {
            let c = coeffs.at(t);
            [c.delta_bar - 2.0 * c.gamma * y[0]]
        },
        0.0,
        [0.0],
        grid,
        |_, t, y| {
            let (_, g) = coeffs.integrals(t);
            out.push(EvolutionFunctions {
                t,
                t_gamma: (-2.0 * g).exp(),
                big_delta: y[0],
            });
        },
    )?;
    Ok(out)
}

/// The evolution pair at a single time.
pub fn evolution_functions(t: f64, params: &PhysicalParams, tol: f64) -> Result<EvolutionFunctions> {
    check_time(t)?;
    Ok(evolution_on_grid(params, &[t], tol)?[0])
}

/// `Δ(t)` at relative tolerance `tol`.
pub fn big_delta(t: f64, params: &PhysicalParams, tol: f64) -> Result<f64> {
    Ok(evolution_functions(t, params, tol)?.big_delta)
}

/// `L_k(y)` by the upward three-term recurrence.
pub fn laguerre(k: usize, y: f64) -> f64 {
    let (mantissa, log_scale) = laguerre_scaled(k, y);
    mantissa * log_scale.exp()
}

const RESCALE_AT: f64 = 1e30;

/// `L_k(y) = mantissa · e^{log_scale}`, rescaling as the recurrence grows.
fn laguerre_scaled(k: usize, y: f64) -> (f64, f64) {
    let mut prev = 1.0;
    if k == 0 {
        return (prev, 0.0);
    }
    let mut cur = 1.0 - y;
    let mut log_scale = 0.0;
    for n in 1..k {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 - y) * cur - nf * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_AT {
            prev /= RESCALE_AT;
            cur /= RESCALE_AT;
            log_scale += RESCALE_AT.ln();
        }
    }
    (cur, log_scale)
}

/// Writes `e^{log_prefactor} · L_n(y)` for `n = 0..out.len()`.
fn laguerre_series_scaled(y: f64, log_prefactor: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut log_scale = log_prefactor;
    let mut factor = log_scale.exp();
    let mut prev = 1.0;
    out[0] = factor;
    if out.len() == 1 {
        return;
    }
    let mut cur = 1.0 - y;
    out[1] = factor * cur;
    for n in 1..out.len() - 1 {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 - y) * cur - nf * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_AT {
            prev /= RESCALE_AT;
            cur /= RESCALE_AT;
            log_scale += RESCALE_AT.ln();
            factor = log_scale.exp();
        }
        out[n + 1] = factor * cur;
    }
}

/// `ln L_n(−y)` for `y ≥ 0`; every term of `L_n(−y)` is positive.
fn log_laguerre_negative(n: usize, y: f64) -> f64 {
    let (mantissa, log_scale) = laguerre_scaled(n, -y);
    mantissa.ln() + log_scale
}

/// `χ_t` for `|k⟩` given the evolution pair.
pub fn characteristic_from(ev: &EvolutionFunctions, k: usize, lambda_abs2: f64) -> f64 {
    let (mantissa, log_scale) = laguerre_scaled(k, ev.t_gamma * lambda_abs2);
    mantissa * (log_scale - ev.width() * lambda_abs2).exp()
}

/// `χ_t(λ) = exp(−(Δ + T_γ/2)|λ|²) · L_k(T_γ|λ|²)` for the Fock state `|k⟩`.
pub fn characteristic_function(
    lambda_abs2: f64,
    t: f64,
    init: InitialCondition,
    params: &PhysicalParams,
) -> Result<f64> {
    if !(lambda_abs2 >= 0.0) {
        return Err(Error::Domain {
            operation: "characteristic_function",
            value: lambda_abs2,
        });
    }
    let ev = evolution_functions(t, params, DEFAULT_DELTA_TOLERANCE)?;
    Ok(characteristic_from(&ev, init.k(), lambda_abs2))
}

/// `⟨n̂(t)⟩ = Δ(t) + (T_γ(t) − 1)/2 + k T_γ(t)`.
pub fn heating_function(t: f64, init: InitialCondition, params: &PhysicalParams) -> Result<HeatingSample> {
    let ev = evolution_functions(t, params, DEFAULT_DELTA_TOLERANCE)?;
    Ok(HeatingSample {
        t,
        mean_n: ev.mean_phonons(init.k()),
    })
}

/// [`heating_function`] on an ascending grid.
pub fn heating_curve(
    grid: &[f64],
    init: InitialCondition,
    params: &PhysicalParams,
    tol: f64,
) -> Result<Vec<HeatingSample>> {
    let k = init.k();
    Ok(evolution_on_grid(params, grid, tol)?
        .into_iter()
        .map(|ev| HeatingSample {
            t: ev.t,
            mean_n: ev.mean_phonons(k),
        })
        .collect())
}

/// Memoryless reference: `n(ω₀)(1 − e^{−2Γt}) + k e^{−2Γt}` with `Γ = γ∞`.
///
/// The constant-coefficient equation relaxes populations at `2Γ`; see
/// [`MARKOV_REFERENCE_FORMULA`].
pub fn markovian_heating(t: f64, k: usize, params: &PhysicalParams) -> Result<HeatingSample> {
    check_time(t)?;
    let rates = markovian_limit(params)?;
    let decay = (-rates.relaxation_rate() * t).exp();
    Ok(HeatingSample {
        t,
        mean_n: rates.n_thermal * (1.0 - decay) + k as f64 * decay,
    })
}

/// Fock populations recovered from the characteristic function.
#[derive(Debug, Clone, PartialEq)]
pub struct Populations {
    /// `p_0 … p_{m_max}`.
    pub probs: Vec<f64>,
    /// Largest negative quadrature artifact that was clamped to zero.
    pub max_clamped: f64,
    /// Summed quadrature error estimate.
    pub error: f64,
}

impl Populations {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(m, p)| m as f64 * p).sum()
    }
}

/// `p_m(t) = ∫₀^∞ χ_t(u) e^{−u/2} L_m(u) du` for `m = 0..=m_max`, with
/// `u = |λ|²`.
pub fn fock_populations(
    t: f64,
    init: InitialCondition,
    m_max: usize,
    params: &PhysicalParams,
    tol: f64,
) -> Result<Populations> {
    let ev = evolution_functions(t, params, DEFAULT_DELTA_TOLERANCE)?;
    populations_from(&ev, init.k(), m_max, tol)
}

/// [`fock_populations`] from a precomputed evolution pair.
pub fn populations_from(ev: &EvolutionFunctions, k: usize, m_max: usize, tol: f64) -> Result<Populations> {
    if m_max < k || m_max > MAX_FOCK_INDEX {
        return Err(Error::InvalidParameter {
            name: "m_max",
            value: m_max as f64,
            reason: "must lie between the initial Fock index and the supported maximum",
        });
    }
    let width = ev.width();
    if !(width >= 0.25) {
        return Err(Error::IllConditioned { width });
    }
    let decay = width + 0.5;
    let t_gamma = ev.t_gamma;

    // Tail bound: |L_n(y)| ≤ L_n(−y), so the integrand is dominated by
    // e^{−decay·u} L_k(−T_γ u) L_{m_max}(−u), a polynomial of degree d times an
    // exponential. Past u = 2d/decay the remainder is below 2·bound(u)/decay.
    let degree = (k + m_max) as f64;
    let log_bound = |u: f64| {
        -decay * u + log_laguerre_negative(k, t_gamma * u) + log_laguerre_negative(m_max, u)
    };
    let target = (1e-3 * tol * decay / 2.0).ln();
    let mut upper = (2.0 * degree / decay).max(1.0 / decay);
    while log_bound(upper) > target {
        upper *= 1.5;
    }

    let components = m_max + 1;
    let pieces = (4.0 + (degree * upper).sqrt()).min(5000.0) as usize;
    let (values, error) = quad::integrate_vec(
        |u, out: &mut [f64]| {
            let (mantissa, log_scale) = laguerre_scaled(k, t_gamma * u);
            if mantissa == 0.0 {
                out.fill(0.0);
                return;
            }
            laguerre_series_scaled(u, log_scale - decay * u + mantissa.abs().ln(), out);
            if mantissa < 0.0 {
                out.iter_mut().for_each(|v| *v = -*v);
            }
        },
        components,
        0.0,
        upper,
        pieces,
        Tolerance {
            abs: tol,
            rel: 0.0,
            max_intervals: 200_000,
        },
    )?;

    let clamp_limit = 10.0 * (tol + error);
    let mut probs = vec![0.0; components];
    let mut max_clamped: f64 = 0.0;
    for (p, v) in probs.iter_mut().zip(values) {
        if v < 0.0 {
            if -v > clamp_limit {
                return Err(Error::ToleranceNotMet {
                    estimate: -v,
                    requested: clamp_limit,
                });
            }
            max_clamped = max_clamped.max(-v);
        } else {
            *p = v;
        }
    }
    if max_clamped > 0.0 {
        log::debug!("clamped negative population artifacts up to {max_clamped:e}");
    }
    Ok(Populations {
        probs,
        max_clamped,
        error,
    })
}
