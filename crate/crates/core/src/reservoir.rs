//! Reservoir model: Lorentzian-cutoff Ohmic spectral density, thermal
//! occupation, the two reservoir kernels, and the time-dependent coefficients
//! `Δ̄(t)`, `γ(t)` of the time-local master equation together with their
//! positivity audit and Markovian limit.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::quad::{self, Tolerance};
use crate::{Error, PhysicalParams, Result};

/// Default absolute slack used when auditing `Δ̄ ± γ ≥ 0`, in s⁻¹.
pub const POSITIVITY_SLACK: f64 = 1e-18;

/// `|g(ω)|² = ω_c² / (π(ω² + ω_c²))`.
pub fn spectral_density(omega: f64, params: &PhysicalParams) -> f64 {
    let ratio = omega / params.omega_c();
    1.0 / (PI * (1.0 + ratio * ratio))
}

/// Bose factor `1/(eˣ − 1)` for `x > 0`.
pub fn bose_factor(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// `n(ω) = 1/(e^{βħω} − 1)`.
pub fn thermal_occupation(omega: f64, params: &PhysicalParams) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain {
            operation: "thermal_occupation",
            value: omega,
        });
    }
    Ok(bose_factor(omega / params.thermal_frequency()))
}

/// Controls for the oscillatory quadrature behind [`correlation_kernel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Requested relative accuracy of the kernel value.
    pub rel_tol: f64,
    /// Hard cap on the number of half-period panels.
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            max_panels: 5_000_000,
        }
    }
}

/// A kernel value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEstimate {
    pub value: f64,
    pub error: f64,
    /// Number of half-period panels integrated.
    pub panels: usize,
    /// Upper frequency reached by the panel sum, rad/s.
    pub omega_reached: f64,
}

/// `κ(τ) = α ∫₀^∞ ω |g(ω)|² (2n(ω) + 1) cos(ωτ) dω`.
///
/// The integrand decays only like `1/ω` beyond the thermal frequency, so the
/// integral is summed panel by panel between consecutive zeros of `cos(ωτ)`.
/// Panel values alternate in sign with decreasing magnitude, which bounds the
/// remainder by the next panel; the sum stops once that bound satisfies the
/// tolerance, and never beyond `Ω_max = 50·max(ω_c, 1/(ħβ))`.
pub fn correlation_kernel(tau: f64, params: &PhysicalParams, cfg: &QuadratureConfig) -> Result<KernelEstimate> {
    if tau.is_nan() {
        return Err(Error::Domain {
            operation: "correlation_kernel",
            value: tau,
        });
    }
    if tau <= 0.0 {
        return Err(Error::DivergentAtZero { tau });
    }
    let alpha = params.alpha();
    let omega_c = params.omega_c();
    let thermal = params.thermal_frequency();
    let omega_max = 50.0 * omega_c.max(thermal);
    let integrand = |omega: f64| {
        // ω(2n(ω) + 1), finite as ω → 0.
        let weighted = if omega == 0.0 {
            2.0 * thermal
        } else {
            omega + 2.0 * omega / (omega / thermal).exp_m1()
        };
        let ratio = omega / omega_c;
        alpha / PI * weighted / (1.0 + ratio * ratio) * (omega * tau).cos()
    };
    let half_period = PI / tau;
    let panel = |lo: f64, hi: f64, scale: f64| -> Result<quad::Estimate> {
        let pieces = ((hi - lo) / omega_c).ceil().clamp(1.0, 1000.0) as usize;
        quad::integrate(
            integrand,
            lo,
            hi,
            pieces,
            Tolerance {
                abs: 0.05 * cfg.rel_tol * scale,
                rel: 0.05 * cfg.rel_tol,
                max_intervals: 50_000,
            },
        )
    };

    let first = panel(0.0, 0.5 * half_period, 0.0)?;
    let mut sum = first.value;
    let mut quad_error = first.error;
    let mut index = 1usize;
    let mut next = panel(0.5 * half_period, 1.5 * half_period, sum.abs())?;
    loop {
        let upper = (index as f64 + 0.5) * half_period;
        let tail = 0.5 * next.value.abs();
        let value = sum + 0.5 * next.value;
        let error = tail + quad_error + next.error;
        let converged = index >= 2 && error <= cfg.rel_tol * value.abs();
        if converged || upper >= omega_max || index >= cfg.max_panels {
            if error > cfg.rel_tol * value.abs() {
                return Err(Error::ToleranceNotMet {
                    estimate: error / value.abs(),
                    requested: cfg.rel_tol,
                });
            }
            return Ok(KernelEstimate {
                value,
                error,
                panels: index + 1,
                omega_reached: upper,
            });
        }
        sum += next.value;
        quad_error += next.error;
        index += 1;
        let lo = (index as f64 - 0.5) * half_period;
        next = panel(lo, lo + half_period, sum.abs())?;
    }
}

/// `μ(τ) = α ∫₀^∞ ω |g(ω)|² sin(ωτ) dω = α ω_c² e^{−ω_c τ} / 2`.
pub fn susceptibility_kernel(tau: f64, params: &PhysicalParams) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain {
            operation: "susceptibility_kernel",
            value: tau,
        });
    }
    let omega_c = params.omega_c();
    Ok(0.5 * params.alpha() * omega_c * omega_c * (-omega_c * tau).exp())
}

/// Instantaneous master-equation coefficients at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientPair {
    pub t: f64,
    pub delta_bar: f64,
    pub gamma: f64,
}

impl CoefficientPair {
    /// Rate of the lowering channel, `Δ̄ + γ`.
    pub fn rate_down(&self) -> f64 {
        self.delta_bar + self.gamma
    }

    /// Rate of the raising channel, `Δ̄ − γ`.
    pub fn rate_up(&self) -> f64 {
        self.delta_bar - self.gamma
    }
}

/// Pieces of `e^{zx}` with `z = −1 + i/r`, with the low orders removed where
/// the coefficient formulas cancel them exactly.
struct Expansion {
    /// `e^{zx} − 1`
    r1: Complex64,
    /// `e^{zx} − 1 − zx`
    r2: Complex64,
    /// `∫₀^x e^{zs} ds = (e^{zx} − 1)/z`
    f1: Complex64,
    /// `f1 − x − z x²/2`, kept only on the series branch.
    f3: Option<Complex64>,
}

impl Expansion {
    fn new(z: Complex64, x: f64) -> Self {
        let zx = z * x;
        let c1 = zx;
        let c2 = zx * zx * 0.5;
        if zx.norm_sqr() <= 0.25 {
            // Power series; |zx| ≤ 1/2 keeps every term below the previous one.
            let mut term = c2;
            let mut tail = Complex64::new(0.0, 0.0);
            for n in 3..40 {
                term = term * zx / n as f64;
                tail += term;
                if term.norm_sqr() <= 1e-36 * tail.norm_sqr() {
                    break;
                }
            }
            let r2 = c2 + tail;
            let f3 = tail / z;
            Self {
                r1: c1 + r2,
                r2,
                f1: Complex64::new(x, 0.0) + z * (0.5 * x * x) + f3,
                f3: Some(f3),
            }
        } else {
            let envelope = (-x).exp();
            let phase = x * z.im;
            let e = Complex64::new(envelope * phase.cos(), envelope * phase.sin());
            let r1 = e - 1.0;
            let f1 = r1 / z;
            Self {
                r1,
                r2: r1 - c1,
                f1,
                f3: None,
            }
        }
    }

    /// `1 − Re e^{zx} − r Im e^{zx}`, whose first-order terms cancel.
    fn damping(&self, r: f64) -> f64 {
        match self.f3 {
            Some(_) => -self.r2.re - r * self.r2.im,
            None => -self.r1.re - r * self.r1.im,
        }
    }

    /// `∫₀^x [1 − Re e^{zs} − r Im e^{zs}] ds`, whose terms through `x²` cancel.
    fn damping_integral(&self, x: f64, r: f64) -> f64 {
        match self.f3 {
            Some(f3) => -f3.re - r * f3.im,
            None => x - self.f1.re - r * self.f1.im,
        }
    }
}

/// Closed-form `Δ̄(t)`, `γ(t)` and their time integrals for one parameter set.
///
/// With `x = ω_c t`:
///
/// ```text
/// Δ̄(t) = α/(ħβω₀) · r/(r²+1) · [e^{−x} sin(x/r) + r(1 − e^{−x} cos(x/r))]
/// γ(t)  = α/2 · r²/(r²+1) · [1 − e^{−x} cos(x/r) − r e^{−x} sin(x/r)]
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TclCoefficients {
    delta_scale: f64,
    gamma_scale: f64,
    omega_c: f64,
    r: f64,
    z: Complex64,
}

impl TclCoefficients {
    pub fn new(params: &PhysicalParams) -> Self {
        let r = params.r();
        let r2 = r * r;
        Self {
            delta_scale: params.alpha() / params.hbar_beta_omega0() * r / (r2 + 1.0),
            gamma_scale: 0.5 * params.alpha() * r2 / (r2 + 1.0),
            omega_c: params.omega_c(),
            r,
            z: Complex64::new(-1.0, 1.0 / r),
        }
    }

    pub fn at(&self, t: f64) -> CoefficientPair {
        let e = Expansion::new(self.z, self.omega_c * t);
        let r = self.r;
        CoefficientPair {
            t,
            delta_bar: self.delta_scale * (e.r1.im - r * e.r1.re),
            gamma: self.gamma_scale * e.damping(r),
        }
    }

    /// `(Δ̄∞, γ∞)`.
    pub fn asymptotic(&self) -> (f64, f64) {
        (self.delta_scale * self.r, self.gamma_scale)
    }

    /// Beyond this time the transient `e^{−ω_c t}` is below 10⁻¹⁷ and the
    /// coefficients equal their asymptotes to double precision.
    pub fn settling_time(&self) -> f64 {
        40.0 / self.omega_c
    }

    /// `(∫₀^t Δ̄, ∫₀^t γ)`.
    pub fn integrals(&self, t: f64) -> (f64, f64) {
        let x = self.omega_c * t;
        let e = Expansion::new(self.z, x);
        let r = self.r;
        let d = self.delta_scale / self.omega_c * (e.f1.im + r * (x - e.f1.re));
        let g = self.gamma_scale / self.omega_c * e.damping_integral(x, r);
        (d, g)
    }

    /// `(∫Δ̄, ∫γ)` over `[t0, t1]`.
    pub fn integrals_between(&self, t0: f64, t1: f64) -> (f64, f64) {
        if self.omega_c * t0 < 1.0 {
            let (d0, g0) = self.integrals(t0);
            let (d1, g1) = self.integrals(t1);
            return (d1 - d0, g1 - g0);
        }
        // Split off the linear growth so late increments keep full precision.
        let (d_inf, g_inf) = self.asymptotic();
        let (d_rest0, g_rest0) = self.transient_integrals(t0);
        let (d_rest1, g_rest1) = self.transient_integrals(t1);
        let dt = t1 - t0;
        (d_inf * dt + (d_rest1 - d_rest0), g_inf * dt + (g_rest1 - g_rest0))
    }

    /// `(∫₀^t (Δ̄ − Δ̄∞), ∫₀^t (γ − γ∞))`.
    fn transient_integrals(&self, t: f64) -> (f64, f64) {
        let e = Expansion::new(self.z, self.omega_c * t);
        let r = self.r;
        (
            self.delta_scale / self.omega_c * (e.f1.im - r * e.f1.re),
            self.gamma_scale / self.omega_c * (-e.f1.re - r * e.f1.im),
        )
    }
}

/// The closed-form coefficients at time `t ≥ 0`.
pub fn tcl_coefficients(t: f64, params: &PhysicalParams) -> CoefficientPair {
    TclCoefficients::new(params).at(t)
}

/// Outcome of scanning `Δ̄ ± γ` over a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    pub valid: bool,
    pub min_sum: f64,
    pub min_difference: f64,
    /// Time at which `Δ̄ − γ` is smallest.
    pub argmin_difference: f64,
    /// First grid time at which either combination drops below `−tolerance`.
    pub first_violation: Option<f64>,
    pub tolerance: f64,
    pub n_grid: usize,
}

/// Checks that both channel rates `Δ̄ + γ` and `Δ̄ − γ` stay non-negative (up
/// to [`POSITIVITY_SLACK`]) on `n_grid` uniform points over `[0, t_max]`.
pub fn lindblad_validity(params: &PhysicalParams, t_max: f64, n_grid: usize) -> Result<ValidityReport> {
    lindblad_validity_with_tolerance(params, t_max, n_grid, POSITIVITY_SLACK)
}

pub fn lindblad_validity_with_tolerance(
    params: &PhysicalParams,
    t_max: f64,
    n_grid: usize,
    tolerance: f64,
) -> Result<ValidityReport> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_max",
            value: t_max,
            reason: "must be positive and finite",
        });
    }
    if n_grid < 2 {
        return Err(Error::InvalidParameter {
            name: "n_grid",
            value: n_grid as f64,
            reason: "needs at least two points",
        });
    }
    let coeffs = TclCoefficients::new(params);
    let mut report = ValidityReport {
        valid: true,
        min_sum: f64::INFINITY,
        min_difference: f64::INFINITY,
        argmin_difference: 0.0,
        first_violation: None,
        tolerance,
        n_grid,
    };
    for i in 0..n_grid {
        let t = t_max * i as f64 / (n_grid - 1) as f64;
        let c = coeffs.at(t);
        let (sum, diff) = (c.rate_down(), c.rate_up());
        report.min_sum = report.min_sum.min(sum);
        if diff < report.min_difference {
            report.min_difference = diff;
            report.argmin_difference = t;
        }
        if (sum < -tolerance || diff < -tolerance) && report.first_violation.is_none() {
            report.first_violation = Some(t);
            report.valid = false;
        }
    }
    Ok(report)
}

/// Heating constant and excitation number of the memoryless limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovRates {
    /// `Γ = γ∞`, s⁻¹.
    pub gamma: f64,
    /// `N` matched from the asymptotic coefficients: `ΓN = (Δ̄∞ − γ∞)/2`.
    pub n_matched: f64,
    /// Exact `n(ω₀)`.
    pub n_thermal: f64,
    /// `|N − n(ω₀)| / n(ω₀)`.
    pub occupation_gap: f64,
    /// `|N − 1/(ħβω₀)| · ħβω₀`, the gap against the high-temperature estimate
    /// `n(ω₀) ≈ 1/(ħβω₀)`.
    pub high_temperature_gap: f64,
}

impl MarkovRates {
    /// Population relaxation rate of the memoryless equation, `2Γ`.
    pub fn relaxation_rate(&self) -> f64 {
        2.0 * self.gamma
    }
}

/// Matches the asymptotic coefficients to the memoryless equation:
/// `Γ(N+1) = (Δ̄∞ + γ∞)/2` and `ΓN = (Δ̄∞ − γ∞)/2`.
pub fn markovian_limit(params: &PhysicalParams) -> Result<MarkovRates> {
    let (delta_inf, gamma_inf) = TclCoefficients::new(params).asymptotic();
    if !(gamma_inf > 0.0) {
        return Err(Error::Degenerate { gamma_inf });
    }
    let n_matched = 0.5 * (delta_inf / gamma_inf - 1.0);
    let n_thermal = params.trap_occupation();
    let high_t = 1.0 / params.hbar_beta_omega0();
    Ok(MarkovRates {
        gamma: gamma_inf,
        n_matched,
        n_thermal,
        occupation_gap: (n_matched - n_thermal).abs() / n_thermal,
        high_temperature_gap: (n_matched - high_t).abs() / high_t,
    })
}
