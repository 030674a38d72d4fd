//! Dormand–Prince 5(4) explicit Runge–Kutta with adaptive step control.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// First trial step; chosen automatically when `None`.
    pub initial_step: Option<f64>,
    pub max_step: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-300,
            max_steps: 100_000,
            initial_step: None,
            max_step: f64::INFINITY,
        }
    }
}

/// Counters from a finished integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl Dopri5 {
    pub fn with_rtol(rtol: f64) -> Self {
        Self {
            rtol,
            ..Self::default()
        }
    }

    fn error_norm<const N: usize>(&self, y: &[f64; N], y_new: &[f64; N], err: &[f64; N]) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            let e = err[i] / scale;
            acc += e * e;
        }
        (acc / N as f64).sqrt()
    }

    fn initial_step<const N: usize, F>(&self, f: &mut F, t0: f64, y0: &[f64; N], k1: &[f64; N], span: f64) -> f64
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        if let Some(h) = self.initial_step {
            return h.min(span);
        }
        // Floor keeps the squared ratios finite when atol is vanishingly small.
        let scale = |i: usize| (self.atol + self.rtol * y0[i].abs()).max(1e-150);
        let (mut d0, mut d1) = (0.0, 0.0);
        for i in 0..N {
            d0 += (y0[i] / scale(i)).powi(2);
            d1 += (k1[i] / scale(i)).powi(2);
        }
        let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let y1 = axpy(y0, h0, &[(1.0, k1)]);
        let k2 = f(t0 + h0, &y1);
        let mut d2 = 0.0;
        for i in 0..N {
            d2 += ((k2[i] - k1[i]) / scale(i)).powi(2);
        }
        let d2 = (d2 / N as f64).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6 * span)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }

    /// Integrates `dy/dt = f(t, y)` from `(t0, y0)` and reports the state at
    /// every time in `grid` (ascending, all `≥ t0`). Steps are clipped to land
    /// exactly on grid points.
    pub fn integrate_grid<const N: usize, F, V>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; N],
        grid: &[f64],
        mut visit: V,
    ) -> Result<StepStats>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
        V: FnMut(usize, f64, &[f64; N]),
    {
        let mut stats = StepStats::default();
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let span = grid.last().map_or(0.0, |&end| end - t0);
        let mut h = if span > 0.0 {
            self.initial_step(&mut f, t0, &y0, &k1, span)
        } else {
            0.0
        };
        for (idx, &target) in grid.iter().enumerate() {
            if target < t {
                return Err(Error::StepFailure {
                    t: target,
                    reason: "output grid is not ascending",
                });
            }
            while t < target {
                if stats.accepted + stats.rejected >= self.max_steps {
                    return Err(Error::StepFailure {
                        t,
                        reason: "step budget exhausted",
                    });
                }
                let mut last = false;
                let mut step = h.min(self.max_step);
                if t + step >= target || (target - t - step) < 1e-12 * target.abs() {
                    step = target - t;
                    last = true;
                }
                let k2 = f(t + C2 * step, &axpy(&y, step, &[(A21, &k1)]));
                let k3 = f(t + C3 * step, &axpy(&y, step, &[(A31, &k1), (A32, &k2)]));
                let k4 = f(
                    t + C4 * step,
                    &axpy(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
                );
                let k5 = f(
                    t + C5 * step,
                    &axpy(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                );
                let k6 = f(
                    t + step,
                    &axpy(
                        &y,
                        step,
                        &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                    ),
                );
                let y_new = axpy(
                    &y,
                    step,
                    &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
                );
                let t_new = if last { target } else { t + step };
                let k7 = f(t_new, &y_new);
                let mut err = [0.0; N];
                for i in 0..N {
                    err[i] = step
                        * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                }
                let norm = self.error_norm(&y, &y_new, &err);
                if !norm.is_finite() {
                    return Err(Error::StepFailure {
                        t,
                        reason: "non-finite error estimate",
                    });
                }
                let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
                if norm <= 1.0 {
                    stats.accepted += 1;
                    t = t_new;
                    y = y_new;
                    k1 = k7;
                    // Keep the untruncated step size when the step was clipped to the grid.
                    if !last || factor < 1.0 {
                        h = step * factor;
                    }
                } else {
                    stats.rejected += 1;
                    h = step * factor.min(1.0);
                    if h <= f64::EPSILON * t.abs() {
                        return Err(Error::StepFailure {
                            t,
                            reason: "step size underflow",
                        });
                    }
                }
            }
            visit(idx, t, &y);
        }
        Ok(stats)
    }

    /// Integrates from `t0` to `t1` and returns the final state.
    pub fn integrate<const N: usize, F>(&self, f: F, t0: f64, y0: [f64; N], t1: f64) -> Result<[f64; N]>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let mut out = y0;
        self.integrate_grid(f, t0, y0, &[t1], |_, _, y| out = *y)?;
        Ok(out)
    }
}
