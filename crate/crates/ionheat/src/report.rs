//! Per-time comparison of the engines and its summary statistics.

use std::fmt::Write as _;

/// Only grid times up to this many `1/ω_c` enter the short-time fits.
pub const SHORT_TIME_WINDOW: f64 = 0.2;
/// An ensemble mean agrees when it lies within this many standard errors.
pub const SIGMA_BAND: f64 = 3.0;
/// Fraction of grid points that must agree for the run to pass.
pub const REQUIRED_FRACTION: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub t: f64,
    pub analytic: Option<f64>,
    pub mcwf_mean: Option<f64>,
    pub mcwf_sem: Option<f64>,
    pub markovian: Option<f64>,
}

/// `y ≈ prefactor · t^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub points: usize,
}

impl PowerFit {
    /// Least squares of `ln y` against `ln t` over points with `t, y > 0`.
    pub fn fit(t: &[f64], y: &[f64]) -> Option<Self> {
        let pts: Vec<(f64, f64)> = t
            .iter()
            .zip(y)
            .filter(|(t, y)| **t > 0.0 && **y > 0.0)
            .map(|(t, y)| (t.ln(), y.ln()))
            .collect();
        if pts.len() < 3 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let exponent = sxy / sxx;
        Some(Self {
            exponent,
            prefactor: (my - exponent * mx).exp(),
            points: pts.len(),
        })
    }

    /// Prefactor with the exponent held fixed: geometric mean of `y/t^p`.
    pub fn prefactor_at(t: &[f64], y: &[f64], exponent: f64) -> Option<f64> {
        let logs: Vec<f64> = t
            .iter()
            .zip(y)
            .filter(|(t, y)| **t > 0.0 && **y > 0.0)
            .map(|(t, y)| y.ln() - exponent * t.ln())
            .collect();
        (!logs.is_empty()).then(|| (logs.iter().sum::<f64>() / logs.len() as f64).exp())
    }
}

/// Scalars the report compares against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub omega_c: f64,
    /// `αω_c/(2ħβω₀)`, the `t²` coefficient of the exact curve for `k = 0`.
    pub taylor_prefactor: f64,
    /// `1/(ħβω₀) − ½`, the long-time limit of the exact curve.
    pub analytic_asymptote: f64,
    /// `n(ω₀)`, the long-time limit of the memoryless law.
    pub markov_asymptote: f64,
    pub n_traj: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    /// Largest `|analytic − mcwf|/sem` over the grid.
    pub max_sigma_deviation: Option<f64>,
    pub fraction_within: Option<f64>,
    pub points_compared: usize,
    pub analytic_fit: Option<PowerFit>,
    /// Prefactor of the exact curve with the exponent pinned at 2.
    pub analytic_t2_prefactor: Option<f64>,
    pub markovian_fit: Option<PowerFit>,
    pub analytic_final: Option<f64>,
    pub mcwf_final: Option<f64>,
    pub markovian_final: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub reference: Reference,
    pub summary: Summary,
}

/// `|a − m|/sem`, with a Poisson floor when every trajectory agreed
/// (`sem = 0`): a mean built from `N` samples of rare unit events has
/// standard error about `√(a/N)`.
pub fn sigma_deviation(analytic: f64, mean: f64, sem: f64, n_traj: usize) -> f64 {
    let diff = (analytic - mean).abs();
    if diff == 0.0 {
        return 0.0;
    }
    let sem = if sem > 0.0 { sem } else { (analytic.abs() / n_traj.max(1) as f64).sqrt() };
    diff / sem
}

impl ComparisonReport {
    pub fn new(rows: Vec<ComparisonRow>, reference: Reference) -> Self {
        let summary = Self::summarize(&rows, &reference);
        Self {
            rows,
            reference,
            summary,
        }
    }

    /// Recomputes the summary from the rows alone.
    pub fn summarize(rows: &[ComparisonRow], reference: &Reference) -> Summary {
        let n_traj = reference.n_traj.unwrap_or(0);
        let deviations: Vec<f64> = rows
            .iter()
            .filter_map(|r| match (r.analytic, r.mcwf_mean, r.mcwf_sem) {
                (Some(a), Some(m), Some(s)) => Some(sigma_deviation(a, m, if s.is_nan() { 0.0 } else { s }, n_traj)),
                _ => None,
            })
            .collect();
        let max_sigma_deviation = deviations.iter().copied().reduce(f64::max);
        let fraction_within = (!deviations.is_empty())
            .then(|| deviations.iter().filter(|d| **d <= SIGMA_BAND).count() as f64 / deviations.len() as f64);

        let window = SHORT_TIME_WINDOW / reference.omega_c;
        let short: Vec<&ComparisonRow> = rows.iter().filter(|r| r.t > 0.0 && r.t <= window).collect();
        let series = |pick: fn(&ComparisonRow) -> Option<f64>| -> Option<(Vec<f64>, Vec<f64>)> {
            let pts: Option<Vec<(f64, f64)>> = short.iter().map(|r| pick(r).map(|y| (r.t, y))).collect();
            pts.map(|p| p.into_iter().unzip())
        };
        let analytic_short = series(|r| r.analytic);
        let markov_short = series(|r| r.markovian);
        Summary {
            max_sigma_deviation,
            fraction_within,
            points_compared: deviations.len(),
            analytic_fit: analytic_short.as_ref().and_then(|(t, y)| PowerFit::fit(t, y)),
            analytic_t2_prefactor: analytic_short.as_ref().and_then(|(t, y)| PowerFit::prefactor_at(t, y, 2.0)),
            markovian_fit: markov_short.as_ref().and_then(|(t, y)| PowerFit::fit(t, y)),
            analytic_final: rows.last().and_then(|r| r.analytic),
            mcwf_final: rows.last().and_then(|r| r.mcwf_mean),
            markovian_final: rows.last().and_then(|r| r.markovian),
        }
    }

    /// False when the ensemble disagrees with the exact curve at more than
    /// 1% of the grid points.
    pub fn passed(&self) -> bool {
        self.summary.fraction_within.map_or(true, |f| f >= REQUIRED_FRACTION)
    }

    /// Summary lines of the text report.
    pub fn summary_text(&self) -> String {
        let s = &self.summary;
        let r = &self.reference;
        let mut out = String::new();
        let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.6e}"));
        if let (Some(max), Some(frac)) = (s.max_sigma_deviation, s.fraction_within) {
            let _ = writeln!(out, "max |analytic - mcwf| / sem : {max:.4}");
            let _ = writeln!(
                out,
                "points within {SIGMA_BAND} sem       : {:.2}% of {} (required {:.0}%)",
                100.0 * frac,
                s.points_compared,
                100.0 * REQUIRED_FRACTION
            );
        }
        if let Some(fit) = s.analytic_fit {
            let _ = writeln!(
                out,
                "analytic short-time exponent: {:.4} over {} points with t <= {SHORT_TIME_WINDOW}/omega_c",
                fit.exponent, fit.points
            );
        }
        if let Some(c) = s.analytic_t2_prefactor {
            let _ = writeln!(
                out,
                "analytic t^2 prefactor      : {c:.6e} (Taylor {:.6e}, ratio {:.5})",
                r.taylor_prefactor,
                c / r.taylor_prefactor
            );
        }
        if let Some(fit) = s.markovian_fit {
            let _ = writeln!(out, "markovian short-time exponent: {:.4}", fit.exponent);
        }
        let _ = writeln!(out, "analytic asymptote 1/x - 1/2: {:.6e}", r.analytic_asymptote);
        let _ = writeln!(out, "markovian asymptote n(w0)   : {:.6e}", r.markov_asymptote);
        let _ = writeln!(out, "final analytic              : {}", opt(s.analytic_final));
        let _ = writeln!(out, "final mcwf                  : {}", opt(s.mcwf_final));
        let _ = writeln!(out, "final markovian             : {}", opt(s.markovian_final));
        let _ = writeln!(out, "status                      : {}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}
