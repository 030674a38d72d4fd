//! Brute-force reference solvers shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;

/// Diagonal of `ρ(t)` at each grid time from dense RK4 propagation of the
/// two-channel master equation truncated to `dim` levels. `rates(t)` returns
/// `(Γ₁, Γ₂)` of the lowering and raising channels.
pub fn dense_populations(
    dim: usize,
    k: usize,
    rates: impl Fn(f64) -> (f64, f64),
    grid: &[f64],
    steps_per_interval: usize,
) -> Vec<Vec<f64>> {
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    let ad = a.transpose();
    let number = &ad * &a;
    let anti = &a * &ad;
    let rhs = |t: f64, rho: &DMatrix<f64>| {
        let (g1, g2) = rates(t);
        let down = &a * rho * &ad - (&number * rho + rho * &number) * 0.5;
        let up = &ad * rho * &a - (&anti * rho + rho * &anti) * 0.5;
        down * g1 + up * g2
    };
    let mut rho = DMatrix::<f64>::zeros(dim, dim);
    rho[(k, k)] = 1.0;
    let diag = |rho: &DMatrix<f64>| rho.diagonal().iter().copied().collect::<Vec<_>>();
    let mut out = Vec::with_capacity(grid.len());
    let mut t = 0.0;
    for &target in grid {
        let span = target - t;
        if span > 0.0 {
            let h = span / steps_per_interval as f64;
            for s in 0..steps_per_interval {
                let ts = t + s as f64 * h;
                let k1 = rhs(ts, &rho);
                let k2 = rhs(ts + 0.5 * h, &(&rho + &k1 * (0.5 * h)));
                let k3 = rhs(ts + 0.5 * h, &(&rho + &k2 * (0.5 * h)));
                let k4 = rhs(ts + h, &(&rho + &k3 * h));
                rho += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            }
        }
        t = target;
        out.push(diag(&rho));
    }
    out
}

/// Composite Simpson rule with `panels` (even) sub-intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

pub fn mean_level(p: &[f64]) -> f64 {
    p.iter().enumerate().map(|(m, p)| m as f64 * p).sum()
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..n).map(|i| (at(p, i) - at(q, i)).abs()).sum::<f64>()
}
