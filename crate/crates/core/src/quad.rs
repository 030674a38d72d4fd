//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;


use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of a quadrature: value and absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Controls for [`integrate`] and [`integrate_vec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self {
            abs,
            rel: 0.0,
            max_intervals: 20_000,
        }
    }

    pub fn relative(rel: f64) -> Self {
        Self {
            abs: 0.0,
            rel,
            max_intervals: 20_000,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// One 15-point Kronrod evaluation with the embedded 7-point Gauss error.
pub fn gauss_kronrod_15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Estimate {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

struct Segment {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.est.error.total_cmp(&other.est.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Integrates `f` over `[a, b]`, starting from `initial_pieces` equal panels and
/// bisecting the worst panel until the summed error estimate meets `tol`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    initial_pieces: usize,
    tol: Tolerance,
) -> Result<Estimate> {
    let pieces = initial_pieces.max(1);
    let width = (b - a) / pieces as f64;
    let mut heap = BinaryHeap::with_capacity(pieces * 2);
    let (mut value, mut error) = (0.0, 0.0);
    for i in 0..pieces {
        let lo = a + width * i as f64;
        let hi = if i + 1 == pieces { b } else { lo + width };
        let est = gauss_kronrod_15(&mut f, lo, hi);
        value += est.value;
        error += est.error;
        heap.push(Segment { a: lo, b: hi, est });
    }
    while error > tol.target(value) {
        if heap.len() >= tol.max_intervals {
            return Err(Error::ToleranceNotMet {
                estimate: error,
                requested: tol.target(value),
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution.
            return Err(Error::ToleranceNotMet {
                estimate: error,
                requested: tol.target(value),
            });
        }
        let left = gauss_kronrod_15(&mut f, worst.a, mid);
        let right = gauss_kronrod_15(&mut f, mid, worst.b);
        value += left.value + right.value - worst.est.value;
        error += left.error + right.error - worst.est.error;
        heap.push(Segment { a: worst.a, b: mid, est: left });
        heap.push(Segment { a: mid, b: worst.b, est: right });
    }
    // Re-sum to shed the drift of the running updates.
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.est.value, e + s.est.error));
    Ok(Estimate { value, error })
}

struct VecSegment {
    a: f64,
    b: f64,
    values: Vec<f64>,
    error: f64,
}

impl PartialEq for VecSegment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for VecSegment {}
impl PartialOrd for VecSegment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for VecSegment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_15_vec<F: FnMut(f64, &mut [f64])>(
    f: &mut F,
    a: f64,
    b: f64,
    scratch: &mut [f64],
) -> (Vec<f64>, f64) {
    let n = scratch.len();
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = vec![0.0; n];
    let mut gauss = vec![0.0; n];
    let mut eval = |x: f64, wk: f64, wg: f64, scratch: &mut [f64]| {
        f(x, scratch);
        for i in 0..n {
            kronrod[i] += wk * scratch[i];
            gauss[i] += wg * scratch[i];
        }
    };
    eval(center, WGK[7], WG[3], scratch);
    for j in 0..7 {
        let dx = half * XGK[j];
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        eval(center - dx, WGK[j], wg, scratch);
        eval(center + dx, WGK[j], wg, scratch);
    }
    let mut error: f64 = 0.0;
    for i in 0..n {
        error = error.max(((kronrod[i] - gauss[i]) * half).abs());
        kronrod[i] *= half;
    }
    (kronrod, error)
}

/// Vector-valued variant of [`integrate`]: `f(x, out)` fills all components
/// at once. Convergence is judged on the largest component error, summed
/// over panels, against `tol.abs`.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    components: usize,
    a: f64,
    b: f64,
    initial_pieces: usize,
    tol: Tolerance,
) -> Result<(Vec<f64>, f64)> {
    let pieces = initial_pieces.max(1);
    let width = (b - a) / pieces as f64;
    let mut scratch = vec![0.0; components];
    let mut heap = BinaryHeap::with_capacity(pieces * 2);
    let mut error = 0.0;
    for i in 0..pieces {
        let lo = a + width * i as f64;
        let hi = if i + 1 == pieces { b } else { lo + width };
        let (values, err) = gauss_kronrod_15_vec(&mut f, lo, hi, &mut scratch);
        error += err;
        heap.push(VecSegment {
            a: lo,
            b: hi,
            values,
            error: err,
        });
    }
    while error > tol.abs {
        if heap.len() >= tol.max_intervals {
            return Err(Error::ToleranceNotMet {
                estimate: error,
                requested: tol.abs,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::ToleranceNotMet {
                estimate: error,
                requested: tol.abs,
            });
        }
        let (lv, le) = gauss_kronrod_15_vec(&mut f, worst.a, mid, &mut scratch);
        let (rv, re) = gauss_kronrod_15_vec(&mut f, mid, worst.b, &mut scratch);
        error += le + re - worst.error;
        heap.push(VecSegment {
            a: worst.a,
            b: mid,
            values: lv,
            error: le,
        });
        heap.push(VecSegment {
            a: mid,
            b: worst.b,
            values: rv,
            error: re,
        });
    }
    let mut total = vec![0.0; components];
    let mut error = 0.0;
    for seg in heap.iter() {
        error += seg.error;
        for (t, v) in total.iter_mut().zip(&seg.values) {
            *t += v;
        }
    }
    Ok((total, error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn kronrod_is_exact_for_polynomials() {
        // 15-point Kronrod integrates degree 22 exactly.
        let est = gauss_kronrod_15(&mut |x: f64| x.powi(10) - 3.0 * x.powi(3), 0.0, 2.0);
        let exact = 2f64.powi(11) / 11.0 - 3.0 * 16.0 / 4.0;
        assert!((est.value - exact).abs() < 1e-12 * exact.abs());
    }

    #[test]
    fn adaptive_handles_peaks() {
        // Lorentzian of width 1e-3 centred inside the interval.
        let w = 1e-3;
        let est = integrate(
            |x: f64| w / (PI * ((x - 0.3).powi(2) + w * w)),
            0.0,
            1.0,
            1,
            Tolerance::relative(1e-12),
        )
        .unwrap();
        let exact = ((0.7f64 / w).atan() + (0.3f64 / w).atan()) / PI;
        assert!((est.value - exact).abs() < 1e-11, "{} vs {}", est.value, exact);
    }

    #[test]
    fn budget_exhaustion_reports_tolerance() {
        let err = integrate(
            |x: f64| (1.0 / x).sin(),
            1e-9,
            1.0,
            1,
            Tolerance {
                abs: 1e-15,
                rel: 0.0,
                max_intervals: 10,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::ToleranceNotMet { .. }));
    }

    #[test]
    fn vector_components_match_scalar_runs() {
        let (vals, _) = integrate_vec(
            |x, out: &mut [f64]| {
                out[0] = x.exp();
                out[1] = (3.0 * x).cos();
            },
            2,
            0.0,
            2.0,
            2,
            Tolerance::absolute(1e-13),
        )
        .unwrap();
        assert!((vals[0] - (2f64.exp() - 1.0)).abs() < 1e-12);
        assert!((vals[1] - 6f64.sin() / 3.0).abs() < 1e-12);
    }
}
