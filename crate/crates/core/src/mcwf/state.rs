//! Pure states on a truncated Fock space.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Amplitudes over the levels `0..dim`.
///
/// Only the index range `[lo, hi)` is allowed to be non-zero, so Fock-like
/// states cost O(support) per operation regardless of `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockStateVector {
    amplitudes: Vec<Complex64>,
    lo: usize,
    hi: usize,
}

impl FockStateVector {
    /// `|n⟩` in a space of dimension `dim`.
    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if n >= dim {
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                reason: "Fock level outside the truncated space",
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[n] = Complex64::new(1.0, 0.0);
        Ok(Self {
            amplitudes,
            lo: n,
            hi: n + 1,
        })
    }

    /// A state with the given amplitudes, normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let lo = amplitudes.iter().position(|c| c.norm_sqr() > 0.0);
        let Some(lo) = lo else {
            return Err(Error::InvalidParameter {
                name: "amplitudes",
                value: 0.0,
                reason: "state has zero norm",
            });
        };
        let hi = amplitudes.iter().rposition(|c| c.norm_sqr() > 0.0).unwrap_or(lo) + 1;
        let mut state = Self { amplitudes, lo, hi };
        state.normalize();
        Ok(state)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Levels that may carry amplitude.
    pub fn support(&self) -> core::ops::Range<usize> {
        self.lo..self.hi
    }

    /// The occupied level if the state is a single Fock state.
    pub fn as_fock(&self) -> Option<usize> {
        (self.hi - self.lo == 1).then_some(self.lo)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes[self.lo..self.hi].iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let scale = 1.0 / self.norm_sqr().sqrt();
        self.amplitudes[self.lo..self.hi].iter_mut().for_each(|c| *c *= scale);
    }

    /// `(⟨â†â⟩, ‖ψ‖²)` of the possibly sub-normalized state.
    fn number_moments(&self) -> (f64, f64) {
        let mut n = 0.0;
        let mut norm = 0.0;
        for (level, c) in self.amplitudes[self.lo..self.hi].iter().enumerate() {
            let p = c.norm_sqr();
            n += (self.lo + level) as f64 * p;
            norm += p;
        }
        (n, norm)
    }

    /// `⟨n̂⟩` of the normalized state.
    pub fn mean_n(&self) -> f64 {
        let (n, norm) = self.number_moments();
        n / norm
    }

    /// Normalized populations of the levels in [`support`](Self::support).
    pub fn populations(&self) -> Vec<f64> {
        let norm = self.norm_sqr();
        self.amplitudes[self.lo..self.hi].iter().map(|c| c.norm_sqr() / norm).collect()
    }

    /// Normalized population held by the top `levels` levels.
    pub fn top_population(&self, levels: usize) -> f64 {
        let start = self.dim().saturating_sub(levels).max(self.lo);
        if start >= self.hi {
            return 0.0;
        }
        let top: f64 = self.amplitudes[start..self.hi].iter().map(|c| c.norm_sqr()).sum();
        top / self.norm_sqr()
    }

    /// Multiplies each amplitude `c_n` by `factor(n)`.
    pub(crate) fn scale_levels(&mut self, mut factor: impl FnMut(usize) -> f64) {
        let lo = self.lo;
        for (level, c) in self.amplitudes[lo..self.hi].iter_mut().enumerate() {
            *c *= factor(lo + level);
        }
    }

    /// `â`, unnormalized: `c′_n = √(n+1) c_{n+1}`.
    pub(crate) fn lower(&mut self) {
        let (lo, hi) = (self.lo, self.hi);
        let new_lo = lo.max(1) - 1;
        for n in new_lo..hi - 1 {
            self.amplitudes[n] = self.amplitudes[n + 1] * ((n + 1) as f64).sqrt();
        }
        self.amplitudes[hi - 1] = Complex64::new(0.0, 0.0);
        self.lo = new_lo;
        self.hi = (hi - 1).max(new_lo + 1);
    }

    /// `â†`, unnormalized: `c′_n = √n c_{n−1}`; amplitude pushed past the top
    /// level is lost.
    pub(crate) fn raise(&mut self) {
        let dim = self.dim();
        let (lo, hi) = (self.lo, self.hi);
        let new_hi = (hi + 1).min(dim);
        for n in (lo + 1..new_hi).rev() {
            self.amplitudes[n] = self.amplitudes[n - 1] * (n as f64).sqrt();
        }
        self.amplitudes[lo] = Complex64::new(0.0, 0.0);
        self.lo = (lo + 1).min(new_hi - 1);
        self.hi = new_hi;
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidParameter {
            name: "dim",
            value: dim as f64,
            reason: "truncation needs at least two levels",
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn fock_state_basics() {
        let s = FockStateVector::fock(3, 8).unwrap();
        assert_eq!(s.as_fock(), Some(3));
        assert_eq!(s.mean_n(), 3.0);
        assert_eq!(s.norm_sqr(), 1.0);
        assert!(FockStateVector::fock(8, 8).is_err());
        assert!(FockStateVector::fock(0, 1).is_err());
    }

    #[test]
    fn ladder_on_fock_states() {
        let mut s = FockStateVector::fock(3, 8).unwrap();
        s.lower();
        assert_eq!(s.as_fock(), Some(2));
        assert!((s.norm_sqr() - 3.0).abs() < 1e-14);
        s.normalize();
        s.raise();
        assert_eq!(s.as_fock(), Some(3));
        assert!((s.norm_sqr() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn lowering_kills_vacuum_component() {
        let mut s = FockStateVector::from_amplitudes(vec![c(0.8), c(0.6), c(0.0)]).unwrap();
        s.lower();
        s.normalize();
        assert_eq!(s.as_fock(), Some(0));
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn raising_superposition() {
        let mut s = FockStateVector::from_amplitudes(vec![c(0.6), c(0.8), c(0.0), c(0.0)]).unwrap();
        s.raise();
        assert_eq!(s.support(), 1..3);
        let a = s.amplitudes();
        assert!((a[1].re - 0.6).abs() < 1e-15);
        assert!((a[2].re - 0.8 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn top_population_and_moments() {
        let s = FockStateVector::from_amplitudes(vec![c(1.0), c(0.0), c(1.0), c(1.0)]).unwrap();
        assert!((s.top_population(2) - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.mean_n() - 5.0 / 3.0).abs() < 1e-15);
        let p = s.populations();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
