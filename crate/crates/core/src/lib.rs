//! Heating of a single trapped ion coupled to a quantized Ohmic reservoir.
//!
//! The crate is `no_std` (with `alloc`) and pure: every routine is a function
//! of its inputs. It provides
//!
//! * [`reservoir`]: Lorentzian spectral density, thermal occupation, reservoir
//!   kernels and the time-dependent master-equation coefficients `Δ̄(t)`, `γ(t)`;
//! * [`analytic`]: the exact characteristic-function solution, the heating
//!   function `⟨n̂(t)⟩` and Fock populations;
//! * [`mcwf`]: a quantum-jump (Monte Carlo wave function) engine for the same
//!   time-dependent Lindblad equation on a truncated Fock space.
//!
//! [`quad`] and [`ode`] hold the numerical building blocks (adaptive
//! Gauss–Kronrod quadrature, Dormand–Prince 5(4) integration).
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
mod error;
pub mod mcwf;
pub mod ode;
mod params;
pub mod quad;
pub mod reservoir;

pub use error::{Error, Result};
pub use params::{PhysicalParams, HBAR, HIGH_TEMPERATURE_MARGIN, K_B};
