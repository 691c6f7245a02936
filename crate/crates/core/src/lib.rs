//! Relativistic scalar-particle scattering off a one-dimensional potential
//! step, in natural units (ħ = c = 1).
//!
//! The crate has two halves that check each other:
//!
//! * closed-form plane-wave scattering ([`scattering`]): amplitude ratios at
//!   the step, reflectivity across the ordinary / evanescent / Klein-zone
//!   regimes, transmitted-branch selection, charge/current bookkeeping, and
//!   the antiparticle reading of the Klein-zone transmitted wave;
//! * a time-domain simulator ([`sim`]): Gaussian packets evolved through the
//!   step with the coupled two-component (particle/antiparticle) first-order
//!   system, cross-validated against direct second-order evolution, with
//!   charge-conservation and continuity-residual diagnostics.
//!
//! The library is `no_std`-compatible (requires `alloc`); the default `std`
//! feature just switches float math to the standard library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod fft;
pub mod fv;
pub mod grid;
pub mod model;
pub mod packet;
pub mod scattering;
pub mod sim;
pub mod stencil;
mod util;

pub use grid::{Boundary, Grid1D, GridError};
pub use model::{DomainError, ParticleParams, Regime, StepPotential};
pub use num_complex::Complex64;
pub use scattering::{ScatteringSolution, Transmitted, WaveCurrents};
