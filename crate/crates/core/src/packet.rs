//! Gaussian wave-packet construction.
//!
//! The packet is built in position space and its time derivative in Fourier
//! space, applying `−i·E(k)` with `E(k) = sqrt(m² + k²)` to every momentum
//! mode, so at `t = 0` the state is an exact superposition of free
//! positive-energy waves.

use crate::fft::{dft_forward, dft_inverse, fourier_modes};
use crate::fv::{charge_density, fv_split, FVState, KGState};
use crate::grid::{integrate, Grid1D};
use crate::model::StepPotential;
use crate::sim::SimError;
use alloc::vec::Vec;
use num_complex::Complex64;
// Float methods come from num_traits under no_std (libm); std shadows them.
#[allow(unused_imports)]
use num_traits::Float;

/// Fraction of the packet's charge allowed past the step at `t = 0`.
pub const STEP_OVERLAP_LIMIT: f64 = 1e-8;

/// Minimum `p0·σ` so the momentum-space support is effectively positive and
/// the packet is a right-moving quasi-monochromatic wave.
pub const MIN_MOMENTUM_SIGMA: f64 = 4.0;

/// Gaussian packet `amplitude · exp(−(x−center)²/4σ²) · exp(i·momentum·x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacketSpec {
    pub center: f64,
    pub sigma: f64,
    pub momentum: f64,
    pub amplitude: Complex64,
}

impl WavePacketSpec {
    /// Validated spec: `σ > 0` and `momentum ≥ 4/σ`.
    pub fn validated(center: f64, sigma: f64, momentum: f64) -> Result<Self, SimError> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(SimError::SigmaNotPositive { sigma });
        }
        let min = MIN_MOMENTUM_SIGMA / sigma;
        if !(momentum >= min) {
            return Err(SimError::MomentumSupportNotPositive { momentum, min });
        }
        Ok(WavePacketSpec {
            center,
            sigma,
            momentum,
            amplitude: Complex64::new(1.0, 0.0),
        })
    }

    pub fn with_amplitude(mut self, amplitude: Complex64) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// Momentum-space standard deviation, `1/(2σ)`.
    pub fn momentum_spread(&self) -> f64 {
        1.0 / (2.0 * self.sigma)
    }

    fn envelope(&self, x: f64) -> f64 {
        let d = x - self.center;
        (-d * d / (4.0 * self.sigma * self.sigma)).exp()
    }
}

/// Sample the packet on `grid` as a second-order state `(ψ, ψ̇)` under the
/// given potential.
pub fn init_gaussian_packet_kg(
    spec: &WavePacketSpec,
    grid: &Grid1D,
    step: &StepPotential,
    mass: f64,
) -> Result<KGState, SimError> {
    let n = grid.len();
    let psi: Vec<Complex64> = grid
        .positions()
        .map(|x| spec.amplitude * spec.envelope(x) * (Complex64::i() * (spec.momentum * x)).exp())
        .collect();

    // ψ̇ = IDFT[ −i·E(k) · DFT[ψ] ]
    let mut modes = dft_forward(&psi);
    for (z, k) in modes.iter_mut().zip(fourier_modes(n, grid.dx())) {
        let energy = (mass * mass + k * k).sqrt();
        *z *= Complex64::new(0.0, -energy);
    }
    let psi_dot = dft_inverse(&modes);

    let potential = step.sample(grid);
    KGState::new(*grid, psi, psi_dot, potential, mass, 0.0).map_err(SimError::Grid)
}

/// Sample the packet and split it into the two-component state, rejecting
/// configurations whose initial charge overlaps the step region by more
/// than [`STEP_OVERLAP_LIMIT`].
pub fn init_gaussian_packet(
    spec: &WavePacketSpec,
    grid: &Grid1D,
    step: &StepPotential,
    mass: f64,
) -> Result<FVState, SimError> {
    let kg = init_gaussian_packet_kg(spec, grid, step, mass)?;
    let fv = fv_split(&kg);
    if step.v0 != 0.0 {
        let rho = charge_density(&fv);
        let total = integrate(grid, &rho);
        let beyond: f64 = (0..grid.len())
            .filter(|&k| grid.x(k) >= step.x_step)
            .map(|k| rho[k])
            .sum::<f64>()
            * grid.dx();
        let fraction = (beyond / total).abs();
        if fraction > STEP_OVERLAP_LIMIT {
            return Err(SimError::StepOverlap {
                fraction,
                limit: STEP_OVERLAP_LIMIT,
            });
        }
    }
    Ok(fv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fv::{content_classify, total_charge};
    use crate::grid::Grid1D;
    use core::f64::consts::TAU;

    #[test]
    fn spec_validation() {
        assert!(WavePacketSpec::validated(-10.0, 5.0, 1.0).is_ok());
        assert!(WavePacketSpec::validated(-10.0, 0.0, 1.0).is_err());
        assert!(WavePacketSpec::validated(-10.0, -2.0, 1.0).is_err());
        // p0·σ = 2 < 4: momentum support reaches negative k.
        assert!(WavePacketSpec::validated(-10.0, 4.0, 0.5).is_err());
    }

    #[test]
    fn initial_charge_is_positive() {
        // Center at least 5.7σ left of the step (and of the wrap point)
        // keeps the overlap under the 1e-8 limit.
        let grid = Grid1D::periodic_centered(0.1, 1024).unwrap();
        let spec = WavePacketSpec::validated(-25.0, 4.0, 1.0).unwrap();
        let fv =
            init_gaussian_packet(&spec, &grid, &StepPotential::sharp(3.0), 1.0).unwrap();
        assert!(total_charge(&fv) > 0.0);
    }

    #[test]
    fn overlapping_packet_is_rejected() {
        let grid = Grid1D::periodic_centered(0.1, 1024).unwrap();
        let spec = WavePacketSpec::validated(-5.0, 6.0, 0.75).unwrap();
        let err =
            init_gaussian_packet(&spec, &grid, &StepPotential::sharp(3.0), 1.0).unwrap_err();
        match err {
            SimError::StepOverlap { fraction, limit } => {
                assert!(fraction > limit);
            }
            other => panic!("expected StepOverlap, got {other:?}"),
        }
        // No step, no overlap constraint.
        assert!(init_gaussian_packet(&spec, &grid, &StepPotential::sharp(0.0), 1.0).is_ok());
    }

    #[test]
    fn wide_packet_approaches_plane_wave_split() {
        // σ → ∞ at fixed x: χ/φ → (1 − E/m)/(1 + E/m). Use a commensurate
        // central momentum so the huge-σ packet is spectrally clean.
        let n = 128;
        let dx = 0.25;
        let grid = Grid1D::periodic_centered(dx, n).unwrap();
        let length = n as f64 * dx;
        let p0 = TAU * (0.75 * length / TAU).round() / length;
        let spec = WavePacketSpec {
            center: 0.0,
            sigma: 1e5,
            momentum: p0,
            amplitude: Complex64::new(1.0, 0.0),
        };
        let fv =
            init_gaussian_packet(&spec, &grid, &StepPotential::sharp(0.0), 1.0).unwrap();
        let e = (1.0 + p0 * p0).sqrt();
        let want = (1.0 - e) / (1.0 + e);
        for k in 0..n {
            let ratio = fv.chi()[k] / fv.phi()[k];
            assert!(
                (ratio.re - want).abs() < 1e-6 && ratio.im.abs() < 1e-6,
                "k={k}: {ratio} vs {want}"
            );
        }
    }

    #[test]
    fn at_rest_packet_is_nearly_pure_particle() {
        // p0 = 0 bypasses the right-mover validation; the χ admixture is
        // O(1/(mσ)²).
        let grid = Grid1D::periodic_centered(0.2, 512).unwrap();
        let spec = WavePacketSpec {
            center: 0.0,
            sigma: 10.0,
            momentum: 0.0,
            amplitude: Complex64::new(1.0, 0.0),
        };
        let fv =
            init_gaussian_packet(&spec, &grid, &StepPotential::sharp(0.0), 1.0).unwrap();
        let report = content_classify(&fv);
        assert!(report.antiparticle_fraction() < 1e-4);
        // Local ratio at the center is ~1/(8 m² σ²).
        let mid = grid.nearest_index(0.0);
        let ratio = (fv.chi()[mid] / fv.phi()[mid]).norm();
        assert!(ratio < 2.0 / (8.0 * spec.sigma * spec.sigma));
    }
}
