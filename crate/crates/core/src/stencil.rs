//! Central finite-difference stencils on uniform grids.
//!
//! Both derivative orders are written in symmetric form (paired neighbors
//! summed before scaling) so a mirrored field produces bitwise-mirrored
//! derivatives; the discrete x → -x symmetry checks rely on this.
//!
//! Periodic grids wrap; absorbing grids close the stencil with zero ghost
//! values, which is consistent with the damping layer driving the boundary
//! fields to zero.

use crate::grid::Boundary;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilOrder {
    Second,
    Fourth,
}

impl StencilOrder {
    /// Formal accuracy order of the stencil pair.
    pub fn accuracy(&self) -> usize {
        match self {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
        }
    }

    /// Number of neighbor points used on each side.
    pub fn halo(&self) -> usize {
        match self {
            StencilOrder::Second => 1,
            StencilOrder::Fourth => 2,
        }
    }
}

/// Largest magnitude of the discrete `-d²/dx²` symbol, the spectral bound
/// used by the time-step stability guard.
///
/// Second order peaks at `4/dx²` (mode at the grid Nyquist), fourth order
/// at `16/(3·dx²)`.
pub fn laplacian_symbol_max(order: StencilOrder, dx: f64) -> f64 {
    match order {
        StencilOrder::Second => 4.0 / (dx * dx),
        StencilOrder::Fourth => 16.0 / (3.0 * dx * dx),
    }
}

#[inline]
fn ghost(f: &[Complex64], idx: isize, n: isize, boundary: Boundary) -> Complex64 {
    match boundary {
        Boundary::Periodic => f[(idx.rem_euclid(n)) as usize],
        Boundary::Absorbing { .. } => {
            if idx < 0 || idx >= n {
                Complex64::new(0.0, 0.0)
            } else {
                f[idx as usize]
            }
        }
    }
}

/// Second spatial derivative of `f` into `out`.
pub fn second_derivative(
    f: &[Complex64],
    dx: f64,
    order: StencilOrder,
    boundary: Boundary,
    out: &mut [Complex64],
) {
    let n = f.len();
    debug_assert_eq!(out.len(), n);
    match order {
        StencilOrder::Second => {
            let w = 1.0 / (dx * dx);
            for k in 1..n - 1 {
                out[k] = ((f[k - 1] + f[k + 1]) - 2.0 * f[k]) * w;
            }
            for &k in &[0, n - 1] {
                let k = k as isize;
                let n = n as isize;
                let pair = ghost(f, k - 1, n, boundary) + ghost(f, k + 1, n, boundary);
                out[k as usize] = (pair - 2.0 * f[k as usize]) * w;
            }
        }
        StencilOrder::Fourth => {
            let w = 1.0 / (12.0 * dx * dx);
            for k in 2..n - 2 {
                let near = f[k - 1] + f[k + 1];
                let far = f[k - 2] + f[k + 2];
                out[k] = (16.0 * near - far - 30.0 * f[k]) * w;
            }
            for &k in &[0, 1, n - 2, n - 1] {
                let ki = k as isize;
                let ni = n as isize;
                let near = ghost(f, ki - 1, ni, boundary) + ghost(f, ki + 1, ni, boundary);
                let far = ghost(f, ki - 2, ni, boundary) + ghost(f, ki + 2, ni, boundary);
                out[k] = (16.0 * near - far - 30.0 * f[k]) * w;
            }
        }
    }
}

/// First spatial derivative of `f` into `out`.
pub fn first_derivative(
    f: &[Complex64],
    dx: f64,
    order: StencilOrder,
    boundary: Boundary,
    out: &mut [Complex64],
) {
    let n = f.len();
    debug_assert_eq!(out.len(), n);
    match order {
        StencilOrder::Second => {
            let w = 1.0 / (2.0 * dx);
            for k in 1..n - 1 {
                out[k] = (f[k + 1] - f[k - 1]) * w;
            }
            for &k in &[0, n - 1] {
                let ki = k as isize;
                let ni = n as isize;
                out[k] = (ghost(f, ki + 1, ni, boundary) - ghost(f, ki - 1, ni, boundary)) * w;
            }
        }
        StencilOrder::Fourth => {
            let w = 1.0 / (12.0 * dx);
            for k in 2..n - 2 {
                let near = f[k + 1] - f[k - 1];
                let far = f[k + 2] - f[k - 2];
                out[k] = (8.0 * near - far) * w;
            }
            for &k in &[0, 1, n - 2, n - 1] {
                let ki = k as isize;
                let ni = n as isize;
                let near = ghost(f, ki + 1, ni, boundary) - ghost(f, ki - 1, ni, boundary);
                let far = ghost(f, ki + 2, ni, boundary) - ghost(f, ki - 2, ni, boundary);
                out[k] = (8.0 * near - far) * w;
            }
        }
    }
}
