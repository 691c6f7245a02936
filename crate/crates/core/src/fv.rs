//! Two-component representation of the second-order scalar wave equation.
//!
//! The field `ψ` with time derivative `ψ̇` is traded for the pair
//!
//! ```text
//! φ = ½[(1 − V/m)ψ + (i/m)ψ̇]        χ = ½[(1 + V/m)ψ − (i/m)ψ̇]
//! ```
//!
//! which evolves under two coupled first-order equations,
//!
//! ```text
//! i φ̇ = V φ + m φ − (1/2m) ∂²(φ + χ)
//! i χ̇ = V χ − m χ + (1/2m) ∂²(χ + φ)
//! ```
//!
//! with `ψ = φ + χ` recovering the original field. The conserved density
//! `ρ = |φ|² − |χ|²` is not positive definite: φ-dominant states describe
//! particles, χ-dominant states antiparticles, and the Klein-zone
//! transmitted wave comes out χ-dominant with negative total charge.
//!
//! The coupled system is symmetric under `x → −x, t → −t` combined with
//! `φ ↔ χ` and `V → −V`; [`pt_transform`] implements the discrete version
//! of that substitution and the tests verify it maps solutions to solutions.

use crate::grid::{integrate, Boundary, Grid1D, GridError};
use crate::stencil::{first_derivative, second_derivative, StencilOrder};
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Sampled two-component state `(φ, χ)` with its static potential.
#[derive(Debug, Clone, PartialEq)]
pub struct FVState {
    pub(crate) grid: Grid1D,
    pub(crate) phi: Vec<Complex64>,
    pub(crate) chi: Vec<Complex64>,
    pub(crate) potential: Vec<f64>,
    pub(crate) mass: f64,
    pub(crate) time: f64,
}

/// Sampled second-order state `(ψ, ψ̇)` with its static potential.
#[derive(Debug, Clone, PartialEq)]
pub struct KGState {
    pub(crate) grid: Grid1D,
    pub(crate) psi: Vec<Complex64>,
    pub(crate) psi_dot: Vec<Complex64>,
    pub(crate) potential: Vec<f64>,
    pub(crate) mass: f64,
    pub(crate) time: f64,
}

fn check_fields(grid: &Grid1D, lens: &[usize], mass: f64) -> Result<(), GridError> {
    for &len in lens {
        if len != grid.len() {
            return Err(GridError::FieldLengthMismatch {
                expected: grid.len(),
                got: len,
            });
        }
    }
    if !(mass > 0.0) {
        return Err(GridError::MassNotPositive);
    }
    Ok(())
}

impl FVState {
    pub fn new(
        grid: Grid1D,
        phi: Vec<Complex64>,
        chi: Vec<Complex64>,
        potential: Vec<f64>,
        mass: f64,
        time: f64,
    ) -> Result<Self, GridError> {
        check_fields(&grid, &[phi.len(), chi.len(), potential.len()], mass)?;
        Ok(FVState {
            grid,
            phi,
            chi,
            potential,
            mass,
            time,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn phi(&self) -> &[Complex64] {
        &self.phi
    }

    pub fn chi(&self) -> &[Complex64] {
        &self.chi
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn time(&self) -> f64 {
        self.time
    }
}

impl KGState {
    pub fn new(
        grid: Grid1D,
        psi: Vec<Complex64>,
        psi_dot: Vec<Complex64>,
        potential: Vec<f64>,
        mass: f64,
        time: f64,
    ) -> Result<Self, GridError> {
        check_fields(&grid, &[psi.len(), psi_dot.len(), potential.len()], mass)?;
        Ok(KGState {
            grid,
            psi,
            psi_dot,
            potential,
            mass,
            time,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn psi_dot(&self) -> &[Complex64] {
        &self.psi_dot
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn time(&self) -> f64 {
        self.time
    }
}

/// Split `(ψ, ψ̇)` into the two components, pointwise.
pub fn fv_split(kg: &KGState) -> FVState {
    let m = kg.mass;
    let n = kg.psi.len();
    let mut phi = vec![Complex64::default(); n];
    let mut chi = vec![Complex64::default(); n];
    for k in 0..n {
        let vm = kg.potential[k] / m;
        let psi = kg.psi[k];
        let idot = Complex64::i() * kg.psi_dot[k] / m;
        phi[k] = 0.5 * ((1.0 - vm) * psi + idot);
        chi[k] = 0.5 * ((1.0 + vm) * psi - idot);
    }
    FVState {
        grid: kg.grid,
        phi,
        chi,
        potential: kg.potential.clone(),
        mass: m,
        time: kg.time,
    }
}

/// Reassemble `ψ = φ + χ` and invert the split for `ψ̇`.
pub fn fv_reconstruct(fv: &FVState) -> KGState {
    let m = fv.mass;
    let n = fv.phi.len();
    let mut psi = vec![Complex64::default(); n];
    let mut psi_dot = vec![Complex64::default(); n];
    for k in 0..n {
        let sum = fv.phi[k] + fv.chi[k];
        let diff = fv.phi[k] - fv.chi[k];
        psi[k] = sum;
        // ψ̇ = −i·m·[(φ − χ) + (V/m)(φ + χ)]
        psi_dot[k] = mul_neg_i(m * (diff + (fv.potential[k] / m) * sum));
    }
    KGState {
        grid: fv.grid,
        psi,
        psi_dot,
        potential: fv.potential.clone(),
        mass: m,
        time: fv.time,
    }
}

#[inline(always)]
pub(crate) fn mul_neg_i(z: Complex64) -> Complex64 {
    Complex64::new(z.im, -z.re)
}

/// Scratch buffers for the coupled right-hand side.
pub struct RhsWorkspace {
    pub(crate) sum: Vec<Complex64>,
    pub(crate) lap: Vec<Complex64>,
}

impl RhsWorkspace {
    pub fn new(n: usize) -> Self {
        RhsWorkspace {
            sum: vec![Complex64::default(); n],
            lap: vec![Complex64::default(); n],
        }
    }
}

/// Time derivatives of `(φ, χ)` under the coupled first-order system,
/// written into `dphi`/`dchi`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn fv_rhs_into(
    phi: &[Complex64],
    chi: &[Complex64],
    potential: &[f64],
    mass: f64,
    dx: f64,
    boundary: Boundary,
    order: StencilOrder,
    ws: &mut RhsWorkspace,
    dphi: &mut [Complex64],
    dchi: &mut [Complex64],
) {
    let n = phi.len();
    for k in 0..n {
        ws.sum[k] = phi[k] + chi[k];
    }
    second_derivative(&ws.sum, dx, order, boundary, &mut ws.lap);
    let inv2m = 1.0 / (2.0 * mass);
    for k in 0..n {
        let kin = ws.lap[k] * inv2m;
        let v = potential[k];
        dphi[k] = mul_neg_i((v + mass) * phi[k] - kin);
        dchi[k] = mul_neg_i((v - mass) * chi[k] + kin);
    }
}

/// Time derivatives of `(φ, χ)`; allocating convenience wrapper.
pub fn fv_rhs(fv: &FVState, order: StencilOrder) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = fv.phi.len();
    let mut ws = RhsWorkspace::new(n);
    let mut dphi = vec![Complex64::default(); n];
    let mut dchi = vec![Complex64::default(); n];
    fv_rhs_into(
        &fv.phi,
        &fv.chi,
        &fv.potential,
        fv.mass,
        fv.grid.dx(),
        fv.grid.boundary(),
        order,
        &mut ws,
        &mut dphi,
        &mut dchi,
    );
    (dphi, dchi)
}

/// Conserved charge density `ρ = |φ|² − |χ|²`.
pub fn charge_density(fv: &FVState) -> Vec<f64> {
    fv.phi
        .iter()
        .zip(&fv.chi)
        .map(|(p, c)| p.norm_sqr() - c.norm_sqr())
        .collect()
}

/// Total charge `Q = Σ ρ_k · dx`.
pub fn total_charge(fv: &FVState) -> f64 {
    let rho = charge_density(fv);
    integrate(&fv.grid, &rho)
}

/// The same charge density evaluated from the second-order fields:
/// `ρ = (i/2m)(ψ*ψ̇ − ψψ̇*) − (V/m)|ψ|²`.
pub fn charge_density_from_kg(kg: &KGState) -> Vec<f64> {
    let m = kg.mass;
    kg.psi
        .iter()
        .zip(&kg.psi_dot)
        .zip(&kg.potential)
        .map(|((psi, dot), v)| {
            -(psi.conj() * dot).im / m - v / m * psi.norm_sqr()
        })
        .collect()
}

/// Charge current `j = (i/2m)(ψ∇ψ* − ψ*∇ψ)` with `ψ = φ + χ`.
pub fn current_density(fv: &FVState, order: StencilOrder) -> Vec<f64> {
    let n = fv.phi.len();
    let mut psi = vec![Complex64::default(); n];
    for k in 0..n {
        psi[k] = fv.phi[k] + fv.chi[k];
    }
    current_density_of_psi(&psi, fv.mass, fv.grid.dx(), fv.grid.boundary(), order)
}

pub(crate) fn current_density_of_psi(
    psi: &[Complex64],
    mass: f64,
    dx: f64,
    boundary: Boundary,
    order: StencilOrder,
) -> Vec<f64> {
    let n = psi.len();
    let mut grad = vec![Complex64::default(); n];
    first_derivative(psi, dx, order, boundary, &mut grad);
    (0..n)
        .map(|k| (psi[k].conj() * grad[k]).im / mass)
        .collect()
}

/// Pointwise dominance of one component over the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Content {
    Particle,
    Antiparticle,
    Balanced,
}

/// Particle/antiparticle content of a state (or a sub-interval of it).
#[derive(Debug, Clone, PartialEq)]
pub struct ContentReport {
    /// `∫|φ|² dx` over the classified interval.
    pub particle_norm: f64,
    /// `∫|χ|² dx` over the classified interval.
    pub antiparticle_norm: f64,
    /// Per-point dominance map over the classified interval.
    pub pointwise: Vec<Content>,
    /// Which component dominates in the integrated sense.
    pub dominant: Content,
}

impl ContentReport {
    pub fn particle_fraction(&self) -> f64 {
        self.particle_norm / (self.particle_norm + self.antiparticle_norm)
    }

    pub fn antiparticle_fraction(&self) -> f64 {
        self.antiparticle_norm / (self.particle_norm + self.antiparticle_norm)
    }
}

/// Classify the whole state.
pub fn content_classify(fv: &FVState) -> ContentReport {
    content_classify_region(fv, f64::NEG_INFINITY, f64::INFINITY)
}

/// Classify the restriction to grid points with `x_lo < x ≤ x_hi`.
pub fn content_classify_region(fv: &FVState, x_lo: f64, x_hi: f64) -> ContentReport {
    let mut particle_norm = 0.0;
    let mut antiparticle_norm = 0.0;
    let mut pointwise = Vec::new();
    for k in 0..fv.phi.len() {
        let x = fv.grid.x(k);
        if x <= x_lo || x > x_hi {
            continue;
        }
        let p2 = fv.phi[k].norm_sqr();
        let c2 = fv.chi[k].norm_sqr();
        particle_norm += p2;
        antiparticle_norm += c2;
        pointwise.push(if p2 > c2 {
            Content::Particle
        } else if c2 > p2 {
            Content::Antiparticle
        } else {
            Content::Balanced
        });
    }
    particle_norm *= fv.grid.dx();
    antiparticle_norm *= fv.grid.dx();
    let dominant = if particle_norm > antiparticle_norm {
        Content::Particle
    } else if antiparticle_norm > particle_norm {
        Content::Antiparticle
    } else {
        Content::Balanced
    };
    ContentReport {
        particle_norm,
        antiparticle_norm,
        pointwise,
        dominant,
    }
}

/// Discrete `x → −x, t → −t` substitution: `φ̃(x) = χ(−x)`, `χ̃(x) = φ(−x)`,
/// `Ṽ(x) = −V(−x)`, `t̃ = −t`.
///
/// If `(φ, χ)` solves the coupled system with `V`, the transformed pair
/// solves it with `Ṽ`; applying the transform twice is the identity. The
/// grid must be symmetric about `x = 0`.
pub fn pt_transform(fv: &FVState) -> Result<FVState, GridError> {
    let mirror = fv.grid.mirror_index()?;
    let n = fv.phi.len();
    let mut phi = vec![Complex64::default(); n];
    let mut chi = vec![Complex64::default(); n];
    let mut potential = vec![0.0; n];
    for k in 0..n {
        let j = mirror(k);
        phi[k] = fv.chi[j];
        chi[k] = fv.phi[j];
        potential[k] = -fv.potential[j];
    }
    Ok(FVState {
        grid: fv.grid,
        phi,
        chi,
        potential,
        mass: fv.mass,
        time: -fv.time,
    })
}
