//! Time-domain evolution of the two-component system, with a direct
//! second-order integrator kept alongside as a cross-validation oracle.
//!
//! The semi-discrete spectrum of both systems is bounded by
//! `|λ| ≤ max|V| + sqrt(m² + s_max)` with `s_max` the discrete Laplacian
//! symbol maximum, so the time step is guarded by the chosen integrator's
//! imaginary-axis stability limit scaled by `cfl_guard`.
//!
//! Observables are recorded on a fixed cadence: total/left/right charge
//! (the left/right split is an exact partition of the total sum), currents
//! at two fixed probes flanking the step, the charge-weighted centroid of
//! the right half, and the discrete continuity residual
//! `∂ρ/∂t + ∂j/∂x` evaluated with matched stencils at interior points.

use crate::fv::{current_density_of_psi, fv_rhs_into, FVState, KGState, RhsWorkspace};
use crate::grid::{Boundary, Grid1D, GridError};
use crate::stencil::{first_derivative, laplacian_symbol_max, second_derivative, StencilOrder};
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
// Float methods come from num_traits under no_std (libm); std shadows them.
#[allow(unused_imports)]
use num_traits::Float;

/// Default fraction of the stability bound used for automatic time steps.
pub const DEFAULT_CFL_GUARD: f64 = 0.25;

/// One-step norm-growth factor treated as a blow-up.
const INSTABILITY_GROWTH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    /// Classical fourth-order Runge-Kutta on the first-order system.
    Rk4,
    /// Two-step explicit midpoint (leapfrog) with an Rk4 bootstrap step.
    Leapfrog,
}

impl Integrator {
    /// Largest stable `|λ|·dt` on the imaginary axis.
    pub fn imaginary_axis_limit(&self) -> f64 {
        match self {
            Integrator::Rk4 => 2.0 * core::f64::consts::SQRT_2,
            Integrator::Leapfrog => 1.0,
        }
    }
}

/// Largest stable time step for the discretized system.
pub fn stability_dt_bound(
    grid: &Grid1D,
    mass: f64,
    v_abs_max: f64,
    integrator: Integrator,
    stencil: StencilOrder,
) -> f64 {
    let s_max = laplacian_symbol_max(stencil, grid.dx());
    let lambda = v_abs_max + (mass * mass + s_max).sqrt();
    integrator.imaginary_axis_limit() / lambda
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub integrator: Integrator,
    pub stencil: StencilOrder,
    /// Fraction of the stability bound the time step must stay under.
    pub cfl_guard: f64,
    /// Steps between observable records.
    pub record_every: usize,
    /// Steps between stored field snapshots (`None`: keep none).
    pub snapshot_every: Option<usize>,
    /// Location of the sharp step, used to anchor the left/right charge
    /// partition and the probes, and to exclude the interface points from
    /// the continuity residual. `None` for smooth or free runs.
    pub step_location: Option<f64>,
    /// Distance of the two current probes from the step (or from `x = 0`).
    pub probe_offset: f64,
    /// Earliest time the reflection measurement window may open.
    pub measurement_time: Option<f64>,
    /// Damping rate of the absorbing layer; `None` picks a default from the
    /// layer geometry.
    pub sponge_strength: Option<f64>,
    /// Verification hook: skip the time-step stability guard.
    pub allow_unstable: bool,
}

impl SimConfig {
    /// Config with `dt = cfl_guard × (stability bound)` for the given
    /// discretization and potential magnitude.
    pub fn stable(
        grid: &Grid1D,
        mass: f64,
        v_abs_max: f64,
        integrator: Integrator,
        stencil: StencilOrder,
        cfl_guard: f64,
        t_end: f64,
    ) -> Self {
        let dt = cfl_guard * stability_dt_bound(grid, mass, v_abs_max, integrator, stencil);
        SimConfig {
            dt,
            t_end,
            integrator,
            stencil,
            cfl_guard,
            record_every: 100,
            snapshot_every: None,
            step_location: None,
            probe_offset: 16.0 * grid.dx(),
            measurement_time: None,
            sponge_strength: None,
            allow_unstable: false,
        }
    }

    fn validate(&self, grid: &Grid1D, mass: f64, v_abs_max: f64) -> Result<(), SimError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(SimError::InvalidConfig {
                what: "dt must be positive and finite",
            });
        }
        if !(self.t_end >= self.dt) {
            return Err(SimError::InvalidConfig {
                what: "t_end must be at least one time step",
            });
        }
        if self.record_every == 0 {
            return Err(SimError::InvalidConfig {
                what: "record_every must be at least 1",
            });
        }
        if !(self.cfl_guard > 0.0 && self.cfl_guard < 1.0) {
            return Err(SimError::InvalidConfig {
                what: "cfl_guard must lie in (0, 1)",
            });
        }
        if !self.allow_unstable {
            let max =
                self.cfl_guard * stability_dt_bound(grid, mass, v_abs_max, self.integrator, self.stencil);
            if self.dt > max * (1.0 + 1e-12) {
                return Err(SimError::UnstableTimeStep { dt: self.dt, max });
            }
        }
        Ok(())
    }
}

/// One row of the observable time series.
///
/// `q_left + q_right == q_total` holds exactly (the two sides partition the
/// quadrature sum). `centroid_right` is NaN while the right half holds no
/// charge, and `continuity_residual_max` is NaN on the first and last
/// records, where the centered time difference has no neighbor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRecord {
    pub step: usize,
    pub t: f64,
    pub q_total: f64,
    pub q_left: f64,
    pub q_right: f64,
    pub j_probe_left: f64,
    pub j_probe_right: f64,
    pub centroid_right: f64,
    pub continuity_residual_max: f64,
}

#[derive(Debug, Clone)]
pub struct EvolveOutput {
    pub records: Vec<ObservableRecord>,
    pub snapshots: Vec<FVState>,
    pub final_state: FVState,
}

#[derive(Debug, Clone)]
pub struct KgEvolveOutput {
    pub records: Vec<ObservableRecord>,
    pub snapshots: Vec<KGState>,
    pub final_state: KGState,
}

/// Reflection/transmission read off the charge bookkeeping once the probes
/// have gone quiet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionMeasurement {
    /// `Q_left(t_end) / Q_incident`.
    pub r: f64,
    /// `Q_right(t_end) / Q_incident`, signed (negative in the Klein zone).
    pub transmitted_charge_fraction: f64,
    /// `|Q_right(t_end)| / Q_incident`.
    pub t: f64,
    /// `|R + Q_right/Q_incident − 1|`; zero up to charge-conservation drift.
    pub closure_defect: f64,
    /// Time the measurement window opened.
    pub quiescent_from: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    SigmaNotPositive { sigma: f64 },
    MomentumSupportNotPositive { momentum: f64, min: f64 },
    StepOverlap { fraction: f64, limit: f64 },
    InvalidConfig { what: &'static str },
    UnstableTimeStep { dt: f64, max: f64 },
    Unstable { step: usize, time: f64 },
    NotQuiescent { last_activity: f64, threshold: f64 },
    TooFewRecords { needed: usize, got: usize },
    Grid(GridError),
}

impl core::fmt::Display for SimError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SimError::SigmaNotPositive { sigma } => {
                write!(f, "packet width must be positive, got {sigma}")
            }
            SimError::MomentumSupportNotPositive { momentum, min } => write!(
                f,
                "central momentum {momentum} is below {min} = 4/sigma; the packet would not be a right-moving quasi-monochromatic wave"
            ),
            SimError::StepOverlap { fraction, limit } => write!(
                f,
                "initial packet overlaps the step region by {fraction:.3e} of its charge (limit {limit:.0e}); move the packet or enlarge the domain"
            ),
            SimError::InvalidConfig { what } => write!(f, "invalid simulation config: {what}"),
            SimError::UnstableTimeStep { dt, max } => write!(
                f,
                "dt = {dt} exceeds the guarded stability bound {max} for this grid/integrator/stencil"
            ),
            SimError::Unstable { step, time } => write!(
                f,
                "evolution diverged at step {step} (t = {time}): field norm grew more than {INSTABILITY_GROWTH}x in one step"
            ),
            SimError::NotQuiescent { last_activity, threshold } => write!(
                f,
                "probes still active at the end of the run (last activity at t = {last_activity}, threshold {threshold:.2e}); extend t_end"
            ),
            SimError::TooFewRecords { needed, got } => {
                write!(f, "need at least {needed} records, got {got}")
            }
            SimError::Grid(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SimError {}

impl From<GridError> for SimError {
    fn from(e: GridError) -> Self {
        SimError::Grid(e)
    }
}

// ---------------------------------------------------------------------------
// Generic two-field integrator
// ---------------------------------------------------------------------------

trait TwoComponentSystem {
    fn rhs(
        &self,
        a: &[Complex64],
        b: &[Complex64],
        ws: &mut RhsWorkspace,
        da: &mut [Complex64],
        db: &mut [Complex64],
    );
    fn charge_density_into(&self, a: &[Complex64], b: &[Complex64], out: &mut [f64]);
    fn current_density(&self, a: &[Complex64], b: &[Complex64]) -> Vec<f64>;
}

struct FvSystem<'a> {
    potential: &'a [f64],
    mass: f64,
    dx: f64,
    boundary: Boundary,
    order: StencilOrder,
}

impl TwoComponentSystem for FvSystem<'_> {
    fn rhs(
        &self,
        a: &[Complex64],
        b: &[Complex64],
        ws: &mut RhsWorkspace,
        da: &mut [Complex64],
        db: &mut [Complex64],
    ) {
        fv_rhs_into(
            a,
            b,
            self.potential,
            self.mass,
            self.dx,
            self.boundary,
            self.order,
            ws,
            da,
            db,
        );
    }

    fn charge_density_into(&self, a: &[Complex64], b: &[Complex64], out: &mut [f64]) {
        for k in 0..a.len() {
            out[k] = a[k].norm_sqr() - b[k].norm_sqr();
        }
    }

    fn current_density(&self, a: &[Complex64], b: &[Complex64]) -> Vec<f64> {
        let psi: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        current_density_of_psi(&psi, self.mass, self.dx, self.boundary, self.order)
    }
}

/// Second-order dynamics as a first-order pair `(ψ, ψ̇)`:
/// `ψ̈ = ∂²ψ + (V² − m²)ψ − 2iVψ̇`.
struct KgSystem<'a> {
    potential: &'a [f64],
    mass: f64,
    dx: f64,
    boundary: Boundary,
    order: StencilOrder,
}

impl TwoComponentSystem for KgSystem<'_> {
    fn rhs(
        &self,
        a: &[Complex64],
        b: &[Complex64],
        ws: &mut RhsWorkspace,
        da: &mut [Complex64],
        db: &mut [Complex64],
    ) {
        let n = a.len();
        second_derivative(a, self.dx, self.order, self.boundary, &mut ws.lap);
        let m2 = self.mass * self.mass;
        for k in 0..n {
            let v = self.potential[k];
            da[k] = b[k];
            db[k] = ws.lap[k] + (v * v - m2) * a[k] - Complex64::i() * (2.0 * v) * b[k];
        }
    }

    fn charge_density_into(&self, a: &[Complex64], b: &[Complex64], out: &mut [f64]) {
        let m = self.mass;
        for k in 0..a.len() {
            out[k] = -(a[k].conj() * b[k]).im / m - self.potential[k] / m * a[k].norm_sqr();
        }
    }

    fn current_density(&self, a: &[Complex64], _b: &[Complex64]) -> Vec<f64> {
        current_density_of_psi(a, self.mass, self.dx, self.boundary, self.order)
    }
}

struct Stepper {
    integrator: Integrator,
    dt: f64,
    ws: RhsWorkspace,
    k1a: Vec<Complex64>,
    k1b: Vec<Complex64>,
    k2a: Vec<Complex64>,
    k2b: Vec<Complex64>,
    k3a: Vec<Complex64>,
    k3b: Vec<Complex64>,
    k4a: Vec<Complex64>,
    k4b: Vec<Complex64>,
    ta: Vec<Complex64>,
    tb: Vec<Complex64>,
    // leapfrog history
    prev_a: Vec<Complex64>,
    prev_b: Vec<Complex64>,
    have_prev: bool,
}

impl Stepper {
    fn new(n: usize, integrator: Integrator, dt: f64) -> Self {
        let z = vec![Complex64::default(); n];
        Stepper {
            integrator,
            dt,
            ws: RhsWorkspace::new(n),
            k1a: z.clone(),
            k1b: z.clone(),
            k2a: z.clone(),
            k2b: z.clone(),
            k3a: z.clone(),
            k3b: z.clone(),
            k4a: z.clone(),
            k4b: z.clone(),
            ta: z.clone(),
            tb: z.clone(),
            prev_a: z.clone(),
            prev_b: z,
            have_prev: false,
        }
    }

    fn advance<S: TwoComponentSystem>(
        &mut self,
        sys: &S,
        a: &mut Vec<Complex64>,
        b: &mut Vec<Complex64>,
    ) {
        match self.integrator {
            Integrator::Rk4 => self.rk4(sys, a, b),
            Integrator::Leapfrog => {
                if self.have_prev {
                    self.leapfrog(sys, a, b);
                } else {
                    // Bootstrap the two-step scheme with one Rk4 step.
                    self.prev_a.copy_from_slice(a);
                    self.prev_b.copy_from_slice(b);
                    self.rk4(sys, a, b);
                    self.have_prev = true;
                }
            }
        }
    }

    fn rk4<S: TwoComponentSystem>(&mut self, sys: &S, a: &mut [Complex64], b: &mut [Complex64]) {
        let n = a.len();
        let dt = self.dt;
        sys.rhs(a, b, &mut self.ws, &mut self.k1a, &mut self.k1b);
        for k in 0..n {
            self.ta[k] = a[k] + 0.5 * dt * self.k1a[k];
            self.tb[k] = b[k] + 0.5 * dt * self.k1b[k];
        }
        sys.rhs(&self.ta, &self.tb, &mut self.ws, &mut self.k2a, &mut self.k2b);
        for k in 0..n {
            self.ta[k] = a[k] + 0.5 * dt * self.k2a[k];
            self.tb[k] = b[k] + 0.5 * dt * self.k2b[k];
        }
        sys.rhs(&self.ta, &self.tb, &mut self.ws, &mut self.k3a, &mut self.k3b);
        for k in 0..n {
            self.ta[k] = a[k] + dt * self.k3a[k];
            self.tb[k] = b[k] + dt * self.k3b[k];
        }
        sys.rhs(&self.ta, &self.tb, &mut self.ws, &mut self.k4a, &mut self.k4b);
        let w = dt / 6.0;
        for k in 0..n {
            a[k] += w * (self.k1a[k] + 2.0 * (self.k2a[k] + self.k3a[k]) + self.k4a[k]);
            b[k] += w * (self.k1b[k] + 2.0 * (self.k2b[k] + self.k3b[k]) + self.k4b[k]);
        }
    }

    fn leapfrog<S: TwoComponentSystem>(
        &mut self,
        sys: &S,
        a: &mut Vec<Complex64>,
        b: &mut Vec<Complex64>,
    ) {
        let n = a.len();
        sys.rhs(a, b, &mut self.ws, &mut self.k1a, &mut self.k1b);
        let two_dt = 2.0 * self.dt;
        for k in 0..n {
            let na = self.prev_a[k] + two_dt * self.k1a[k];
            let nb = self.prev_b[k] + two_dt * self.k1b[k];
            self.prev_a[k] = a[k];
            self.prev_b[k] = b[k];
            self.ta[k] = na;
            self.tb[k] = nb;
        }
        core::mem::swap(a, &mut self.ta);
        core::mem::swap(b, &mut self.tb);
    }
}

fn sponge_mask(grid: &Grid1D, dt: f64, strength: Option<f64>) -> Option<Vec<f64>> {
    match grid.boundary() {
        Boundary::Periodic => None,
        Boundary::Absorbing { width } => {
            let n = grid.len();
            let gamma = strength.unwrap_or(12.0 / (width as f64 * grid.dx()));
            let mut mask = vec![1.0; n];
            for i in 0..width {
                let xi = (width - i) as f64 / width as f64;
                let damp = (-gamma * dt * xi * xi).exp();
                mask[i] *= damp;
                mask[n - 1 - i] *= damp;
            }
            Some(mask)
        }
    }
}

struct Bookkeeper<'cfg> {
    grid: Grid1D,
    config: &'cfg SimConfig,
    n_steps: usize,
    step_x: f64,
    probe_left: usize,
    probe_right: usize,
    excluded: Vec<bool>,
    records: Vec<ObservableRecord>,
    rho_now: Vec<f64>,
    rho_prev: Vec<f64>,
    rho_prev_step: Option<usize>,
    pending: Option<Pending>,
}

struct Pending {
    record_idx: usize,
    rho_before: Vec<f64>,
    dj: Vec<f64>,
    rho_scale: f64,
}

impl<'cfg> Bookkeeper<'cfg> {
    fn new(grid: Grid1D, config: &'cfg SimConfig, n_steps: usize) -> Self {
        let step_x = config.step_location.unwrap_or(0.0);
        let probe_left = grid.nearest_index(step_x - config.probe_offset);
        let probe_right = grid.nearest_index(step_x + config.probe_offset);
        let n = grid.len();
        let mut excluded = vec![false; n];
        if let Boundary::Absorbing { width } = grid.boundary() {
            for k in 0..n {
                excluded[k] = k < width || k >= n - width;
            }
        }
        // Stencil halo at non-periodic edges sees the zero ghosts.
        if !grid.is_periodic() {
            for k in 0..n {
                if k < 2 || k >= n - 2 {
                    excluded[k] = true;
                }
            }
        }
        if config.step_location.is_some() {
            for k in 0..n {
                if (grid.x(k) - step_x).abs() < 2.5 * grid.dx() {
                    excluded[k] = true;
                }
            }
        }
        Bookkeeper {
            grid,
            config,
            n_steps,
            step_x,
            probe_left,
            probe_right,
            excluded,
            records: Vec::new(),
            rho_now: vec![0.0; n],
            rho_prev: vec![0.0; n],
            rho_prev_step: None,
            pending: None,
        }
    }

    fn is_record_step(&self, step: usize) -> bool {
        step % self.config.record_every == 0 || step == self.n_steps
    }

    fn observe<S: TwoComponentSystem>(
        &mut self,
        sys: &S,
        a: &[Complex64],
        b: &[Complex64],
        step: usize,
        t: f64,
    ) {
        let record_here = self.is_record_step(step);
        let record_next = step < self.n_steps && self.is_record_step(step + 1);
        let need_rho = record_here || record_next || self.pending.is_some();
        if !need_rho {
            return;
        }
        sys.charge_density_into(a, b, &mut self.rho_now);

        if let Some(pending) = self.pending.take() {
            // Centered time difference around the pending record.
            let inv2dt = 1.0 / (2.0 * self.config.dt);
            let mut worst = 0.0f64;
            for k in 0..self.rho_now.len() {
                if self.excluded[k] {
                    continue;
                }
                let res =
                    ((self.rho_now[k] - pending.rho_before[k]) * inv2dt + pending.dj[k]).abs();
                worst = worst.max(res);
            }
            self.records[pending.record_idx].continuity_residual_max =
                worst / pending.rho_scale;
        }

        if record_here {
            let dx = self.grid.dx();
            let mut q_left = 0.0;
            let mut q_right = 0.0;
            let mut xw = 0.0;
            for k in 0..self.rho_now.len() {
                let x = self.grid.x(k);
                if x < self.step_x {
                    q_left += self.rho_now[k];
                } else {
                    q_right += self.rho_now[k];
                    xw += x * self.rho_now[k];
                }
            }
            q_left *= dx;
            q_right *= dx;
            xw *= dx;
            let j = sys.current_density(a, b);
            let record_idx = self.records.len();
            self.records.push(ObservableRecord {
                step,
                t,
                q_total: q_left + q_right,
                q_left,
                q_right,
                j_probe_left: j[self.probe_left],
                j_probe_right: j[self.probe_right],
                centroid_right: if q_right == 0.0 { f64::NAN } else { xw / q_right },
                continuity_residual_max: f64::NAN,
            });
            // Queue the residual for completion at the next step.
            if self.rho_prev_step == Some(step.wrapping_sub(1)) && step < self.n_steps {
                let mut dj = vec![0.0; j.len()];
                let jc: Vec<Complex64> = j.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                let mut djc = vec![Complex64::default(); j.len()];
                first_derivative(
                    &jc,
                    dx,
                    self.config.stencil,
                    self.grid.boundary(),
                    &mut djc,
                );
                for k in 0..dj.len() {
                    dj[k] = djc[k].re;
                }
                let rho_scale = self
                    .rho_now
                    .iter()
                    .fold(0.0f64, |acc, r| acc.max(r.abs()))
                    .max(f64::MIN_POSITIVE);
                self.pending = Some(Pending {
                    record_idx,
                    rho_before: self.rho_prev.clone(),
                    dj,
                    rho_scale,
                });
            }
        }

        core::mem::swap(&mut self.rho_prev, &mut self.rho_now);
        self.rho_prev_step = Some(step);
    }
}

fn run_two_component<S: TwoComponentSystem>(
    sys: &S,
    grid: Grid1D,
    mut a: Vec<Complex64>,
    mut b: Vec<Complex64>,
    t0: f64,
    config: &SimConfig,
    mut on_snapshot: impl FnMut(&[Complex64], &[Complex64], f64),
) -> Result<(Vec<ObservableRecord>, Vec<Complex64>, Vec<Complex64>, f64), SimError> {
    let n = grid.len();
    let n_steps = (config.t_end / config.dt).round().max(1.0) as usize;
    let mut stepper = Stepper::new(n, config.integrator, config.dt);
    let mask = sponge_mask(&grid, config.dt, config.sponge_strength);
    let mut book = Bookkeeper::new(grid, config, n_steps);

    let dx = grid.dx();
    let norm_of = |a: &[Complex64], b: &[Complex64]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.norm_sqr() + y.norm_sqr())
            .sum::<f64>()
            * dx
    };
    let mut prev_norm = norm_of(&a, &b);

    if let Some(every) = config.snapshot_every {
        if every == 0 {
            return Err(SimError::InvalidConfig {
                what: "snapshot_every must be at least 1 when set",
            });
        }
    }

    book.observe(sys, &a, &b, 0, t0);
    if config.snapshot_every.is_some() {
        on_snapshot(&a, &b, t0);
    }

    for step in 1..=n_steps {
        stepper.advance(sys, &mut a, &mut b);
        if let Some(mask) = &mask {
            for k in 0..n {
                a[k] *= mask[k];
                b[k] *= mask[k];
            }
        }
        let t = t0 + step as f64 * config.dt;

        let norm = norm_of(&a, &b);
        if !norm.is_finite() || norm > INSTABILITY_GROWTH * prev_norm + f64::MIN_POSITIVE {
            return Err(SimError::Unstable { step, time: t });
        }
        prev_norm = norm;

        book.observe(sys, &a, &b, step, t);
        if let Some(every) = config.snapshot_every {
            if step % every == 0 {
                on_snapshot(&a, &b, t);
            }
        }
    }

    let t_final = t0 + n_steps as f64 * config.dt;
    Ok((book.records, a, b, t_final))
}

/// Evolve the two-component state, recording observables on the configured
/// cadence. Deterministic: identical inputs give bitwise-identical output.
pub fn evolve(initial: FVState, config: &SimConfig) -> Result<EvolveOutput, SimError> {
    let v_abs_max = initial
        .potential
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    config.validate(&initial.grid, initial.mass, v_abs_max)?;
    let sys = FvSystem {
        potential: &initial.potential,
        mass: initial.mass,
        dx: initial.grid.dx(),
        boundary: initial.grid.boundary(),
        order: config.stencil,
    };
    let mut snapshots = Vec::new();
    let grid = initial.grid;
    let (records, a, b, t_final) = run_two_component(
        &sys,
        grid,
        initial.phi.clone(),
        initial.chi.clone(),
        initial.time,
        config,
        |a, b, t| {
            snapshots.push(FVState {
                grid,
                phi: a.to_vec(),
                chi: b.to_vec(),
                potential: initial.potential.clone(),
                mass: initial.mass,
                time: t,
            });
        },
    )?;
    let final_state = FVState {
        grid,
        phi: a,
        chi: b,
        potential: initial.potential,
        mass: initial.mass,
        time: t_final,
    };
    Ok(EvolveOutput {
        records,
        snapshots,
        final_state,
    })
}

/// Evolve the second-order state directly; the cross-validation oracle for
/// [`evolve`].
pub fn evolve_kg(initial: KGState, config: &SimConfig) -> Result<KgEvolveOutput, SimError> {
    let v_abs_max = initial
        .potential
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    config.validate(&initial.grid, initial.mass, v_abs_max)?;
    let sys = KgSystem {
        potential: &initial.potential,
        mass: initial.mass,
        dx: initial.grid.dx(),
        boundary: initial.grid.boundary(),
        order: config.stencil,
    };
    let mut snapshots = Vec::new();
    let grid = initial.grid;
    let (records, a, b, t_final) = run_two_component(
        &sys,
        grid,
        initial.psi.clone(),
        initial.psi_dot.clone(),
        initial.time,
        config,
        |a, b, t| {
            snapshots.push(KGState {
                grid,
                psi: a.to_vec(),
                psi_dot: b.to_vec(),
                potential: initial.potential.clone(),
                mass: initial.mass,
                time: t,
            });
        },
    )?;
    let final_state = KGState {
        grid,
        psi: a,
        psi_dot: b,
        potential: initial.potential,
        mass: initial.mass,
        time: t_final,
    };
    Ok(KgEvolveOutput {
        records,
        snapshots,
        final_state,
    })
}

/// Advance the second-order state by a single time step.
pub fn kg_oracle_step(kg: &KGState, config: &SimConfig) -> Result<KGState, SimError> {
    let mut one = config.clone();
    one.t_end = config.dt;
    one.record_every = 1;
    one.snapshot_every = None;
    Ok(evolve_kg(kg.clone(), &one)?.final_state)
}

/// Read the reflection coefficient off the record series.
///
/// `q_incident` is the pre-interaction left-side charge (normally
/// `records[0].q_left`). The measurement window opens once both probes have
/// dropped below `quiescence_rtol` times their peak activity (and past
/// `measurement_time`, when set); the window must contain at least two
/// records.
pub fn measure_reflection(
    records: &[ObservableRecord],
    q_incident: f64,
    quiescence_rtol: f64,
    measurement_time: Option<f64>,
) -> Result<ReflectionMeasurement, SimError> {
    if records.len() < 3 {
        return Err(SimError::TooFewRecords {
            needed: 3,
            got: records.len(),
        });
    }
    let peak_left = records
        .iter()
        .fold(0.0f64, |acc, r| acc.max(r.j_probe_left.abs()));
    let peak_right = records
        .iter()
        .fold(0.0f64, |acc, r| acc.max(r.j_probe_right.abs()));
    let thr_left = quiescence_rtol * peak_left;
    let thr_right = quiescence_rtol * peak_right;

    // Last record where either probe was still active.
    let mut last_active: Option<usize> = None;
    for (i, r) in records.iter().enumerate() {
        if r.j_probe_left.abs() > thr_left || r.j_probe_right.abs() > thr_right {
            last_active = Some(i);
        }
    }
    let mut window_start = match last_active {
        Some(i) => i + 1,
        None => 0,
    };
    if let Some(tmin) = measurement_time {
        while window_start < records.len() && records[window_start].t < tmin {
            window_start += 1;
        }
    }
    if window_start + 2 > records.len() {
        let threshold = thr_left.max(thr_right);
        return Err(SimError::NotQuiescent {
            last_activity: records[last_active.unwrap_or(records.len() - 1)].t,
            threshold,
        });
    }

    let end = records.last().unwrap();
    let r = end.q_left / q_incident;
    let tcf = end.q_right / q_incident;
    Ok(ReflectionMeasurement {
        r,
        transmitted_charge_fraction: tcf,
        t: tcf.abs(),
        closure_defect: (r + tcf - 1.0).abs(),
        quiescent_from: records[window_start].t,
    })
}

/// Continuity residual `∂ρ/∂t + ∂j/∂x` for each interior snapshot of an
/// equally spaced series, normalized by `max|ρ|` at that snapshot.
pub fn continuity_residual_series(
    snapshots: &[FVState],
    order: StencilOrder,
    sharp_step_at: Option<f64>,
) -> Result<Vec<f64>, SimError> {
    if snapshots.len() < 3 {
        return Err(SimError::TooFewRecords {
            needed: 3,
            got: snapshots.len(),
        });
    }
    let grid = snapshots[0].grid;
    let spacing = snapshots[1].time - snapshots[0].time;
    if !(spacing > 0.0) {
        return Err(SimError::InvalidConfig {
            what: "snapshots must be strictly increasing in time",
        });
    }
    let n = grid.len();
    let mut excluded = vec![false; n];
    if let Boundary::Absorbing { width } = grid.boundary() {
        for (k, e) in excluded.iter_mut().enumerate() {
            *e = k < width + 2 || k >= n - width - 2;
        }
    }
    if let Some(xs) = sharp_step_at {
        for (k, e) in excluded.iter_mut().enumerate() {
            if (grid.x(k) - xs).abs() < 2.5 * grid.dx() {
                *e = true;
            }
        }
    }

    let mut out = Vec::with_capacity(snapshots.len() - 2);
    for i in 1..snapshots.len() - 1 {
        let dt_span = snapshots[i + 1].time - snapshots[i - 1].time;
        let rho_m = crate::fv::charge_density(&snapshots[i - 1]);
        let rho_0 = crate::fv::charge_density(&snapshots[i]);
        let rho_p = crate::fv::charge_density(&snapshots[i + 1]);
        let j = crate::fv::current_density(&snapshots[i], order);
        let jc: Vec<Complex64> = j.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut djc = vec![Complex64::default(); n];
        first_derivative(&jc, grid.dx(), order, grid.boundary(), &mut djc);
        let scale = rho_0
            .iter()
            .fold(0.0f64, |acc, r| acc.max(r.abs()))
            .max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for k in 0..n {
            if excluded[k] {
                continue;
            }
            let res = ((rho_p[k] - rho_m[k]) / dt_span + djc[k].re).abs();
            worst = worst.max(res);
        }
        out.push(worst / scale);
    }
    Ok(out)
}
