//! Kinematics and regime classification shared by the analytic and
//! time-domain halves of the crate.
//!
//! Everything is in natural units, ħ = c = 1: energies, momenta and masses
//! share one unit, lengths and times carry its inverse. Callers working in
//! "units of m" simply pass `mass = 1`.

use crate::grid::Grid1D;
use alloc::vec::Vec;
// Float methods come from num_traits under no_std (libm); std shadows them.
#[allow(unused_imports)]
use num_traits::Float;

/// On-shell parameters of the incident particle: `energy² = momentum² + mass²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleParams {
    mass: f64,
    energy: f64,
    momentum: f64,
}

impl ParticleParams {
    /// Build on-shell parameters with `momentum = +sqrt(energy² − mass²)`.
    ///
    /// Requires `energy ≥ mass > 0`; `energy = mass` gives a particle at rest.
    pub fn new(energy: f64, mass: f64) -> Result<Self, DomainError> {
        let momentum = momentum_from_energy(energy, mass)?;
        Ok(ParticleParams {
            mass,
            energy,
            momentum,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Incident momentum, ≥ 0 by construction.
    pub fn momentum(&self) -> f64 {
        self.momentum
    }
}

/// Static potential that vanishes far to the left of `x_step` and equals
/// `v0` far to the right.
///
/// `smoothing_width = 0` is the ideal sharp step; a positive width replaces
/// it by `v0·(1 + tanh((x − x_step)/w))/2` for convergence studies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPotential {
    pub v0: f64,
    pub x_step: f64,
    pub smoothing_width: f64,
}

impl StepPotential {
    pub fn sharp(v0: f64) -> Self {
        StepPotential {
            v0,
            x_step: 0.0,
            smoothing_width: 0.0,
        }
    }

    /// Potential value at `x`. A sharp step sampled exactly at `x_step`
    /// returns the midpoint `v0/2`, which keeps the grid-sampled step
    /// interface bias at O(dx²) instead of O(dx).
    pub fn value_at(&self, x: f64) -> f64 {
        let s = x - self.x_step;
        if self.smoothing_width > 0.0 {
            0.5 * self.v0 * (1.0 + (s / self.smoothing_width).tanh())
        } else if s.abs() <= 1e-9 * self.smoothing_scale() {
            0.5 * self.v0
        } else if s < 0.0 {
            0.0
        } else {
            self.v0
        }
    }

    fn smoothing_scale(&self) -> f64 {
        let m = self.x_step.abs();
        if m > 1.0 {
            m
        } else {
            1.0
        }
    }

    pub fn sample(&self, grid: &Grid1D) -> Vec<f64> {
        (0..grid.len()).map(|k| self.value_at(grid.x(k))).collect()
    }
}

/// Where a given step height lands relative to the incident energy.
///
/// With `E > m > 0` fixed, the transmitted wave is oscillatory below
/// `v0 = E − m` (ordinary transmission) and above `v0 = E + m` (Klein zone),
/// and exponentially decaying in between. The two boundaries are kept as
/// explicit tags because `p′ = 0` there and several ratios take their
/// limiting values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Ordinary,
    ThresholdLower,
    Evanescent,
    ThresholdUpper,
    Klein,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Ordinary => "ordinary",
            Regime::ThresholdLower => "threshold_lower",
            Regime::Evanescent => "evanescent",
            Regime::ThresholdUpper => "threshold_upper",
            Regime::Klein => "klein",
        }
    }

    pub fn is_threshold(&self) -> bool {
        matches!(self, Regime::ThresholdLower | Regime::ThresholdUpper)
    }
}

impl core::fmt::Display for Regime {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Domain errors for the kinematic and closed-form scattering operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainError {
    /// Mass must be strictly positive.
    MassNotPositive { mass: f64 },
    /// Off-shell input: total energy below the rest mass.
    EnergyBelowMass { energy: f64, mass: f64 },
    /// The operation needs a propagating incident wave (`energy > mass`).
    AtRest,
    /// No oscillatory transmitted wave exists: `(energy − v0)² ≤ mass²`.
    NoOscillatoryWave { energy: f64, v0: f64, mass: f64 },
    /// Local energy `energy − v0` vanishes, so the dispersion derivative
    /// is undefined (the point lies inside the evanescent window).
    ZeroLocalEnergy { energy: f64, v0: f64 },
    /// Antiparticle relabeling is only defined in the Klein zone.
    NotKleinZone { regime: Regime },
    /// A parameter was NaN or infinite.
    NotFinite { what: &'static str },
}

impl core::fmt::Display for DomainError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DomainError::MassNotPositive { mass } => {
                write!(f, "mass must be positive, got {mass}")
            }
            DomainError::EnergyBelowMass { energy, mass } => {
                write!(f, "energy {energy} is below the rest mass {mass}")
            }
            DomainError::AtRest => {
                write!(f, "incident particle is at rest (energy = mass); no scattering problem")
            }
            DomainError::NoOscillatoryWave { energy, v0, mass } => write!(
                f,
                "(energy - v0)^2 <= mass^2 (E={energy}, V0={v0}, m={mass}): transmitted wave is not oscillatory"
            ),
            DomainError::ZeroLocalEnergy { energy, v0 } => {
                write!(f, "local energy E - V0 vanishes (E={energy}, V0={v0})")
            }
            DomainError::NotKleinZone { regime } => {
                write!(f, "antiparticle relabeling needs the Klein zone, got regime {regime}")
            }
            DomainError::NotFinite { what } => write!(f, "{what} is not finite"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DomainError {}

/// `+sqrt(energy² − mass²)`, the momentum of an on-shell particle.
pub fn momentum_from_energy(energy: f64, mass: f64) -> Result<f64, DomainError> {
    if !energy.is_finite() || !mass.is_finite() {
        return Err(DomainError::NotFinite {
            what: "energy or mass",
        });
    }
    if mass <= 0.0 {
        return Err(DomainError::MassNotPositive { mass });
    }
    if energy < mass {
        return Err(DomainError::EnergyBelowMass { energy, mass });
    }
    Ok((energy * energy - mass * mass).sqrt())
}

/// `(energy − v0)² − mass²`, the squared momentum of the transmitted wave.
///
/// Negative values mean the transmitted wave is evanescent with decay rate
/// `sqrt(-result)`.
pub fn transmitted_momentum_squared(energy: f64, v0: f64, mass: f64) -> f64 {
    debug_assert!(mass > 0.0);
    let local = energy - v0;
    local * local - mass * mass
}

/// Classify the step height against the incident energy. Total over all real
/// `v0` (attractive steps land in `Ordinary`); exact equality with `E ∓ m`
/// yields the threshold tags.
pub fn classify_regime(energy: f64, v0: f64, mass: f64) -> Regime {
    debug_assert!(energy > mass && mass > 0.0);
    let lower = energy - mass;
    let upper = energy + mass;
    if v0 < lower {
        Regime::Ordinary
    } else if v0 == lower {
        Regime::ThresholdLower
    } else if v0 < upper {
        Regime::Evanescent
    } else if v0 == upper {
        Regime::ThresholdUpper
    } else {
        Regime::Klein
    }
}

/// Group velocity `p′/(E − V0)` of an oscillatory transmitted wave: the
/// dispersion derivative dE/dp′ on the local mass shell
/// `(E − V0)² = p′² + m²`.
///
/// With the sign-matched branch this is positive in the Klein zone even
/// though `p′ < 0` there: the transmitted packet moves to the right.
pub fn group_velocity(p_prime: f64, energy: f64, v0: f64) -> Result<f64, DomainError> {
    if !p_prime.is_finite() {
        return Err(DomainError::NotFinite { what: "p_prime" });
    }
    let local = energy - v0;
    if local == 0.0 {
        return Err(DomainError::ZeroLocalEnergy { energy, v0 });
    }
    Ok(p_prime / local)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_ulps_eq, ulps_eq};

    #[test]
    fn momentum_at_rest_is_zero() {
        assert_eq!(momentum_from_energy(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(momentum_from_energy(2.5, 2.5).unwrap(), 0.0);
    }

    #[test]
    fn momentum_of_worked_point() {
        // 1.25² = 0.75² + 1² holds exactly in binary arithmetic.
        assert_eq!(momentum_from_energy(1.25, 1.0).unwrap(), 0.75);
    }

    #[test]
    fn momentum_closes_the_mass_shell() {
        let e = 2.0f64.sqrt();
        let p = momentum_from_energy(e, 1.0).unwrap();
        assert_ulps_eq!(p, 1.0, max_ulps = 4);
        assert_ulps_eq!(p * p + 1.0, e * e, max_ulps = 4);
    }

    #[test]
    fn momentum_domain_errors() {
        assert_eq!(
            momentum_from_energy(0.9, 1.0),
            Err(DomainError::EnergyBelowMass {
                energy: 0.9,
                mass: 1.0
            })
        );
        assert_eq!(
            momentum_from_energy(1.0, 0.0),
            Err(DomainError::MassNotPositive { mass: 0.0 })
        );
        assert_eq!(
            momentum_from_energy(1.0, -2.0),
            Err(DomainError::MassNotPositive { mass: -2.0 })
        );
        assert!(momentum_from_energy(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn transmitted_momentum_squared_examples() {
        // All three evaluate exactly in binary floating point.
        assert_eq!(transmitted_momentum_squared(1.25, 0.0, 1.0), 0.5625);
        assert_eq!(transmitted_momentum_squared(1.25, 2.0, 1.0), -0.4375);
        assert_eq!(transmitted_momentum_squared(1.25, 3.0, 1.0), 2.0625);
    }

    #[test]
    fn regime_classification() {
        assert_eq!(classify_regime(1.25, 0.1, 1.0), Regime::Ordinary);
        assert_eq!(classify_regime(1.25, 2.0, 1.0), Regime::Evanescent);
        assert_eq!(classify_regime(1.25, 3.0, 1.0), Regime::Klein);
        // Thresholds at exact equality; 0.25 and 2.25 are exact binary values.
        assert_eq!(classify_regime(1.25, 0.25, 1.0), Regime::ThresholdLower);
        assert_eq!(classify_regime(1.25, 2.25, 1.0), Regime::ThresholdUpper);
        // Attractive steps are ordinary transmission.
        assert_eq!(classify_regime(1.25, -5.0, 1.0), Regime::Ordinary);
    }

    #[test]
    fn regime_agrees_with_sign_of_p_prime_squared() {
        let e = 1.25;
        for k in 0..2000 {
            let v0 = -2.0 + 0.003 * k as f64;
            let pp2 = transmitted_momentum_squared(e, v0, 1.0);
            match classify_regime(e, v0, 1.0) {
                Regime::Ordinary | Regime::Klein => assert!(pp2 > 0.0, "v0={v0}"),
                Regime::Evanescent => assert!(pp2 < 0.0, "v0={v0}"),
                Regime::ThresholdLower | Regime::ThresholdUpper => {
                    assert_eq!(pp2, 0.0, "v0={v0}")
                }
            }
        }
    }

    #[test]
    fn group_velocity_examples() {
        let v = group_velocity(0.5678908345800273, 1.25, 0.1).unwrap();
        assert!(ulps_eq!(v, 0.5678908345800273 / 1.15, max_ulps = 1));
        assert!((v - 0.4938).abs() < 1e-4);

        // Klein zone: negative p' over negative local energy moves right.
        let v = group_velocity(-1.4361406616345072, 1.25, 3.0).unwrap();
        assert!(v > 0.0);
        assert!((v - 0.82065).abs() < 1e-4);

        // Free case reduces to p/E.
        let p = momentum_from_energy(1.25, 1.0).unwrap();
        assert_eq!(group_velocity(p, 1.25, 0.0).unwrap(), p / 1.25);
    }

    #[test]
    fn group_velocity_rejects_vanishing_local_energy() {
        assert_eq!(
            group_velocity(0.5, 1.25, 1.25),
            Err(DomainError::ZeroLocalEnergy {
                energy: 1.25,
                v0: 1.25
            })
        );
    }

    #[test]
    fn sharp_step_midpoint_sampling() {
        let step = StepPotential::sharp(3.0);
        assert_eq!(step.value_at(-1e-6), 0.0);
        assert_eq!(step.value_at(1e-6), 3.0);
        assert_eq!(step.value_at(0.0), 1.5);
    }

    #[test]
    fn smoothed_step_limits() {
        let step = StepPotential {
            v0: 2.0,
            x_step: 1.0,
            smoothing_width: 0.5,
        };
        assert!(step.value_at(-20.0).abs() < 1e-12);
        assert!((step.value_at(20.0) - 2.0).abs() < 1e-12);
        assert_ulps_eq!(step.value_at(1.0), 1.0, max_ulps = 2);
    }
}
