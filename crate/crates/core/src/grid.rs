//! Uniform 1D grids with periodic or damped (absorbing-layer) boundaries.

// Float methods come from num_traits under no_std (libm); std shadows them.
#[allow(unused_imports)]
use num_traits::Float;

/// Boundary handling for field derivatives and time evolution.
///
/// `Absorbing` closes the stencils with zero ghost values and damps the
/// outermost `width` points each step; the layer must be at least 16 points
/// wide to keep its numerical reflection small.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Absorbing { width: usize },
}

pub const MIN_ABSORBER_WIDTH: usize = 16;
pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    dx: f64,
    n: usize,
    boundary: Boundary,
}

impl Grid1D {
    pub fn new(x_min: f64, dx: f64, n: usize, boundary: Boundary) -> Result<Self, GridError> {
        if !x_min.is_finite() || !dx.is_finite() {
            return Err(GridError::NotFinite);
        }
        if dx <= 0.0 {
            return Err(GridError::NonPositiveSpacing { dx });
        }
        if n < MIN_POINTS {
            return Err(GridError::TooFewPoints { n });
        }
        if let Boundary::Absorbing { width } = boundary {
            if width < MIN_ABSORBER_WIDTH {
                return Err(GridError::AbsorberTooNarrow {
                    width,
                    min: MIN_ABSORBER_WIDTH,
                });
            }
            if 2 * width >= n {
                return Err(GridError::AbsorberTooWide { width, n });
            }
        }
        Ok(Grid1D {
            x_min,
            dx,
            n,
            boundary,
        })
    }

    /// Periodic grid of `n` points centered on `x = 0` (covers
    /// `[-n·dx/2, n·dx/2)`), which is also symmetric under `x → -x`.
    pub fn periodic_centered(dx: f64, n: usize) -> Result<Self, GridError> {
        Grid1D::new(-(n as f64) * dx / 2.0, dx, n, Boundary::Periodic)
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n - 1)
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.boundary, Boundary::Periodic)
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.x(k))
    }

    /// Index of the grid point closest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let raw = (x - self.x_min) / self.dx;
        if raw <= 0.0 {
            0
        } else {
            let k = (raw + 0.5).floor() as usize;
            k.min(self.n - 1)
        }
    }

    /// Map `k` to the index of the mirrored point `x → -x`, if the grid is
    /// symmetric about the origin.
    ///
    /// A periodic grid is mirror-symmetric when `x_min = -n·dx/2` (the image
    /// of the leftmost point wraps onto itself); a bounded grid needs
    /// `x_min = -(n-1)·dx/2`.
    pub fn mirror_index(&self) -> Result<impl Fn(usize) -> usize, GridError> {
        let n = self.n;
        let tol = 1e-9 * self.dx;
        match self.boundary {
            Boundary::Periodic => {
                let want = -(n as f64) * self.dx / 2.0;
                if (self.x_min - want).abs() > tol {
                    return Err(GridError::AsymmetricGrid {
                        x_min: self.x_min,
                        dx: self.dx,
                        n,
                    });
                }
                Ok(MirrorMap::PeriodicCentered(n))
            }
            Boundary::Absorbing { .. } => {
                let want = -((n - 1) as f64) * self.dx / 2.0;
                if (self.x_min - want).abs() > tol {
                    return Err(GridError::AsymmetricGrid {
                        x_min: self.x_min,
                        dx: self.dx,
                        n,
                    });
                }
                Ok(MirrorMap::Centered(n))
            }
        }
        .map(|map| move |k: usize| map.apply(k))
    }
}

#[derive(Clone, Copy)]
enum MirrorMap {
    PeriodicCentered(usize),
    Centered(usize),
}

impl MirrorMap {
    fn apply(self, k: usize) -> usize {
        match self {
            MirrorMap::PeriodicCentered(n) => (n - k) % n,
            MirrorMap::Centered(n) => n - 1 - k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridError {
    TooFewPoints { n: usize },
    NonPositiveSpacing { dx: f64 },
    AbsorberTooNarrow { width: usize, min: usize },
    AbsorberTooWide { width: usize, n: usize },
    FieldLengthMismatch { expected: usize, got: usize },
    GridMismatch,
    AsymmetricGrid { x_min: f64, dx: f64, n: usize },
    MassNotPositive,
    NotFinite,
}

impl core::fmt::Display for GridError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GridError::TooFewPoints { n } => {
                write!(f, "grid needs at least {MIN_POINTS} points, got {n}")
            }
            GridError::NonPositiveSpacing { dx } => write!(f, "grid spacing must be > 0, got {dx}"),
            GridError::AbsorberTooNarrow { width, min } => {
                write!(f, "absorbing layer of {width} points is below the minimum {min}")
            }
            GridError::AbsorberTooWide { width, n } => {
                write!(f, "two absorbing layers of {width} points do not fit in {n} points")
            }
            GridError::FieldLengthMismatch { expected, got } => {
                write!(f, "field has {got} samples but the grid has {expected}")
            }
            GridError::GridMismatch => write!(f, "fields live on different grids"),
            GridError::AsymmetricGrid { x_min, dx, n } => write!(
                f,
                "grid (x_min={x_min}, dx={dx}, n={n}) is not symmetric about x = 0"
            ),
            GridError::MassNotPositive => write!(f, "field mass must be positive"),
            GridError::NotFinite => write!(f, "grid parameters must be finite"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GridError {}

/// Integrate samples over the grid: `Σ f_k · dx`.
pub fn integrate(grid: &Grid1D, samples: &[f64]) -> f64 {
    debug_assert_eq!(samples.len(), grid.len());
    samples.iter().sum::<f64>() * grid.dx()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Grid1D::new(0.0, 0.1, 4, Boundary::Periodic).is_err());
        assert!(Grid1D::new(0.0, -0.1, 64, Boundary::Periodic).is_err());
        assert!(Grid1D::new(0.0, 0.1, 64, Boundary::Absorbing { width: 8 }).is_err());
        assert!(Grid1D::new(0.0, 0.1, 64, Boundary::Absorbing { width: 32 }).is_err());
        assert!(Grid1D::new(0.0, 0.1, 64, Boundary::Absorbing { width: 16 }).is_ok());
    }

    #[test]
    fn positions_and_nearest() {
        let g = Grid1D::new(-1.0, 0.25, 9, Boundary::Periodic).unwrap();
        assert_eq!(g.x(0), -1.0);
        assert_eq!(g.x(4), 0.0);
        assert_eq!(g.nearest_index(0.01), 4);
        assert_eq!(g.nearest_index(-0.13), 3);
        assert_eq!(g.nearest_index(100.0), 8);
        assert_eq!(g.nearest_index(-100.0), 0);
    }

    #[test]
    fn mirror_periodic_centered() {
        let g = Grid1D::periodic_centered(0.5, 16).unwrap();
        let mirror = g.mirror_index().unwrap();
        assert_eq!(mirror(0), 0); // -L/2 wraps onto itself
        for k in 1..16 {
            let xk = g.x(k);
            let xm = g.x(mirror(k));
            assert!((xk + xm).abs() < 1e-12, "k={k}: {xk} vs {xm}");
        }
    }

    #[test]
    fn mirror_bounded_centered() {
        let g = Grid1D::new(-3.75, 0.5, 16, Boundary::Periodic);
        // x_min = -(n-1)dx/2 is the bounded-symmetric layout; as a periodic
        // grid it is asymmetric and must be rejected.
        assert!(g.unwrap().mirror_index().is_err());

        let g = Grid1D::new(-8.0, 0.5, 33, Boundary::Absorbing { width: 16 }).unwrap();
        let mirror = g.mirror_index().unwrap();
        for k in 0..33 {
            assert!((g.x(k) + g.x(mirror(k))).abs() < 1e-12);
        }
    }
}
