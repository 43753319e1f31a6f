//! Transverse sampling geometry shared by spatial and frequency-domain arrays.
//!
//! Sample `i` along x sits at `center.0 + (i − nx/2)·dx`. With even `nx` this
//! puts one sample exactly on the center, which is the same convention as a
//! centered (fft-shifted) frequency axis, so spatial and frequency grids use
//! one type. Arrays are stored row-major as `[iy, ix]`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{EitError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub center: (f64, f64),
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        let grid = Self {
            nx,
            ny,
            dx,
            dy,
            center: (0.0, 0.0),
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn square(n: usize, pitch: f64) -> Result<Self> {
        Self::new(n, n, pitch, pitch)
    }

    pub fn with_center(self, x: f64, y: f64) -> Self {
        Self {
            center: (x, y),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 8 || self.ny < 8 || !self.nx.is_multiple_of(2) || !self.ny.is_multiple_of(2) {
            return Err(EitError::InvalidGrid(format!(
                "sample counts must be even and >= 8, got {}x{}",
                self.nx, self.ny
            )));
        }
        if !(self.dx > 0.0 && self.dy > 0.0 && self.dx.is_finite() && self.dy.is_finite()) {
            return Err(EitError::InvalidGrid(format!(
                "pitch must be positive, got dx={} dy={}",
                self.dx, self.dy
            )));
        }
        Ok(())
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.ny, self.nx)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.center.0 + (ix as f64 - (self.nx / 2) as f64) * self.dx
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.center.1 + (iy as f64 - (self.ny / 2) as f64) * self.dy
    }

    /// Position relative to the grid center.
    pub fn offset(&self, ix: usize, iy: usize) -> (f64, f64) {
        (self.x(ix) - self.center.0, self.y(iy) - self.center.1)
    }

    /// Polar coordinates about the grid center, azimuth in [0, 2π).
    pub fn polar(&self, ix: usize, iy: usize) -> (f64, f64) {
        let (x, y) = self.offset(ix, iy);
        (x.hypot(y), azimuth(x, y))
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn max_pitch(&self) -> f64 {
        self.dx.max(self.dy)
    }

    /// Largest radius about the center for which a full circle stays on-grid.
    pub fn inscribed_radius(&self) -> f64 {
        let hx = ((self.nx / 2) as f64 - 1.0) * self.dx;
        let hy = ((self.ny / 2) as f64 - 1.0) * self.dy;
        hx.min(hy)
    }

    /// Same sample counts and pitch (centers may differ).
    pub fn same_sampling(&self, other: &GridSpec) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && approx_eq(self.dx, other.dx)
            && approx_eq(self.dy, other.dy)
    }

    pub fn ensure_matches(&self, other: &GridSpec) -> Result<()> {
        if self.same_sampling(other) {
            Ok(())
        } else {
            Err(EitError::GridMismatch(format!(
                "{}x{} @ ({:e}, {:e}) vs {}x{} @ ({:e}, {:e})",
                self.nx, self.ny, self.dx, self.dy, other.nx, other.ny, other.dx, other.dy
            )))
        }
    }

    /// Fractional index coordinates of a physical point.
    pub fn index_of(&self, x: f64, y: f64) -> (f64, f64) {
        (
            (x - self.center.0) / self.dx + (self.nx / 2) as f64,
            (y - self.center.1) / self.dy + (self.ny / 2) as f64,
        )
    }
}

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// `atan2(y, x)` mapped to [0, 2π).
pub fn azimuth(x: f64, y: f64) -> f64 {
    let phi = y.atan2(x);
    if phi < 0.0 {
        let wrapped = phi + 2.0 * PI;
        // -0.0 and tiny negatives can round up to exactly 2π.
        if wrapped >= 2.0 * PI {
            0.0
        } else {
            wrapped
        }
    } else {
        phi
    }
}

/// Wrap an angle to (−π, π].
pub fn wrap_phase(phi: f64) -> f64 {
    let mut w = phi.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}
