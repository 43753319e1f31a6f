//! Coupling-field intensity patterns: uniform illumination, the azimuthal
//! Rabi-frequency ramp used for phase vortices, and forked binary gratings.

use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::{intensity_from_rabi, rabi_from_intensity};
use crate::error::{EitError, Result};
use crate::grid::GridSpec;
use crate::medium::AtomicParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Uniform,
    AzimuthalRamp,
    Fork,
    BinaryMask,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMap {
    pub grid: GridSpec,
    /// W/m², indexed `[iy, ix]`.
    pub intensity: Array2<f64>,
    pub kind: PatternKind,
}

impl CouplingMap {
    pub fn new(grid: GridSpec, intensity: Array2<f64>, kind: PatternKind) -> Result<Self> {
        grid.validate()?;
        if intensity.dim() != grid.shape() {
            return Err(EitError::GridMismatch(format!(
                "intensity array {:?} vs grid {:?}",
                intensity.dim(),
                grid.shape()
            )));
        }
        if let Some(bad) = intensity.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(EitError::Domain(format!(
                "coupling intensity must be >= 0, found {bad}"
            )));
        }
        Ok(Self {
            grid,
            intensity,
            kind,
        })
    }

    pub fn min(&self) -> f64 {
        self.intensity.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.intensity
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Per-pixel Rabi frequency on a transition with dipole `mu`.
    pub fn rabi_map(&self, mu: f64) -> Result<Array2<f64>> {
        let mut out = Array2::zeros(self.intensity.dim());
        for (o, &i) in out.iter_mut().zip(self.intensity.iter()) {
            *o = rabi_from_intensity(i, mu)?;
        }
        Ok(out)
    }

    /// Fraction of pixels with nonzero intensity.
    pub fn duty_cycle(&self) -> f64 {
        let lit = self.intensity.iter().filter(|v| **v > 0.0).count();
        lit as f64 / self.intensity.len() as f64
    }
}

/// Evaluate `f(ix, iy)` on every pixel. Rows are filled in parallel; each
/// pixel depends only on its own indices, so the output does not depend on
/// scheduling.
pub(crate) fn sample_grid<T, F>(grid: &GridSpec, f: F) -> Array2<T>
where
    T: Clone + Default + Send,
    F: Fn(usize, usize) -> T + Sync,
{
    let mut out = Array2::<T>::default(grid.shape());
    Zip::indexed(&mut out).par_for_each(|(iy, ix), v| *v = f(ix, iy));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Number of 0→2π ramps around the circle; equals the imprinted winding.
    pub sectors: u32,
}

impl RampParams {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self {
            a,
            b,
            c,
            sectors: 1,
        }
    }

    pub fn with_sectors(self, sectors: u32) -> Self {
        Self { sectors, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.b >= 0.0 && self.c > 0.0) {
            return Err(EitError::Domain(format!(
                "ramp needs a > 0, b >= 0, c > 0; got a={} b={} c={}",
                self.a, self.b, self.c
            )));
        }
        if self.sectors == 0 {
            return Err(EitError::Domain("ramp needs at least one sector".into()));
        }
        Ok(())
    }

    /// Position within the current sector, in [0, 2π).
    pub fn local_azimuth(&self, phi: f64) -> f64 {
        if self.sectors == 1 {
            phi
        } else {
            (f64::from(self.sectors) * phi).rem_euclid(2.0 * PI)
        }
    }

    /// Ω_c(φ) = √(a/(bφ + c))·γ31 for a local azimuth in [0, 2π].
    pub fn rabi_at(&self, local_phi: f64, gamma31: f64) -> f64 {
        (self.a / (self.b * local_phi + self.c)).sqrt() * gamma31
    }

    /// Rabi frequencies at the strong (φ = 0) and weak (φ → 2π) ends.
    pub fn endpoint_rabi(&self, gamma31: f64) -> (f64, f64) {
        (self.rabi_at(0.0, gamma31), self.rabi_at(2.0 * PI, gamma31))
    }
}

pub fn uniform(grid: GridSpec, intensity: f64) -> Result<CouplingMap> {
    CouplingMap::new(
        grid,
        Array2::from_elem(grid.shape(), intensity),
        PatternKind::Uniform,
    )
}

/// Azimuthal ramp about the grid center, with the seam along +x.
pub fn azimuthal_ramp(
    grid: GridSpec,
    params: RampParams,
    atomic: &AtomicParams,
) -> Result<CouplingMap> {
    grid.validate()?;
    params.validate()?;
    atomic.validate()?;
    let mu = atomic.mu23;
    let gamma31 = atomic.gamma31;
    let intensity = sample_grid(&grid, |ix, iy| {
        let (_, phi) = grid.polar(ix, iy);
        let omega = params.rabi_at(params.local_azimuth(phi), gamma31);
        intensity_from_rabi(omega, mu).unwrap_or(f64::NAN)
    });
    CouplingMap::new(grid, intensity, PatternKind::AzimuthalRamp)
}

/// Closed-form binary transmission of the forked grating: the square wave
/// whose Fourier series is `1/2 + (2/π) Σ sin((2k+1)θ)/(2k+1)` with
/// `θ = −lφ + (2π/D)·r·cosφ`.
pub fn fork_transmission(r: f64, phi: f64, l: i32, period: f64) -> f64 {
    let theta = fork_argument(r, phi, l, period);
    if theta.sin() > 0.0 {
        1.0
    } else {
        0.0
    }
}

pub fn fork_argument(r: f64, phi: f64, l: i32, period: f64) -> f64 {
    -f64::from(l) * phi + (2.0 * PI / period) * r * phi.cos()
}

pub fn fork_grating(grid: GridSpec, l: i32, period: f64, bright: f64) -> Result<CouplingMap> {
    grid.validate()?;
    if !(period >= 4.0 * grid.max_pitch()) {
        return Err(EitError::Unresolved(format!(
            "grating period {period:e} m is below 4 samples ({:e} m)",
            4.0 * grid.max_pitch()
        )));
    }
    if !(bright >= 0.0) {
        return Err(EitError::Domain(format!(
            "bright intensity must be >= 0, got {bright}"
        )));
    }
    let intensity = sample_grid(&grid, |ix, iy| {
        let (r, phi) = grid.polar(ix, iy);
        fork_transmission(r, phi, l, period) * bright
    });
    CouplingMap::new(grid, intensity, PatternKind::Fork)
}

/// Arbitrary on/off image: `true` pixels get `bright`.
pub fn binary_mask(grid: GridSpec, mask: &Array2<bool>, bright: f64) -> Result<CouplingMap> {
    if mask.dim() != grid.shape() {
        return Err(EitError::GridMismatch(format!(
            "mask {:?} vs grid {:?}",
            mask.dim(),
            grid.shape()
        )));
    }
    CouplingMap::new(
        grid,
        mask.mapv(|m| if m { bright } else { 0.0 }),
        PatternKind::BinaryMask,
    )
}
