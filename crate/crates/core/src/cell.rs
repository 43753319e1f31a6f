//! Thin vapor-cell transfer: per-pixel susceptibility from a coupling map,
//! turned into a multiplicative phase/attenuation screen for the probe.
//!
//! The cell is treated as a single thin element. Only the χ-induced phase
//! `(2π/λ)(Re n − 1)·d` is kept; the vacuum `e^{i2πd/λ}` factor is common to
//! every pixel and dropped.

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::rabi_from_intensity;
use crate::error::{EitError, Result};
use crate::grid::{wrap_phase, GridSpec};
use crate::medium::{self, AtomicParams, Susceptibility};
use crate::patterns::{sample_grid, CouplingMap};

/// Sampled complex probe envelope, indexed `[iy, ix]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: GridSpec,
    pub amplitude: Array2<Complex64>,
    /// Wavelength, m.
    pub lambda: f64,
}

impl ComplexField {
    pub fn new(grid: GridSpec, amplitude: Array2<Complex64>, lambda: f64) -> Result<Self> {
        grid.validate()?;
        if amplitude.dim() != grid.shape() {
            return Err(EitError::GridMismatch(format!(
                "amplitude array {:?} vs grid {:?}",
                amplitude.dim(),
                grid.shape()
            )));
        }
        if !(lambda > 0.0) {
            return Err(EitError::Domain(format!(
                "wavelength must be > 0, got {lambda}"
            )));
        }
        Ok(Self {
            grid,
            amplitude,
            lambda,
        })
    }

    pub fn zeros(grid: GridSpec, lambda: f64) -> Result<Self> {
        Self::new(grid, Array2::zeros(grid.shape()), lambda)
    }

    /// Σ|E|²·dx·dy.
    pub fn power(&self) -> f64 {
        self.amplitude.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn peak_amplitude(&self) -> f64 {
        self.amplitude.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        Self {
            amplitude: self.amplitude.mapv(|z| z * k),
            ..self.clone()
        }
    }

    /// ⟨self, other⟩ = Σ conj(self)·other·dx·dy.
    pub fn inner(&self, other: &ComplexField) -> Result<Complex64> {
        self.grid.ensure_matches(&other.grid)?;
        let s: Complex64 = self
            .amplitude
            .iter()
            .zip(other.amplitude.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.cell_area())
    }

    /// Bilinear interpolation at a physical point; zero outside the grid.
    pub fn sample(&self, x: f64, y: f64) -> Complex64 {
        let (fx, fy) = self.grid.index_of(x, y);
        let (ix, iy) = (fx.floor(), fy.floor());
        if ix < 0.0 || iy < 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let (ix, iy) = (ix as usize, iy as usize);
        if ix + 1 >= self.grid.nx || iy + 1 >= self.grid.ny {
            return Complex64::new(0.0, 0.0);
        }
        let (tx, ty) = (fx - ix as f64, fy - iy as f64);
        let a = &self.amplitude;
        a[[iy, ix]] * ((1.0 - tx) * (1.0 - ty))
            + a[[iy, ix + 1]] * (tx * (1.0 - ty))
            + a[[iy + 1, ix]] * ((1.0 - tx) * ty)
            + a[[iy + 1, ix + 1]] * (tx * ty)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellMode {
    /// Closed-form Λ response everywhere; dark pixels on resonance fall back
    /// to the two-level form.
    #[default]
    Eit,
    /// Dark pixels always use the two-level resonant absorption.
    ResonantTwoLevel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellTransfer {
    pub grid: GridSpec,
    /// Extra phase, wrapped to (−π, π].
    pub phase: Array2<f64>,
    /// Amplitude factor e^{−αd/2}.
    pub attenuation: Array2<f64>,
    /// Cell thickness, m.
    pub d: f64,
}

impl CellTransfer {
    pub fn identity(grid: GridSpec, d: f64) -> Self {
        Self {
            grid,
            phase: Array2::zeros(grid.shape()),
            attenuation: Array2::ones(grid.shape()),
            d,
        }
    }

    /// Per-pixel power transmission.
    pub fn transmission(&self) -> Array2<f64> {
        self.attenuation.mapv(|a| a * a)
    }
}

/// Susceptibility seen by the probe at one pixel of coupling intensity `intensity`.
pub fn pixel_susceptibility(
    intensity: f64,
    atomic: &AtomicParams,
    mode: CellMode,
) -> Result<Susceptibility> {
    let omega = rabi_from_intensity(intensity, atomic.mu23)?;
    let two_level = omega == 0.0
        && match mode {
            CellMode::Eit => atomic.delta == 0.0,
            CellMode::ResonantTwoLevel => true,
        };
    if two_level {
        medium::resonant_absorption(atomic)
    } else {
        medium::susceptibility(atomic, omega)
    }
}

/// Unwrapped χ-induced phase `(2π/λ)(Re √(1+χ) − 1)·d`.
pub fn extra_phase(chi: Susceptibility, lambda: f64, d: f64) -> Result<f64> {
    let n = medium::refractive_index(chi)?;
    Ok(2.0 * PI / lambda * (n.re - 1.0) * d)
}

pub fn build_transfer(
    map: &CouplingMap,
    atomic: &AtomicParams,
    d: f64,
    mode: CellMode,
) -> Result<CellTransfer> {
    atomic.validate()?;
    if !(d > 0.0) || !d.is_finite() {
        return Err(EitError::Domain(format!(
            "cell thickness must be > 0, got {d}"
        )));
    }
    let lambda = atomic.lambda;
    // (phase, attenuation, |χ|); NaN marks a pixel whose evaluation failed.
    let per_pixel = sample_grid(&map.grid, |ix, iy| {
        let chi = match pixel_susceptibility(map.intensity[[iy, ix]], atomic, mode) {
            Ok(c) => c,
            Err(_) => return (f64::NAN, f64::NAN, f64::NAN),
        };
        let mag = chi.magnitude();
        if mag >= 1.0 {
            return (0.0, 0.0, mag);
        }
        let phase = extra_phase(chi, lambda, d).unwrap_or(f64::NAN);
        let alpha = medium::absorption_coefficient(chi, lambda).unwrap_or(f64::NAN);
        (wrap_phase(phase), (-0.5 * alpha * d).exp(), mag)
    });

    for ((iy, ix), &(phase, _, mag)) in per_pixel.indexed_iter() {
        if mag >= 1.0 {
            return Err(EitError::OutOfRegime {
                ix,
                iy,
                magnitude: mag,
            });
        }
        if !phase.is_finite() {
            // Re-run the failing pixel to surface its actual error.
            pixel_susceptibility(map.intensity[[iy, ix]], atomic, mode)?;
            return Err(EitError::Domain(format!(
                "non-finite phase at pixel ({ix}, {iy})"
            )));
        }
    }
    Ok(CellTransfer {
        grid: map.grid,
        phase: per_pixel.mapv(|p| p.0),
        attenuation: per_pixel.mapv(|p| p.1),
        d,
    })
}

/// E_out = E_in · attenuation · e^{i·phase}.
pub fn apply_transfer(field: &ComplexField, transfer: &CellTransfer) -> Result<ComplexField> {
    field.grid.ensure_matches(&transfer.grid)?;
    let mut out = field.amplitude.clone();
    Zip::from(&mut out)
        .and(&transfer.phase)
        .and(&transfer.attenuation)
        .for_each(|e, &phase, &att| *e *= Complex64::from_polar(att, phase));
    Ok(ComplexField {
        grid: field.grid,
        amplitude: out,
        lambda: field.lambda,
    })
}
