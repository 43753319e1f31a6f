//! Beam diagnostics: topological charge, azimuthal-harmonic (OAM) spectrum,
//! Laguerre–Gaussian modal weights, diffraction-order isolation and cell
//! transmission statistics.
//!
//! The modal routines resample the Cartesian field onto polar rings about
//! the grid center (bilinear interpolation, four samples per pixel of
//! circumference on the outermost ring) and integrate radially with the
//! trapezoidal rule.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::cell::{CellTransfer, ComplexField};
use crate::error::{EitError, Result};
use crate::grid::{wrap_phase, GridSpec};
use crate::optics::{lg_radial, FarField};

/// Relative amplitude below which the phase on a circle is considered undefined.
pub const DEFAULT_AMPLITUDE_FLOOR: f64 = 1e-6;
const MIN_CIRCLE_SAMPLES: usize = 64;
const ANGULAR_OVERSAMPLING: f64 = 4.0;

fn circle_samples(radius: f64, pitch: f64) -> usize {
    let n = (ANGULAR_OVERSAMPLING * 2.0 * PI * radius / pitch).ceil() as usize;
    n.max(MIN_CIRCLE_SAMPLES)
}

/// Net phase winding of `field` on a circle of `radius` about the grid center.
pub fn winding_number(field: &ComplexField, radius: f64) -> Result<i32> {
    winding_number_with_floor(field, radius, DEFAULT_AMPLITUDE_FLOOR)
}

pub fn winding_number_with_floor(field: &ComplexField, radius: f64, floor: f64) -> Result<i32> {
    let g = field.grid;
    if !(radius > 0.0) || radius > g.inscribed_radius() {
        return Err(EitError::Domain(format!(
            "circle radius {radius:e} is not inside the grid (max {:e})",
            g.inscribed_radius()
        )));
    }
    let threshold = floor * field.peak_amplitude();
    let n = circle_samples(radius, g.dx.min(g.dy));
    let samples: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            field.sample(g.center.0 + radius * t.cos(), g.center.1 + radius * t.sin())
        })
        .collect();
    if let Some(weak) = samples.iter().map(|z| z.norm()).find(|a| !(*a > threshold)) {
        return Err(EitError::AmplitudeFloor {
            radius,
            amplitude: weak,
            floor: threshold,
        });
    }
    let total: f64 = (0..n)
        .map(|k| wrap_phase(samples[(k + 1) % n].arg() - samples[k].arg()))
        .sum();
    Ok((total / (2.0 * PI)).round() as i32)
}

/// Azimuthal Fourier coefficients of a field on concentric rings.
#[derive(Debug, Clone)]
pub struct PolarSamples {
    pub radii: Vec<f64>,
    /// Trapezoidal weights `w_k` for ∫ f(r) r dr ≈ Σ w_k f(r_k).
    pub weights: Vec<f64>,
    pub n_angles: usize,
    /// `coeffs[k][m mod n_angles]` = (1/2π)∮E(r_k, φ)e^{−imφ}dφ.
    coeffs: Vec<Vec<Complex64>>,
    /// ∫∫|E|² r dr dφ by the same quadrature.
    pub total_power: f64,
}

impl PolarSamples {
    pub fn new(field: &ComplexField) -> Self {
        let g = field.grid;
        let dr = g.dx.min(g.dy);
        let r_max = g.inscribed_radius();
        let rings = (r_max / dr).floor() as usize;
        let radii: Vec<f64> = (0..=rings).map(|k| k as f64 * dr).collect();
        let mut weights: Vec<f64> = radii.iter().map(|r| r * dr).collect();
        if let Some(last) = weights.last_mut() {
            *last *= 0.5;
        }
        let mut n_angles = circle_samples(r_max, dr);
        n_angles += n_angles % 2;
        let fft = FftPlanner::<f64>::new().plan_fft_forward(n_angles);
        let coeffs: Vec<Vec<Complex64>> = radii
            .par_iter()
            .map(|&r| {
                let mut ring: Vec<Complex64> = (0..n_angles)
                    .map(|j| {
                        let t = 2.0 * PI * j as f64 / n_angles as f64;
                        field.sample(g.center.0 + r * t.cos(), g.center.1 + r * t.sin())
                    })
                    .collect();
                fft.process(&mut ring);
                let inv = 1.0 / n_angles as f64;
                ring.iter_mut().for_each(|c| *c *= inv);
                ring
            })
            .collect();
        let total_power = coeffs
            .iter()
            .zip(&weights)
            .map(|(c, w)| w * 2.0 * PI * c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        Self {
            radii,
            weights,
            n_angles,
            coeffs,
            total_power,
        }
    }

    pub fn coefficient(&self, ring: usize, m: i32) -> Complex64 {
        let idx = (m as i64).rem_euclid(self.n_angles as i64) as usize;
        self.coeffs[ring][idx]
    }

    /// Un-normalized power in harmonic m.
    pub fn harmonic_power(&self, m: i32) -> f64 {
        (0..self.radii.len())
            .map(|k| self.weights[k] * 2.0 * PI * self.coefficient(k, m).norm_sqr())
            .sum()
    }

    /// ⟨LG_p^l(waist), E⟩ via the radial overlap with the l-th harmonic.
    pub fn lg_overlap(&self, p: u32, l: i32, waist: f64) -> Complex64 {
        (0..self.radii.len())
            .map(|k| {
                self.coefficient(k, l)
                    * (self.weights[k] * 2.0 * PI * lg_radial(p, l, waist, self.radii[k]))
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OamSpectrum {
    /// (m, fraction of power), m ascending.
    pub harmonics: Vec<(i32, f64)>,
    /// Fraction of the grid's Cartesian power inside the resampled disc.
    pub captured: f64,
}

impl OamSpectrum {
    pub fn get(&self, m: i32) -> f64 {
        self.harmonics
            .iter()
            .find(|(k, _)| *k == m)
            .map_or(0.0, |(_, p)| *p)
    }

    pub fn total(&self) -> f64 {
        self.harmonics.iter().map(|(_, p)| p).sum()
    }

    pub fn dominant(&self) -> Option<(i32, f64)> {
        self.harmonics
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Power fraction per azimuthal harmonic m ∈ [−n, n].
pub fn oam_spectrum(field: &ComplexField, n_harmonics: u32) -> Result<OamSpectrum> {
    let cart = field.power();
    if !(cart > 0.0) {
        return Err(EitError::ZeroField);
    }
    let polar = PolarSamples::new(field);
    if !(polar.total_power > 0.0) {
        return Err(EitError::ZeroField);
    }
    let n = n_harmonics as i32;
    let harmonics = (-n..=n)
        .map(|m| (m, polar.harmonic_power(m) / polar.total_power))
        .collect();
    Ok(OamSpectrum {
        harmonics,
        captured: polar.total_power / cart,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WaistFit {
    #[default]
    Fixed,
    /// Golden-section search for the basis waist maximizing Σ weights,
    /// bracketed within a factor of 4 of the given waist.
    Optimize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LgSpectrum {
    pub weights: BTreeMap<(u32, i32), f64>,
    pub waist_used: f64,
    pub residual: f64,
}

impl LgSpectrum {
    pub fn weight(&self, p: u32, l: i32) -> f64 {
        self.weights.get(&(p, l)).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }
}

fn lg_weights(
    polar: &PolarSamples,
    waist: f64,
    p_max: u32,
    l_max: u32,
) -> BTreeMap<(u32, i32), f64> {
    let l_max = l_max as i32;
    let mut out = BTreeMap::new();
    for l in -l_max..=l_max {
        for p in 0..=p_max {
            let c = polar.lg_overlap(p, l, waist);
            out.insert((p, l), c.norm_sqr() / polar.total_power);
        }
    }
    out
}

pub fn lg_decompose(
    field: &ComplexField,
    waist: f64,
    p_max: u32,
    l_max: u32,
    fit: WaistFit,
) -> Result<LgSpectrum> {
    if !(waist > 0.0) {
        return Err(EitError::Domain(format!(
            "basis waist must be > 0, got {waist}"
        )));
    }
    if !(field.power() > 0.0) {
        return Err(EitError::ZeroField);
    }
    let polar = PolarSamples::new(field);
    if !(polar.total_power > 0.0) {
        return Err(EitError::ZeroField);
    }
    let score = |w: f64| lg_weights(&polar, w, p_max, l_max).values().sum::<f64>();
    let waist_used = match fit {
        WaistFit::Fixed => waist,
        WaistFit::Optimize => golden_max(score, waist / 4.0, waist * 4.0, 1e-9 * waist),
    };
    let weights = lg_weights(&polar, waist_used, p_max, l_max);
    let residual = 1.0 - weights.values().sum::<f64>();
    Ok(LgSpectrum {
        weights,
        waist_used,
        residual,
    })
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        }
    }
    0.5 * (lo + hi)
}

/// A single diffraction order cut out of a far field.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderExtract {
    pub order: i32,
    /// Window center, 1/m.
    pub center_frequency: (f64, f64),
    pub window_radius: f64,
    /// Power in the window over power in the window plus its local
    /// surroundings (the rest of this order's strip |fx − fc| ≤ R out to
    /// 2R from the center).
    pub containment: f64,
    /// Windowed patch, re-centered so the order sits at the grid center.
    pub field: ComplexField,
}

impl OrderExtract {
    /// Winding number on the ring of peak azimuthally-averaged intensity.
    pub fn winding(&self) -> Result<i32> {
        let r = peak_ring_radius(&self.field, 0.8 * self.window_radius)?;
        winding_number(&self.field, r)
    }
}

/// Radius (≥ 2 samples, ≤ `r_max`) of the brightest ring about the grid center.
pub fn peak_ring_radius(field: &ComplexField, r_max: f64) -> Result<f64> {
    let g = field.grid;
    let dr = g.dx.min(g.dy);
    let r_max = r_max.min(g.inscribed_radius());
    let mut best = (f64::NEG_INFINITY, 0.0);
    let mut r = 2.0 * dr;
    while r <= r_max {
        let n = circle_samples(r, dr);
        let mean: f64 = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                field
                    .sample(g.center.0 + r * t.cos(), g.center.1 + r * t.sin())
                    .norm_sqr()
            })
            .sum::<f64>()
            / n as f64;
        if mean > best.0 {
            best = (mean, r);
        }
        r += 0.5 * dr;
    }
    if best.0 > 0.0 {
        Ok(best.1)
    } else {
        Err(EitError::ZeroField)
    }
}

/// Isolate order `order` of a grating of period `grating_period` (m).
pub fn extract_order(far: &FarField, grating_period: f64, order: i32) -> Result<OrderExtract> {
    if !(grating_period > 0.0) {
        return Err(EitError::Domain("grating period must be > 0".into()));
    }
    let g = far.grid;
    let fc = f64::from(order) / grating_period;
    let radius = 0.5 / grating_period;
    let (kx, ky) = g.index_of(fc, 0.0);
    let (kx, ky) = (kx.round() as isize, ky.round() as isize);
    let half = ((radius / g.dx).max(radius / g.dy).ceil() as isize + 1).max(4);
    let (x0, y0) = (kx - half, ky - half);
    if x0 < 0 || y0 < 0 || kx + half > g.nx as isize || ky + half > g.ny as isize {
        return Err(EitError::WindowOutOfGrid(format!(
            "order {order} at {fc:e} 1/m with radius {radius:e} 1/m leaves the frequency grid \
             (|f| ≤ {:e})",
            g.x(g.nx - 1)
        )));
    }
    let center = (g.x(kx as usize), g.y(ky as usize));
    let m = (2 * half) as usize;
    let mut patch = Array2::<Complex64>::zeros((m, m));
    let mut inside = 0.0;
    let mut around = 0.0;
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let (dfx, dfy) = (g.x(ix) - center.0, g.y(iy) - center.1);
            if dfx.abs() > radius || dfy.abs() > 2.0 * radius {
                continue;
            }
            let p = far.amplitude[[iy, ix]].norm_sqr();
            let rho = dfx.hypot(dfy);
            if rho <= radius {
                inside += p;
                let (px, py) = (ix as isize - x0, iy as isize - y0);
                if (0..m as isize).contains(&px) && (0..m as isize).contains(&py) {
                    patch[[py as usize, px as usize]] = far.amplitude[[iy, ix]];
                }
            } else if rho <= 2.0 * radius {
                around += p;
            }
        }
    }
    if !(inside > 0.0) {
        return Err(EitError::ZeroField);
    }
    let containment = inside / (inside + around);
    if containment < 0.95 {
        return Err(EitError::PoorIsolation(containment));
    }
    let grid = GridSpec {
        nx: m,
        ny: m,
        dx: g.dx,
        dy: g.dy,
        center: (0.0, 0.0),
    };
    Ok(OrderExtract {
        order,
        center_frequency: center,
        window_radius: radius,
        containment,
        field: ComplexField::new(grid, patch, far.lambda)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Statistics of the per-pixel power transmission attenuation².
pub fn transmission_stats(transfer: &CellTransfer) -> TransmissionStats {
    let t = transfer.transmission();
    let n = t.len() as f64;
    TransmissionStats {
        min: t.iter().copied().fold(f64::INFINITY, f64::min),
        max: t.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean: t.sum() / n,
    }
}
