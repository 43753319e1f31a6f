//! Probe sources (Gaussian, Laguerre–Gaussian) and Fraunhofer propagation.
//!
//! The far field is the continuous 2-D Fourier integral evaluated as a
//! Riemann sum on a centered frequency grid,
//!
//! ```text
//! F(fx, fy) = Σ E(x, y) · exp(+i2π(fx·x + fy·y)) · dx·dy
//! ```
//!
//! so that `Σ|F|²·dfx·dfy = Σ|E|²·dx·dy` holds exactly. Frequencies are in
//! 1/m; an observation plane at distance z (or a lens of focal length z)
//! sees the pattern at `x_far = λ·z·fx`. With this kernel sign the +n
//! diffraction order of a fork grating, at `fx = +n/D`, carries winding +n·l.

use ndarray::{s, Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};
use std::f64::consts::PI;

pub use crate::cell::ComplexField;
use crate::error::{EitError, Result};
use crate::grid::GridSpec;

pub const DEFAULT_PADDING: usize = 2;
pub const ORACLE_PROBE_LIMIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FarField {
    /// Frequency grid (1/m), zero frequency at index `n/2`.
    pub grid: GridSpec,
    pub amplitude: Array2<Complex64>,
    pub lambda: f64,
    /// The (padded) spatial grid the transform was taken over.
    pub spatial: GridSpec,
}

impl FarField {
    pub fn power(&self) -> f64 {
        self.amplitude.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn fx(&self, k: usize) -> f64 {
        self.grid.x(k)
    }

    pub fn fy(&self, k: usize) -> f64 {
        self.grid.y(k)
    }

    /// View the spectrum as a field on the frequency grid, for the analysis
    /// routines that take a [`ComplexField`].
    pub fn as_field(&self) -> ComplexField {
        ComplexField {
            grid: self.grid,
            amplitude: self.amplitude.clone(),
            lambda: self.lambda,
        }
    }
}

fn check_beam(grid: &GridSpec, waist: f64) -> Result<()> {
    grid.validate()?;
    if !(waist > 4.0 * grid.max_pitch()) {
        return Err(EitError::BeamSampling(format!(
            "waist {waist:e} m spans fewer than 4 samples (pitch {:e} m)",
            grid.max_pitch()
        )));
    }
    let r_edge = ((grid.nx / 2 - 1) as f64 * grid.dx).min((grid.ny / 2 - 1) as f64 * grid.dy);
    let edge = (-(r_edge * r_edge) / (waist * waist)).exp();
    if edge >= 1e-6 {
        return Err(EitError::BeamSampling(format!(
            "edge amplitude {edge:e} of peak; enlarge the grid or shrink the waist"
        )));
    }
    Ok(())
}

/// `exp(−r²/w²)`, unit peak, flat phase.
pub fn gaussian_source(grid: GridSpec, waist: f64, lambda: f64) -> Result<ComplexField> {
    check_beam(&grid, waist)?;
    let amplitude = crate::patterns::sample_grid(&grid, |ix, iy| {
        let (x, y) = grid.offset(ix, iy);
        Complex64::new((-(x * x + y * y) / (waist * waist)).exp(), 0.0)
    });
    ComplexField::new(grid, amplitude, lambda)
}

/// Generalized Laguerre polynomial L_p^α(x), by the three-term recurrence.
pub fn laguerre(p: u32, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if p == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..p {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|k| f64::from(k).ln()).sum()
}

/// Radial part of the unit-power LG_p^l mode, so that
/// `LG(r, φ) = lg_radial(p, l, w, r) · e^{ilφ}`.
pub fn lg_radial(p: u32, l: i32, waist: f64, r: f64) -> f64 {
    let al = l.unsigned_abs();
    let norm = (2.0 / PI).sqrt() / waist * (0.5 * (ln_factorial(p) - ln_factorial(p + al))).exp();
    let rho = 2.0 * r * r / (waist * waist);
    let radial = if al == 0 {
        1.0
    } else {
        rho.sqrt().powi(al as i32)
    };
    norm * radial * laguerre(p, f64::from(al), rho) * (-(r * r) / (waist * waist)).exp()
}

/// Laguerre–Gaussian mode normalized to unit power (continuous norm).
pub fn lg_source(grid: GridSpec, p: u32, l: i32, waist: f64, lambda: f64) -> Result<ComplexField> {
    check_beam(&grid, waist)?;
    let amplitude = crate::patterns::sample_grid(&grid, |ix, iy| {
        let (r, phi) = grid.polar(ix, iy);
        Complex64::from_polar(1.0, f64::from(l) * phi) * lg_radial(p, l, waist, r)
    });
    ComplexField::new(grid, amplitude, lambda)
}

/// Embed `field` in a zero grid `factor` times larger, keeping the center.
pub fn pad(field: &ComplexField, factor: usize) -> Result<ComplexField> {
    if factor == 0 {
        return Err(EitError::Domain("padding factor must be >= 1".into()));
    }
    if factor == 1 {
        return Ok(field.clone());
    }
    let g = field.grid;
    let padded = GridSpec {
        nx: g.nx * factor,
        ny: g.ny * factor,
        ..g
    };
    let mut amp = Array2::zeros(padded.shape());
    let (ox, oy) = ((padded.nx - g.nx) / 2, (padded.ny - g.ny) / 2);
    amp.slice_mut(s![oy..oy + g.ny, ox..ox + g.nx])
        .assign(&field.amplitude);
    ComplexField::new(padded, amp, field.lambda)
}

/// `F_k = pitch · Σ_j E_j · e^{+i2π f_k x_j}` along every row, with
/// `x_j = c + (j − n/2)·pitch` and `f_k = (k − n/2)/(n·pitch)`.
///
/// Expanding the exponent leaves an unnormalized inverse DFT of the
/// (−1)^j-modulated row, times (−1)^k·(−1)^{n/2}·e^{i2π f_k c}.
fn forward_rows(data: &mut Array2<Complex64>, pitch: f64, center: f64) {
    let n = data.ncols();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft(n, FftDirection::Inverse);
    let df = 1.0 / (n as f64 * pitch);
    let half = (n / 2) as f64;
    let global = if (n / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let post: Vec<Complex64> = (0..n)
        .map(|k| {
            let alt = if k % 2 == 0 { 1.0 } else { -1.0 };
            let f = (k as f64 - half) * df;
            Complex64::from_polar(pitch * alt * global, 2.0 * PI * f * center)
        })
        .collect();
    data.axis_iter_mut(Axis(0)).into_par_iter().for_each_init(
        || vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()],
        |scratch, mut row| {
            let mut buf: Vec<Complex64> = row
                .iter()
                .enumerate()
                .map(|(j, v)| if j % 2 == 0 { *v } else { -*v })
                .collect();
            fft.process_with_scratch(&mut buf, scratch);
            for ((dst, v), p) in row.iter_mut().zip(buf).zip(&post) {
                *dst = v * p;
            }
        },
    );
}

fn transform_2d(data: &Array2<Complex64>, grid: &GridSpec) -> Array2<Complex64> {
    let mut rows = data.to_owned();
    forward_rows(&mut rows, grid.dx, grid.center.0);
    let mut cols = rows.t().as_standard_layout().into_owned();
    forward_rows(&mut cols, grid.dy, grid.center.1);
    cols.t().as_standard_layout().into_owned()
}

/// Fraunhofer pattern of `field` after zero-padding by `padding`.
pub fn far_field(field: &ComplexField, padding: usize) -> Result<FarField> {
    let power = field.power();
    if !(power > 0.0) || !power.is_finite() {
        return Err(EitError::ZeroField);
    }
    let padded = pad(field, padding)?;
    let sg = padded.grid;
    let amplitude = transform_2d(&padded.amplitude, &sg);
    let grid = GridSpec {
        nx: sg.nx,
        ny: sg.ny,
        dx: 1.0 / (sg.nx as f64 * sg.dx),
        dy: 1.0 / (sg.ny as f64 * sg.dy),
        center: (0.0, 0.0),
    };
    Ok(FarField {
        grid,
        amplitude,
        lambda: field.lambda,
        spatial: sg,
    })
}

/// Back to the (padded) spatial grid the far field was computed from.
pub fn inverse_far_field(far: &FarField) -> Result<ComplexField> {
    let sg = far.spatial;
    let mut rows = far.amplitude.to_owned();
    inverse_rows(&mut rows, far.grid.dx, sg.center.0);
    let mut cols = rows.t().as_standard_layout().into_owned();
    inverse_rows(&mut cols, far.grid.dy, sg.center.1);
    let amplitude = cols.t().as_standard_layout().into_owned();
    ComplexField::new(sg, amplitude, far.lambda)
}

/// `E_j = df · Σ_k F_k · e^{−i2π f_k x_j}` with `x_j = c + (j − n/2)/(n·df)`.
fn inverse_rows(data: &mut Array2<Complex64>, df: f64, center: f64) {
    let n = data.ncols();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft(n, FftDirection::Forward);
    let half = (n / 2) as f64;
    let global = if (n / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    // Phase from the grid center lives on the input (frequency) side.
    let pre: Vec<Complex64> = (0..n)
        .map(|k| {
            let alt = if k % 2 == 0 { 1.0 } else { -1.0 };
            let f = (k as f64 - half) * df;
            Complex64::from_polar(alt, -2.0 * PI * f * center)
        })
        .collect();
    let post: Vec<Complex64> = (0..n)
        .map(|j| {
            let alt = if j % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(alt * global * df, 0.0)
        })
        .collect();
    data.axis_iter_mut(Axis(0)).into_par_iter().for_each_init(
        || vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()],
        |scratch, mut row| {
            let mut buf: Vec<Complex64> = row.iter().zip(&pre).map(|(v, p)| v * p).collect();
            fft.process_with_scratch(&mut buf, scratch);
            for ((dst, v), p) in row.iter_mut().zip(buf).zip(&post) {
                *dst = v * p;
            }
        },
    );
}

/// Direct Riemann summation of the far-field integral at arbitrary
/// frequencies. Quadratic cost; used to validate [`far_field`].
pub fn far_field_oracle(field: &ComplexField, probes: &[(f64, f64)]) -> Result<Vec<Complex64>> {
    if probes.len() > ORACLE_PROBE_LIMIT {
        return Err(EitError::TooManyProbes(probes.len()));
    }
    let g = field.grid;
    let xs: Vec<f64> = (0..g.nx).map(|i| g.x(i)).collect();
    let ys: Vec<f64> = (0..g.ny).map(|i| g.y(i)).collect();
    let area = g.cell_area();
    Ok(probes
        .par_iter()
        .map(|&(fx, fy)| {
            let ex: Vec<Complex64> = xs
                .iter()
                .map(|x| Complex64::from_polar(1.0, 2.0 * PI * fx * x))
                .collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for (iy, row) in field.amplitude.axis_iter(Axis(0)).enumerate() {
                let ey = Complex64::from_polar(1.0, 2.0 * PI * fy * ys[iy]);
                let inner: Complex64 = row.iter().zip(&ex).map(|(e, k)| e * k).sum();
                acc += inner * ey;
            }
            acc * area
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_field(n: usize, seed: u64) -> ComplexField {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let grid = GridSpec::square(n, 1e-5).unwrap().with_center(3e-6, -7e-6);
        let amp = Array2::from_shape_fn(grid.shape(), |_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        ComplexField::new(grid, amp, 780e-9).unwrap()
    }

    #[test]
    fn laguerre_low_orders() {
        let x = 0.7;
        assert_eq!(laguerre(0, 2.0, x), 1.0);
        assert!((laguerre(1, 2.0, x) - (3.0 - x)).abs() < 1e-15);
        let l2 = 0.5 * (x * x - 2.0 * (2.0 + 2.0) * x + (2.0 + 1.0) * (2.0 + 2.0));
        assert!((laguerre(2, 2.0, x) - l2).abs() < 1e-14);
    }

    #[test]
    fn gaussian_definition_and_power() {
        let grid = GridSpec::square(256, 5e-6).unwrap();
        let w = 120e-6;
        let g = gaussian_source(grid, w, 780e-9).unwrap();
        assert_eq!(g.amplitude[[128, 128]], Complex64::new(1.0, 0.0));
        // Sample 24 pixels from center is exactly one waist.
        assert!((g.amplitude[[128, 152]].re - (-1f64).exp()).abs() < 1e-15);
        let analytic = PI * w * w / 2.0;
        assert!((g.power() / analytic - 1.0).abs() < 1e-3);
    }

    #[test]
    fn beam_sampling_errors() {
        let grid = GridSpec::square(64, 10e-6).unwrap();
        assert!(matches!(
            gaussian_source(grid, 30e-6, 780e-9),
            Err(EitError::BeamSampling(_))
        ));
        assert!(matches!(
            gaussian_source(grid, 200e-6, 780e-9),
            Err(EitError::BeamSampling(_))
        ));
        assert!(lg_source(grid, 0, 1, 200e-6, 780e-9).is_err());
    }

    #[test]
    fn lg_modes() {
        let grid = GridSpec::square(256, 4e-6).unwrap();
        let w = 100e-6;
        let g = gaussian_source(grid, w, 780e-9).unwrap();
        let lg00 = lg_source(grid, 0, 0, w, 780e-9).unwrap();
        let k = lg00.amplitude[[128, 128]].re;
        for (a, b) in g.amplitude.iter().zip(lg00.amplitude.iter()) {
            assert!((a * k - b).norm() < 1e-12 * k);
        }
        let lg01 = lg_source(grid, 0, 1, w, 780e-9).unwrap();
        assert_eq!(lg01.amplitude[[128, 128]].norm(), 0.0);
        let lg02 = lg_source(grid, 0, 2, w, 780e-9).unwrap();
        assert!(lg01.inner(&lg02).unwrap().norm() < 1e-6);
        for (p, l) in [(0, 1), (1, -1), (2, 3)] {
            let m = lg_source(grid, p, l, w, 780e-9).unwrap();
            assert!((m.power() - 1.0).abs() < 1e-6, "p={p} l={l}: {}", m.power());
        }
        let lg11 = lg_source(grid, 1, 1, w, 780e-9).unwrap();
        assert!(lg01.inner(&lg11).unwrap().norm() < 1e-6);
    }

    #[test]
    fn oracle_matches_fft_bin_for_bin() {
        let f = random_field(32, 11);
        let far = far_field(&f, 1).unwrap();
        let probes: Vec<(f64, f64)> = (0..far.grid.ny)
            .flat_map(|iy| (0..far.grid.nx).map(move |ix| (ix, iy)))
            .map(|(ix, iy)| (far.fx(ix), far.fy(iy)))
            .collect();
        let direct = far_field_oracle(&f, &probes).unwrap();
        let num: f64 = far
            .amplitude
            .iter()
            .zip(&direct)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = direct.iter().map(|b| b.norm_sqr()).sum();
        assert!((num / den).sqrt() < 1e-10);
    }

    #[test]
    fn padded_transform_matches_oracle() {
        let f = random_field(16, 5);
        let far = far_field(&f, 2).unwrap();
        assert_eq!(far.grid.nx, 32);
        let probes: Vec<(f64, f64)> = (0..32)
            .flat_map(|iy| (0..32).map(move |ix| (ix, iy)))
            .map(|(ix, iy)| (far.fx(ix), far.fy(iy)))
            .collect();
        let direct = far_field_oracle(&f, &probes).unwrap();
        for (a, b) in far.amplitude.iter().zip(&direct) {
            assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn parseval_and_inverse() {
        let f = random_field(64, 3);
        for pad in [1, 2] {
            let far = far_field(&f, pad).unwrap();
            assert!((far.power() / f.power() - 1.0).abs() < 1e-12);
        }
        let far = far_field(&f, 1).unwrap();
        let back = inverse_far_field(&far).unwrap();
        let num: f64 = back
            .amplitude
            .iter()
            .zip(&f.amplitude)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = f.amplitude.iter().map(|b| b.norm_sqr()).sum();
        assert!((num / den).sqrt() < 1e-12);
        assert_eq!(back.grid, f.grid);
    }

    #[test]
    fn uniform_field_goes_to_dc() {
        let grid = GridSpec::square(32, 1e-5).unwrap();
        let f = ComplexField::new(
            grid,
            Array2::from_elem(grid.shape(), Complex64::new(1.0, 0.0)),
            780e-9,
        )
        .unwrap();
        let far = far_field(&f, 1).unwrap();
        let dc = far.amplitude[[16, 16]].norm_sqr() * far.grid.cell_area();
        assert!((dc / far.power() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_fourier_pair() {
        let grid = GridSpec::square(256, 5e-6).unwrap();
        let w = 100e-6;
        let g = gaussian_source(grid, w, 780e-9).unwrap();
        let far = far_field(&g, 2).unwrap();
        // FT of exp(−r²/w²) is πw²·exp(−π²w²ρ²): waist 1/(πw).
        let peak = far.amplitude[[256, 256]];
        assert!((peak.re / (PI * w * w) - 1.0).abs() < 1e-6);
        let wf = 1.0 / (PI * w);
        let k = (wf / far.grid.dx).round() as usize;
        let rho = k as f64 * far.grid.dx;
        let expect = PI * w * w * (-(PI * w * rho).powi(2)).exp();
        assert!((far.amplitude[[256, 256 + k]].norm() / expect - 1.0).abs() < 0.01);
    }

    #[test]
    fn vortex_has_dark_center_in_far_field() {
        let grid = GridSpec::square(128, 5e-6).unwrap();
        let g = gaussian_source(grid, 60e-6, 780e-9).unwrap();
        let mut v = g.clone();
        for ((iy, ix), e) in v.amplitude.indexed_iter_mut() {
            let (r, phi) = grid.polar(ix, iy);
            *e *= if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(1.0, phi)
            };
        }
        let far = far_field(&v, 2).unwrap();
        let peak = far.amplitude.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(far.amplitude[[128, 128]].norm() < 1e-3 * peak);
    }

    #[test]
    fn oracle_single_pixel_and_shift() {
        let grid = GridSpec::square(16, 1e-5).unwrap();
        let mut f = ComplexField::zeros(grid, 780e-9).unwrap();
        f.amplitude[[8, 11]] = Complex64::new(1.0, 0.0);
        let probes = [(0.0, 0.0), (1e3, 2e3), (-4e3, 7e2), (3.3e4, -1.2e4)];
        let vals = far_field_oracle(&f, &probes).unwrap();
        let x0 = grid.x(11);
        for (v, (fx, _)) in vals.iter().zip(probes) {
            assert!((v.norm() - grid.cell_area()).abs() < 1e-20);
            // Shift theorem with this module's kernel sign.
            let expect = Complex64::from_polar(grid.cell_area(), 2.0 * PI * fx * x0);
            assert!((v - expect).norm() < 1e-12 * grid.cell_area());
        }
        let too_many = vec![(0.0, 0.0); ORACLE_PROBE_LIMIT + 1];
        assert!(matches!(
            far_field_oracle(&f, &too_many),
            Err(EitError::TooManyProbes(_))
        ));
        assert!(matches!(
            far_field(&f.scaled(Complex64::new(0.0, 0.0)), 1),
            Err(EitError::ZeroField)
        ));
    }

    #[test]
    fn rotation_by_quarter_turn_permutes_far_field() {
        let n = 32;
        let mut f = random_field(n, 9);
        f.grid.center = (0.0, 0.0);
        f.amplitude.row_mut(0).fill(Complex64::new(0.0, 0.0));
        f.amplitude.column_mut(0).fill(Complex64::new(0.0, 0.0));
        // (x, y) → (−y, x): new[iy', ix'] = old at the pre-image.
        let mut rot = f.clone();
        for iy in 0..n {
            for ix in 0..n {
                // Source of rotated pixel (ix, iy): x_src = y, y_src = −x.
                let (sx, sy) = (iy as isize - 16, -(ix as isize - 16));
                let (jx, jy) = ((sx + 16) as usize, (sy + 16) as usize);
                rot.amplitude[[iy, ix]] = if jx < n && jy < n {
                    f.amplitude[[jy, jx]]
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
        }
        let a = far_field(&f, 1).unwrap();
        let b = far_field(&rot, 1).unwrap();
        let scale = a.amplitude.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for ky in 1..n {
            for kx in 1..n {
                let (sx, sy) = (ky as isize - 16, -(kx as isize - 16));
                let (jx, jy) = ((sx + 16) as usize, (sy + 16) as usize);
                if jx >= n || jy >= n || jx == 0 || jy == 0 {
                    continue;
                }
                assert!((b.amplitude[[ky, kx]] - a.amplitude[[jy, jx]]).norm() < 1e-12 * scale);
            }
        }
    }
}
