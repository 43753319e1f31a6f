//! Switching-speed estimates for reprogramming the coupling pattern.
//!
//! After a switch, dark states must re-form at every pixel (τ_r ≈ αdγ₃₁/Ω²,
//! with αd from the old pattern and Ω from the new one), and the coupling must
//! change slowly enough to stay adiabatic (τ_a = γ₃₁/Ω²).

use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::cell::{pixel_susceptibility, CellMode};
use crate::constants::rabi_from_intensity;
use crate::error::{EitError, Result};
use crate::medium::{self, AtomicParams};
use crate::patterns::CouplingMap;

/// Modulation must be this many times slower than the slowest internal timescale.
pub const FEASIBILITY_FACTOR: f64 = 10.0;
/// Peak Ω_after, in units of γ₃₁, used for the nominal-coupling estimate.
pub const NOMINAL_OMEGA_OVER_GAMMA: f64 = 10.0;

pub fn re_establishment_time(alpha_d: f64, gamma31: f64, omega_after: f64) -> Result<f64> {
    if !(alpha_d >= 0.0) || !(gamma31 > 0.0) || !(omega_after >= 0.0) {
        return Err(EitError::Domain(format!(
            "need αd >= 0, γ31 > 0, Ω >= 0; got {alpha_d}, {gamma31}, {omega_after}"
        )));
    }
    if alpha_d == 0.0 {
        return Ok(0.0);
    }
    if omega_after == 0.0 {
        return Err(EitError::Infeasible(
            "no coupling after the switch at an absorbing pixel".into(),
        ));
    }
    Ok(alpha_d * gamma31 / (omega_after * omega_after))
}

pub fn adiabatic_time(gamma31: f64, omega: f64) -> Result<f64> {
    if !(gamma31 > 0.0) || !(omega >= 0.0) {
        return Err(EitError::Domain(format!(
            "need γ31 > 0, Ω >= 0; got {gamma31}, {omega}"
        )));
    }
    if omega == 0.0 {
        return Err(EitError::Infeasible(
            "adiabatic time diverges at Ω = 0".into(),
        ));
    }
    Ok(gamma31 / (omega * omega))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Off-resonant EIT phase screen; dark pixels follow the full Λ response.
    Phase,
    /// Resonant amplitude mask; dark pixels absorb as two-level atoms.
    Amplitude,
}

impl Scheme {
    pub fn cell_mode(self) -> CellMode {
        match self {
            Scheme::Phase => CellMode::Eit,
            Scheme::Amplitude => CellMode::ResonantTwoLevel,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Phase => "phase",
            Scheme::Amplitude => "amplitude",
        }
    }
}

/// Same estimate with the post-switch couplings rescaled to a given peak Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NominalTimes {
    pub omega: f64,
    pub tau_r: f64,
    pub tau_a: f64,
    pub rate_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingReport {
    pub scheme: Scheme,
    pub tau_r: f64,
    pub tau_a: f64,
    /// (ix, iy) of the largest τ_r.
    pub limiting_pixel: (usize, usize),
    pub alpha_d_max: f64,
    /// Peak post-switch Rabi frequency, rad/s.
    pub omega_after: f64,
    /// Hz; zero when infeasible.
    pub rate_bound: f64,
    pub feasible: bool,
    pub nominal: NominalTimes,
}

fn rate_bound(tau_r: f64, tau_a: f64) -> f64 {
    let t = tau_r.max(tau_a);
    if t.is_finite() && t > 0.0 {
        1.0 / (FEASIBILITY_FACTOR * t)
    } else {
        0.0
    }
}

/// Per-pixel optical depth αd of `map` through a cell of thickness `d`.
pub fn optical_depth_map(
    map: &CouplingMap,
    atomic: &AtomicParams,
    d: f64,
    mode: CellMode,
) -> Result<Array2<f64>> {
    let results = Zip::from(&map.intensity).par_map_collect(|&i| {
        pixel_susceptibility(i, atomic, mode)
            .and_then(|chi| medium::absorption_coefficient(chi, atomic.lambda))
            .map(|a| a * d)
    });
    let mut out = Array2::<f64>::zeros(map.intensity.dim());
    for (o, r) in out.iter_mut().zip(results) {
        *o = r?;
    }
    Ok(out)
}

/// Worst-case switching times for going from `before` to `after`.
pub fn switching_report(
    before: &CouplingMap,
    after: &CouplingMap,
    atomic: &AtomicParams,
    d: f64,
    scheme: Scheme,
) -> Result<SwitchingReport> {
    switching_report_with_nominal(
        before,
        after,
        atomic,
        d,
        scheme,
        NOMINAL_OMEGA_OVER_GAMMA * atomic.gamma31,
    )
}

pub fn switching_report_with_nominal(
    before: &CouplingMap,
    after: &CouplingMap,
    atomic: &AtomicParams,
    d: f64,
    scheme: Scheme,
    nominal_omega: f64,
) -> Result<SwitchingReport> {
    before.grid.ensure_matches(&after.grid)?;
    atomic.validate()?;
    if !(d > 0.0) {
        return Err(EitError::Domain(format!(
            "cell thickness must be > 0, got {d}"
        )));
    }
    let gamma = atomic.gamma31;
    let alpha_d = optical_depth_map(before, atomic, d, scheme.cell_mode())?;
    let omega = after.rabi_map(atomic.mu23)?;

    let mut tau_r = 0.0;
    let mut limiting = (0, 0);
    let mut feasible = true;
    let mut omega_min_lit = f64::INFINITY;
    let mut omega_max = 0.0f64;
    for ((iy, ix), &ad) in alpha_d.indexed_iter() {
        let om = omega[[iy, ix]];
        omega_max = omega_max.max(om);
        if om > 0.0 {
            omega_min_lit = omega_min_lit.min(om);
        }
        let t = match re_establishment_time(ad, gamma, om) {
            Ok(t) => t,
            Err(EitError::Infeasible(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        if t > tau_r || (t == f64::INFINITY && feasible) {
            if t == f64::INFINITY {
                feasible = false;
            }
            tau_r = t;
            limiting = (ix, iy);
        }
    }
    let tau_a = if omega_min_lit.is_finite() {
        adiabatic_time(gamma, omega_min_lit)?
    } else {
        feasible = false;
        f64::INFINITY
    };
    let rate = if feasible {
        rate_bound(tau_r, tau_a)
    } else {
        0.0
    };

    let nominal = if omega_max > 0.0 && nominal_omega > 0.0 {
        let s2 = (omega_max / nominal_omega).powi(2);
        let (nr, na) = (tau_r * s2, tau_a * s2);
        NominalTimes {
            omega: nominal_omega,
            tau_r: nr,
            tau_a: na,
            rate_bound: if feasible { rate_bound(nr, na) } else { 0.0 },
        }
    } else {
        NominalTimes {
            omega: nominal_omega,
            tau_r,
            tau_a,
            rate_bound: 0.0,
        }
    };

    Ok(SwitchingReport {
        scheme,
        tau_r,
        tau_a,
        limiting_pixel: limiting,
        alpha_d_max: alpha_d.iter().copied().fold(0.0, f64::max),
        omega_after: omega_max,
        rate_bound: rate,
        feasible,
        nominal,
    })
}

impl SwitchingReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scheme {}", self.scheme.as_str());
        let _ = writeln!(s, "feasible {}", self.feasible);
        let _ = writeln!(s, "tau_r_s {:.6e}", self.tau_r);
        let _ = writeln!(s, "tau_a_s {:.6e}", self.tau_a);
        let _ = writeln!(s, "rate_bound_hz {:.6e}", self.rate_bound);
        let _ = writeln!(
            s,
            "limiting_pixel {} {}",
            self.limiting_pixel.0, self.limiting_pixel.1
        );
        let _ = writeln!(s, "alpha_d_max {:.6e}", self.alpha_d_max);
        let _ = writeln!(s, "omega_after_rad_s {:.6e}", self.omega_after);
        let _ = writeln!(s, "nominal_omega_rad_s {:.6e}", self.nominal.omega);
        let _ = writeln!(s, "nominal_tau_r_s {:.6e}", self.nominal.tau_r);
        let _ = writeln!(s, "nominal_tau_a_s {:.6e}", self.nominal.tau_a);
        let _ = writeln!(s, "nominal_rate_bound_hz {:.6e}", self.nominal.rate_bound);
        s
    }

    /// (convention, omega, tau_r, tau_a, rate_bound) rows.
    pub fn rows(&self) -> [(&'static str, f64, f64, f64, f64); 2] {
        [
            (
                "literal",
                self.omega_after,
                self.tau_r,
                self.tau_a,
                self.rate_bound,
            ),
            (
                "nominal",
                self.nominal.omega,
                self.nominal.tau_r,
                self.nominal.tau_a,
                self.nominal.rate_bound,
            ),
        ]
    }
}

/// Rabi frequency of a uniform coupling intensity on the coupling transition.
pub fn uniform_rabi(intensity: f64, atomic: &AtomicParams) -> Result<f64> {
    rabi_from_intensity(intensity, atomic.mu23)
}
