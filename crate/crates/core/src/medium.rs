//! Linear probe response of a three-level Λ system under a coupling field.
//!
//! The closed-form susceptibility (weak probe, no Doppler averaging) is the
//! single canonical evaluation used by every other module. The strong-coupling
//! limit and the first-order index expansion are kept only as cross-checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::{EPSILON0, HBAR};
use crate::error::{EitError, Result};

/// Above this magnitude the dilute-medium approximations start to lose meaning.
pub const DILUTE_WARNING_THRESHOLD: f64 = 0.1;

/// Transmission floor used by [`solve_cell_thickness`] to flag lossy designs.
pub const DEFAULT_TRANSMISSION_FLOOR: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomicParams {
    /// Decay rate |3⟩ → |1⟩, 1/s.
    pub gamma31: f64,
    /// Ground-state decoherence |1⟩ ↔ |2⟩, 1/s.
    pub gamma21: f64,
    /// Probe transition dipole, C·m.
    pub mu13: f64,
    /// Coupling transition dipole, C·m.
    pub mu23: f64,
    /// Number density, 1/m³.
    pub rho: f64,
    /// Single-photon detuning Δ = ω32 − ωc, rad/s.
    pub delta: f64,
    /// Probe wavelength, m.
    pub lambda: f64,
}

impl AtomicParams {
    /// Three sublevels of the ⁸⁷Rb D2 line at ϱ = 5×10¹² cm⁻³, Δ = −0.2 γ31.
    pub fn rb87_d2() -> Self {
        let gamma31 = 38.11e6;
        Self {
            gamma31,
            gamma21: 2.0 * PI * 3000.0,
            mu13: 3.58e-29,
            mu23: 3.58e-29,
            rho: 5e18,
            delta: -0.2 * gamma31,
            lambda: 780e-9,
        }
    }

    /// The resonant amplitude-modulation configuration: Δ = 0, ϱ = 10¹¹ cm⁻³.
    pub fn rb87_d2_resonant() -> Self {
        Self {
            delta: 0.0,
            rho: 1e17,
            ..Self::rb87_d2()
        }
    }

    pub fn with_rho(self, rho: f64) -> Self {
        Self { rho, ..self }
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self { delta, ..self }
    }

    pub fn with_gamma21(self, gamma21: f64) -> Self {
        Self { gamma21, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.gamma31 > 0.0, "gamma31 must be > 0"),
            (self.gamma21 >= 0.0, "gamma21 must be >= 0"),
            (self.mu13 > 0.0, "mu13 must be > 0"),
            (self.mu23 > 0.0, "mu23 must be > 0"),
            (self.rho > 0.0, "rho must be > 0"),
            (self.lambda > 0.0, "lambda must be > 0"),
            (self.delta.is_finite(), "delta must be finite"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(EitError::Domain(msg.into()));
            }
        }
        Ok(())
    }

    /// |μ13|²ϱ/(ε₀ħ), in 1/s.
    fn prefactor(&self) -> f64 {
        self.mu13 * self.mu13 * self.rho / (EPSILON0 * HBAR)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Susceptibility {
    pub chi_re: f64,
    pub chi_im: f64,
}

impl Susceptibility {
    pub const ZERO: Self = Self {
        chi_re: 0.0,
        chi_im: 0.0,
    };

    pub fn new(chi_re: f64, chi_im: f64) -> Self {
        Self { chi_re, chi_im }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.chi_re, self.chi_im)
    }

    pub fn magnitude(&self) -> f64 {
        self.as_complex().norm()
    }

    pub fn is_dilute(&self) -> bool {
        self.chi_re.abs() < DILUTE_WARNING_THRESHOLD && self.chi_im.abs() < DILUTE_WARNING_THRESHOLD
    }

    pub fn refractive_index(&self) -> Result<Complex64> {
        refractive_index(*self)
    }

    pub fn absorption_coefficient(&self, lambda: f64) -> Result<f64> {
        absorption_coefficient(*self, lambda)
    }

    /// Power transmission through thickness `d`.
    pub fn transmission(&self, lambda: f64, d: f64) -> Result<f64> {
        transmission(self.absorption_coefficient(lambda)?, d)
    }
}

/// Probe susceptibility for coupling Rabi frequency `omega_c` (rad/s).
pub fn susceptibility(params: &AtomicParams, omega_c: f64) -> Result<Susceptibility> {
    if !(omega_c >= 0.0) || !omega_c.is_finite() {
        return Err(EitError::Domain(format!(
            "omega_c must be >= 0, got {omega_c}"
        )));
    }
    let AtomicParams {
        gamma31: g31,
        gamma21: g21,
        delta,
        ..
    } = *params;
    let w2 = omega_c * omega_c;
    let num_re = -4.0 * delta * w2;
    let num_im = 8.0 * delta * delta * g31 + 2.0 * g21 * (w2 + g21 * g31);
    let den = Complex64::new(w2 + g31 * g21, -2.0 * g31 * delta).norm_sqr();
    if den == 0.0 {
        if omega_c == 0.0 && delta == 0.0 && g21 == 0.0 && g31 > 0.0 {
            // Ω_c = Δ = γ21 = 0: the two-level resonant limit.
            return resonant_absorption(params);
        }
        return Err(EitError::Singular);
    }
    let k = params.prefactor() / den;
    let chi = Susceptibility::new(k * num_re, k * num_im);
    if !chi.is_dilute() {
        log::warn!("|χ| components exceed {DILUTE_WARNING_THRESHOLD}: {chi:?}");
    }
    Ok(chi)
}

/// Two-level resonant absorption (no coupling, Δ = 0): χ″ = 2μ²ϱ/(ε₀ħγ31).
pub fn resonant_absorption(params: &AtomicParams) -> Result<Susceptibility> {
    params.validate()?;
    Ok(Susceptibility::new(
        0.0,
        2.0 * params.prefactor() / params.gamma31,
    ))
}

/// Exact complex index √(1+χ), principal branch. The familiar
/// `1 + χ′/2 + iχ″/2` is its first-order expansion, see [`linearized_index`].
pub fn refractive_index(chi: Susceptibility) -> Result<Complex64> {
    let z = chi.as_complex();
    if z.norm() >= 1.0 {
        return Err(EitError::OutOfRegime {
            ix: 0,
            iy: 0,
            magnitude: z.norm(),
        });
    }
    Ok((Complex64::new(1.0, 0.0) + z).sqrt())
}

pub fn linearized_index(chi: Susceptibility) -> Complex64 {
    Complex64::new(1.0 + 0.5 * chi.chi_re, 0.5 * chi.chi_im)
}

/// Intensity absorption coefficient α = 2πχ″/λ, 1/m.
pub fn absorption_coefficient(chi: Susceptibility, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(EitError::Domain(format!(
            "wavelength must be > 0, got {lambda}"
        )));
    }
    Ok(2.0 * PI * chi.chi_im / lambda)
}

/// Beer–Lambert power transmission e^{−αd}.
pub fn transmission(alpha: f64, d: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !(d >= 0.0) {
        return Err(EitError::Domain(format!(
            "need alpha >= 0 and d >= 0, got {alpha}, {d}"
        )));
    }
    Ok((-alpha * d).exp())
}

/// Large-Ω_c form of the dispersion, χ′ ≈ −4Δμ²ϱ/(ε₀ħΩ_c²).
pub fn strong_coupling_chi_re(params: &AtomicParams, omega_c: f64) -> f64 {
    -4.0 * params.delta * params.prefactor() / (omega_c * omega_c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThicknessSolution {
    /// Cell thickness, m.
    pub thickness: f64,
    /// χ′ at the strong (φ = 0) and weak (φ = 2π) ends of the ramp.
    pub chi_at_0: Susceptibility,
    pub chi_at_2pi: Susceptibility,
    /// Smaller of the two endpoint power transmissions at `thickness`.
    pub worst_transmission: f64,
    /// Set when `worst_transmission` is below the requested floor.
    pub below_floor: bool,
}

/// Thickness giving a phase difference of `delta_l`·2π between the two ends
/// of a coupling ramp: `[χ′(2π) − χ′(0)]·d = 2·Δl·λ`.
pub fn solve_cell_thickness(
    params: &AtomicParams,
    omega_at_0: f64,
    omega_at_2pi: f64,
    delta_l: i32,
) -> Result<ThicknessSolution> {
    solve_cell_thickness_with_floor(
        params,
        omega_at_0,
        omega_at_2pi,
        delta_l,
        DEFAULT_TRANSMISSION_FLOOR,
    )
}

pub fn solve_cell_thickness_with_floor(
    params: &AtomicParams,
    omega_at_0: f64,
    omega_at_2pi: f64,
    delta_l: i32,
    floor: f64,
) -> Result<ThicknessSolution> {
    params.validate()?;
    if delta_l == 0 {
        return Err(EitError::NoSolution("delta_l must be nonzero".into()));
    }
    let chi_at_0 = susceptibility(params, omega_at_0)?;
    let chi_at_2pi = susceptibility(params, omega_at_2pi)?;
    let contrast = chi_at_2pi.chi_re - chi_at_0.chi_re;
    if contrast == 0.0 || !contrast.is_finite() {
        return Err(EitError::NoSolution(
            "zero phase contrast between ramp ends".into(),
        ));
    }
    let thickness = 2.0 * f64::from(delta_l) * params.lambda / contrast;
    if !(thickness > 0.0) {
        return Err(EitError::NoSolution(format!(
            "contrast {contrast:e} has the wrong sign for delta_l = {delta_l}"
        )));
    }
    let worst_transmission = chi_at_0
        .transmission(params.lambda, thickness)?
        .min(chi_at_2pi.transmission(params.lambda, thickness)?);
    let below_floor = worst_transmission < floor;
    if below_floor {
        log::warn!("cell thickness {thickness:e} m transmits only {worst_transmission:.3}");
    }
    Ok(ThicknessSolution {
        thickness,
        chi_at_0,
        chi_at_2pi,
        worst_transmission,
        below_floor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ramp_omegas(p: &AtomicParams) -> (f64, f64) {
        let o0 = 500f64.sqrt() * p.gamma31;
        let o2 = (500.0 / (2.0 * PI + 1.0)).sqrt() * p.gamma31;
        (o0, o2)
    }

    #[test]
    fn resonant_limit_matches_published_value() {
        let p = AtomicParams::rb87_d2_resonant().with_gamma21(0.0);
        let chi = susceptibility(&p, 0.0).unwrap();
        assert_eq!(chi.chi_re, 0.0);
        assert!((chi.chi_im / 0.0072 - 1.0).abs() < 0.02, "{chi:?}");
        let direct = resonant_absorption(&p).unwrap();
        assert_eq!(chi, direct);
    }

    #[test]
    fn zero_coupling_on_resonance_is_independent_of_decoherence() {
        // With Ω_c = Δ = 0 the γ21 factors cancel.
        let p = AtomicParams::rb87_d2_resonant();
        let a = susceptibility(&p, 0.0).unwrap();
        let b = resonant_absorption(&p).unwrap();
        assert!((a.chi_im / b.chi_im - 1.0).abs() < 1e-12);
        assert_eq!(a.chi_re, 0.0);
    }

    #[test]
    fn ideal_dark_state_is_exactly_transparent() {
        let p = AtomicParams::rb87_d2().with_delta(0.0).with_gamma21(0.0);
        for omega in [1.0, 1e6, 8.5e8, 1e11] {
            assert_eq!(susceptibility(&p, omega).unwrap(), Susceptibility::ZERO);
        }
    }

    #[test]
    fn dispersion_at_strong_end_of_ramp() {
        // Frozen from a direct evaluation of the closed form (2.8813e-4).
        let p = AtomicParams::rb87_d2();
        let chi = susceptibility(&p, 500f64.sqrt() * p.gamma31).unwrap();
        assert!((chi.chi_re - 2.8813e-4).abs() < 1e-7, "{chi:?}");
        let limit = strong_coupling_chi_re(&p, 500f64.sqrt() * p.gamma31);
        assert!((limit / chi.chi_re - 1.0).abs() < 1e-3);
    }

    #[test]
    fn singular_denominator() {
        let p = AtomicParams {
            gamma31: 0.0,
            gamma21: 0.0,
            delta: 0.0,
            ..AtomicParams::rb87_d2()
        };
        assert!(matches!(susceptibility(&p, 0.0), Err(EitError::Singular)));
        assert!(susceptibility(&AtomicParams::rb87_d2(), -1.0).is_err());
    }

    #[test]
    fn refractive_index_cases() {
        assert_eq!(
            refractive_index(Susceptibility::ZERO).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        let n = refractive_index(Susceptibility::new(0.0, 0.0072)).unwrap();
        let lin = linearized_index(Susceptibility::new(0.0, 0.0072));
        assert!((n - lin).norm() < 1e-5);
        assert!((n.im - 0.0036).abs() < 1e-5);
        let n = refractive_index(Susceptibility::new(2.1e-3, 0.0)).unwrap();
        assert!((n.re - 1.00105).abs() < 1e-6);
        assert!(matches!(
            refractive_index(Susceptibility::new(1.0, 0.0)),
            Err(EitError::OutOfRegime { .. })
        ));
    }

    #[test]
    fn absorption_and_transmission() {
        let alpha = absorption_coefficient(Susceptibility::new(0.0, 0.0072), 780e-9).unwrap();
        assert!((alpha / 5.80e4 - 1.0).abs() < 0.01);
        assert!((alpha * 500e-6 / 29.0 - 1.0).abs() < 0.01);
        assert_eq!(
            absorption_coefficient(Susceptibility::ZERO, 780e-9).unwrap(),
            0.0
        );
        let a2 = absorption_coefficient(Susceptibility::new(0.0, 0.0144), 780e-9).unwrap();
        assert!((a2 / alpha - 2.0).abs() < 1e-12);
        assert!(absorption_coefficient(Susceptibility::ZERO, 0.0).is_err());

        let t = transmission(29.0, 1.0).unwrap();
        assert!((t / 2.5e-13 - 1.0).abs() < 0.03, "{t}");
        assert_eq!(transmission(123.0, 0.0).unwrap(), 1.0);
        assert!(transmission(-1.0, 1.0).is_err());
    }

    #[test]
    fn resonant_absorption_scales_with_density() {
        let base = AtomicParams::rb87_d2_resonant();
        let chi = resonant_absorption(&base).unwrap().chi_im;
        let dense = resonant_absorption(&base.with_rho(5e18)).unwrap().chi_im;
        assert!((dense / chi - 50.0).abs() < 1e-9);
        assert!((dense - 0.36).abs() < 0.01);
        let thin = resonant_absorption(&base.with_rho(1e-30)).unwrap().chi_im;
        assert!(thin < 1e-40);
    }

    #[test]
    fn thickness_for_first_order_vortex() {
        let p = AtomicParams::rb87_d2();
        let (o0, o2) = ramp_omegas(&p);
        let sol = solve_cell_thickness(&p, o0, o2, 1).unwrap();
        assert!(
            (sol.thickness / 862e-6 - 1.0).abs() < 0.03,
            "{}",
            sol.thickness
        );
        assert!(sol.worst_transmission > 0.9 && !sol.below_floor);

        let two = solve_cell_thickness(&p, o0, o2, 2).unwrap();
        assert!((two.thickness / sol.thickness - 2.0).abs() < 1e-12);

        let dense = solve_cell_thickness(&p.with_rho(2.0 * p.rho), o0, o2, 1).unwrap();
        assert!((dense.thickness / sol.thickness - 0.5).abs() < 1e-12);
    }

    #[test]
    fn thickness_errors_and_floor_flag() {
        let p = AtomicParams::rb87_d2();
        let (o0, o2) = ramp_omegas(&p);
        assert!(matches!(
            solve_cell_thickness(&p, o0, o0, 1),
            Err(EitError::NoSolution(_))
        ));
        assert!(matches!(
            solve_cell_thickness(&p, o0, o2, 0),
            Err(EitError::NoSolution(_))
        ));
        assert!(matches!(
            solve_cell_thickness(&p, o0, o2, -1),
            Err(EitError::NoSolution(_))
        ));
        let lossy = solve_cell_thickness_with_floor(&p, o0, o2, 1, 0.99).unwrap();
        assert!(lossy.below_floor);
    }

    fn physical_params() -> impl Strategy<Value = AtomicParams> {
        (
            1e6f64..1e8,
            0.0f64..1e5,
            1e-30f64..1e-28,
            1e14f64..1e19,
            -5.0f64..5.0,
        )
            .prop_map(|(g31, g21, mu, rho, dfrac)| AtomicParams {
                gamma31: g31,
                gamma21: g21,
                mu13: mu,
                mu23: mu,
                rho,
                delta: dfrac * g31,
                lambda: 780e-9,
            })
    }

    proptest! {
        #[test]
        fn passive_medium(p in physical_params(), w in 0.0f64..50.0) {
            let chi = susceptibility(&p, w * p.gamma31).unwrap();
            prop_assert!(chi.chi_im >= 0.0);
        }

        #[test]
        fn linear_in_density(p in physical_params(), w in 0.1f64..50.0, k in 0.01f64..100.0) {
            let a = susceptibility(&p, w * p.gamma31).unwrap();
            let b = susceptibility(&p.with_rho(k * p.rho), w * p.gamma31).unwrap();
            prop_assert!((b.chi_re - k * a.chi_re).abs() <= 1e-12 * (k * a.chi_re).abs() + 1e-300);
            prop_assert!((b.chi_im - k * a.chi_im).abs() <= 1e-12 * (k * a.chi_im).abs() + 1e-300);
        }

        #[test]
        fn dark_state_zero(p in physical_params(), w in 1e-3f64..1e3) {
            let p = p.with_delta(0.0).with_gamma21(0.0);
            prop_assert_eq!(susceptibility(&p, w * p.gamma31).unwrap(), Susceptibility::ZERO);
        }

        #[test]
        fn strong_coupling_asymptotics(
            p in physical_params(),
            dfrac in prop_oneof![-3.0f64..-0.05, 0.05f64..3.0],
            scale in 10.0f64..100.0,
        ) {
            let p = p.with_delta(dfrac * p.gamma31).with_gamma21(1e-3 * p.gamma31);
            let omega = scale * p.gamma31.max(p.delta.abs());
            let chi = susceptibility(&p, omega).unwrap();
            let limit = strong_coupling_chi_re(&p, omega);
            prop_assert!(((chi.chi_re - limit) / chi.chi_re).abs() < 0.02);
            // χ″·Ω_c² stays bounded by its Ω_c → ∞ value, 2γ21·μ²ϱ/(ε₀ħ), plus
            // the Δ² contribution.
            let bound = p.prefactor() * (2.0 * p.gamma21 + 8.0 * p.delta * p.delta * p.gamma31 / (omega * omega)) * 1.05;
            prop_assert!(chi.chi_im * omega * omega <= bound);
        }

        #[test]
        fn dispersion_increases_along_ramp(phi_a in 0.0f64..6.2, dphi in 1e-3f64..1.0) {
            let p = AtomicParams::rb87_d2();
            let phi_b = (phi_a + dphi).min(2.0 * PI);
            let omega = |phi: f64| (500.0 / (phi + 1.0)).sqrt() * p.gamma31;
            let a = susceptibility(&p, omega(phi_a)).unwrap().chi_re;
            let b = susceptibility(&p, omega(phi_b)).unwrap().chi_re;
            prop_assume!(phi_b > phi_a);
            prop_assert!(b > a);
        }
    }
}
