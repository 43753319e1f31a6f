//! Configuration-driven end-to-end run: pattern → cell → probe → far field →
//! analysis, with every artifact recorded in a checksum manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use crate::analysis::{
    extract_order, lg_decompose, oam_spectrum, transmission_stats, winding_number, WaistFit,
};
use crate::cell::{apply_transfer, build_transfer, extra_phase, pixel_susceptibility};
use crate::config::{PatternKindConfig, PipelineConfig, ProbeMode, Request, Thickness};
use crate::constants::intensity_from_rabi;
use crate::constants::units::{m_to_um, mw_per_cm2_to_si, si_to_mw_per_cm2, um_to_m};
use crate::dynamics::switching_report;
use crate::error::Result;
use crate::io::{key_values, write_csv, write_csv_records, write_png, FieldGridFile, Manifest};
use crate::medium::{solve_cell_thickness_with_floor, transmission};
use crate::optics::{far_field, gaussian_source, lg_source};
use crate::patterns::{azimuthal_ramp, fork_grating, uniform, CouplingMap};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSummary {
    pub output_dir: PathBuf,
    pub manifest: PathBuf,
    /// `key value` results also written to `analysis.txt`.
    pub results: Vec<(String, String)>,
}

impl PipelineSummary {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.results
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

fn push(out: &mut Vec<(String, String)>, key: impl Into<String>, value: impl ToString) {
    out.push((key.into(), value.to_string()));
}

fn build_pattern(cfg: &PipelineConfig) -> Result<CouplingMap> {
    let grid = cfg.grid()?;
    let atomic = cfg.atomic();
    match cfg.pattern.kind {
        PatternKindConfig::Uniform => uniform(grid, cfg.pattern_intensity()),
        PatternKindConfig::Ramp => azimuthal_ramp(grid, cfg.ramp(), &atomic),
        PatternKindConfig::Fork => fork_grating(
            grid,
            cfg.pattern.charge,
            cfg.pattern.period_px * grid.dx,
            cfg.pattern_intensity(),
        ),
    }
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineSummary> {
    cfg.validate()?;
    let dir = cfg.output.dir.clone();
    fs::create_dir_all(&dir)?;
    let mut manifest = Manifest::new(&dir);
    let mut results = Vec::new();
    let atomic = cfg.atomic();
    let mode = cfg.cell_mode();

    log::info!("pattern");
    let map = build_pattern(cfg)?;
    let grid = map.grid;
    let mut echo = cfg.clone();
    echo.output.dir = PathBuf::from(".");
    manifest.write_bytes("config.toml", echo.to_toml()?.as_bytes())?;
    manifest.write_bytes(
        "pattern_intensity.eitf",
        &FieldGridFile::from_map(&map).to_bytes(),
    )?;

    log::info!("cell");
    let d = match cfg.cell.thickness {
        Thickness::Micrometres(d) => um_to_m(d),
        Thickness::Solve(_) => {
            let (o0, o2) = cfg.ramp().endpoint_rabi(atomic.gamma31);
            let s = solve_cell_thickness_with_floor(
                &atomic,
                o0,
                o2,
                cfg.cell.delta_l,
                cfg.cell.transmission_floor,
            )?;
            push(&mut results, "thickness_below_floor", s.below_floor);
            s.thickness
        }
    };
    push(
        &mut results,
        "cell_thickness_um",
        format!("{:.6}", m_to_um(d)),
    );
    let transfer = build_transfer(&map, &atomic, d, mode)?;
    manifest.write_bytes(
        "transfer_phase.eitf",
        &FieldGridFile::from_real(&grid, &transfer.phase).to_bytes(),
    )?;
    manifest.write_bytes(
        "transfer_attenuation.eitf",
        &FieldGridFile::from_real(&grid, &transfer.attenuation).to_bytes(),
    )?;

    log::info!("probe");
    let waist = cfg.waist();
    let probe = match cfg.probe.mode {
        ProbeMode::Gaussian => gaussian_source(grid, waist, atomic.lambda)?,
        ProbeMode::Lg => lg_source(grid, cfg.probe.p, cfg.probe.l, waist, atomic.lambda)?,
    };
    let out = apply_transfer(&probe, &transfer)?;
    manifest.write_bytes(
        "field_out.eitf",
        &FieldGridFile::from_field(&out).to_bytes(),
    )?;
    push(&mut results, "power_in", format!("{:.9e}", probe.power()));
    push(&mut results, "power_out", format!("{:.9e}", out.power()));

    let far = if cfg.far_field.enabled {
        log::info!("far field");
        let far = far_field(&out, cfg.far_field.padding)?;
        manifest.write_bytes(
            "far_field.eitf",
            &FieldGridFile::from_far_field(&far).to_bytes(),
        )?;
        Some(far)
    } else {
        None
    };

    if cfg.output.png {
        write_png(&manifest.path("pattern.png"), &map.intensity)?;
        manifest.record("pattern.png")?;
        write_png(&manifest.path("phase.png"), &transfer.phase)?;
        manifest.record("phase.png")?;
        write_png(
            &manifest.path("field_out.png"),
            &out.amplitude.mapv(|z| z.norm_sqr()),
        )?;
        manifest.record("field_out.png")?;
        if let Some(far) = &far {
            write_png(
                &manifest.path("far_field.png"),
                &far.amplitude.mapv(|z| z.norm()),
            )?;
            manifest.record("far_field.png")?;
        }
    }

    let mut requests = cfg.analysis.requests.clone();
    requests.sort();
    requests.dedup();
    for req in requests {
        log::info!("analysis {req:?}");
        match req {
            Request::Profile => {
                let ramp = cfg.ramp();
                let n = cfg.analysis.profile_points.max(2);
                let mut rows = Vec::with_capacity(n);
                let phase0 = {
                    let i0 = intensity_from_rabi(ramp.rabi_at(0.0, atomic.gamma31), atomic.mu23)?;
                    extra_phase(pixel_susceptibility(i0, &atomic, mode)?, atomic.lambda, d)?
                };
                for k in 0..n {
                    // Sample [0, 2π) so the last row sits just before the seam.
                    let phi = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    let i = intensity_from_rabi(ramp.rabi_at(phi, atomic.gamma31), atomic.mu23)?;
                    let chi = pixel_susceptibility(i, &atomic, mode)?;
                    let t = transmission(chi.absorption_coefficient(atomic.lambda)?, d)?;
                    let ph = extra_phase(chi, atomic.lambda, d)? - phase0;
                    rows.push(vec![
                        phi,
                        si_to_mw_per_cm2(i),
                        t,
                        chi.chi_re,
                        chi.chi_im,
                        ph,
                    ]);
                }
                write_csv(
                    &manifest.path("profile.csv"),
                    &[
                        "phi_rad",
                        "intensity_mw_cm2",
                        "transmission",
                        "chi_re",
                        "chi_im",
                        "phase_rad",
                    ],
                    &rows,
                )?;
                manifest.record("profile.csv")?;
            }
            Request::Transmission => {
                let s = transmission_stats(&transfer);
                push(&mut results, "transmission_min", format!("{:.9e}", s.min));
                push(&mut results, "transmission_max", format!("{:.9e}", s.max));
                push(&mut results, "transmission_mean", format!("{:.9e}", s.mean));
            }
            Request::Winding => {
                for &rw in &cfg.analysis.winding_radii {
                    let key = format!("winding_r{rw}w");
                    match winding_number(&out, rw * waist) {
                        Ok(w) => push(&mut results, key, w),
                        Err(e) => push(&mut results, key, format!("error: {e}")),
                    }
                }
            }
            Request::Oam => {
                let s = oam_spectrum(&out, cfg.analysis.oam_harmonics)?;
                let rows: Vec<Vec<f64>> = s
                    .harmonics
                    .iter()
                    .map(|(m, p)| vec![f64::from(*m), *p])
                    .collect();
                write_csv(&manifest.path("oam.csv"), &["m", "power_fraction"], &rows)?;
                manifest.record("oam.csv")?;
                for (m, p) in &s.harmonics {
                    push(&mut results, format!("oam_p{m}"), format!("{p:.9e}"));
                }
                if let Some((m, _)) = s.dominant() {
                    push(&mut results, "oam_dominant", m);
                }
                push(&mut results, "oam_captured", format!("{:.9e}", s.captured));
            }
            Request::Lg => {
                let fit = if cfg.analysis.lg_optimize_waist {
                    WaistFit::Optimize
                } else {
                    WaistFit::Fixed
                };
                let s = lg_decompose(
                    &out,
                    waist,
                    cfg.analysis.lg_p_max,
                    cfg.analysis.lg_l_max,
                    fit,
                )?;
                let rows: Vec<Vec<f64>> = s
                    .weights
                    .iter()
                    .map(|((p, l), w)| vec![f64::from(*p), f64::from(*l), *w])
                    .collect();
                write_csv(&manifest.path("lg.csv"), &["p", "l", "weight"], &rows)?;
                manifest.record("lg.csv")?;
                push(
                    &mut results,
                    "lg_waist_um",
                    format!("{:.6}", m_to_um(s.waist_used)),
                );
                push(&mut results, "lg_residual", format!("{:.9e}", s.residual));
            }
            Request::Orders => {
                let far = far.as_ref().expect("validated: far field enabled");
                let period = cfg.pattern.period_px * grid.dx;
                let mut rows = Vec::new();
                for &n in &cfg.analysis.orders {
                    let ex = extract_order(far, period, n)?;
                    let w = ex.winding()?;
                    push(&mut results, format!("order{n}_winding"), w);
                    push(
                        &mut results,
                        format!("order{n}_containment"),
                        format!("{:.6}", ex.containment),
                    );
                    rows.push(vec![
                        f64::from(n),
                        ex.center_frequency.0,
                        ex.containment,
                        f64::from(w),
                        ex.field.power(),
                    ]);
                }
                write_csv(
                    &manifest.path("orders.csv"),
                    &["order", "fx_per_m", "containment", "winding", "power"],
                    &rows,
                )?;
                manifest.record("orders.csv")?;
            }
            Request::Switching => {
                let after = uniform(grid, mw_per_cm2_to_si(cfg.analysis.switch_uniform_mw_cm2))?;
                let r = switching_report(&map, &after, &atomic, d, cfg.scheme())?;
                manifest.write_bytes("switching.txt", r.to_text().as_bytes())?;
                let rows: Vec<Vec<String>> = r
                    .rows()
                    .iter()
                    .map(|(name, om, tr, ta, rb)| {
                        let mut row = vec![name.to_string()];
                        row.extend([om, tr, ta, rb].iter().map(|v| format!("{v:.12e}")));
                        row
                    })
                    .collect();
                write_csv_records(
                    &manifest.path("switching.csv"),
                    &[
                        "convention",
                        "omega_rad_s",
                        "tau_r_s",
                        "tau_a_s",
                        "rate_bound_hz",
                    ],
                    &rows,
                )?;
                manifest.record("switching.csv")?;
                push(
                    &mut results,
                    "switching_tau_r_s",
                    format!("{:.6e}", r.tau_r),
                );
                push(
                    &mut results,
                    "switching_tau_a_s",
                    format!("{:.6e}", r.tau_a),
                );
                push(
                    &mut results,
                    "switching_rate_bound_hz",
                    format!("{:.6e}", r.rate_bound),
                );
                push(
                    &mut results,
                    "switching_nominal_tau_r_s",
                    format!("{:.6e}", r.nominal.tau_r),
                );
            }
        }
    }

    let mut text = key_values(&results);
    if text.is_empty() {
        let _ = writeln!(text);
    }
    manifest.write_bytes("analysis.txt", text.as_bytes())?;
    let manifest_path = manifest.finish()?;
    Ok(PipelineSummary {
        output_dir: dir,
        manifest: manifest_path,
        results,
    })
}

/// Complex field read back from a pipeline's `field_out.eitf`.
pub fn load_field(path: &std::path::Path, lambda: f64) -> Result<crate::cell::ComplexField> {
    FieldGridFile::read(path)?.into_field(lambda)
}
