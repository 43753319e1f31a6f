//! `eitslm` command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 configuration, 3 numeric regime, 4 I/O.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use eitslm::analysis::{
    extract_order, lg_decompose, oam_spectrum, transmission_stats, winding_number, WaistFit,
};
use eitslm::cell::{apply_transfer, build_transfer, CellMode};
use eitslm::config::PipelineConfig;
use eitslm::constants::intensity_from_rabi;
use eitslm::constants::units::{m_to_um, mw_per_cm2_to_si, si_to_mw_per_cm2, um_to_m};
use eitslm::dynamics::{switching_report, Scheme};
use eitslm::io::{write_png, Domain, FieldData, FieldGridFile};
use eitslm::medium::{self, AtomicParams};
use eitslm::optics::{far_field, gaussian_source, FarField, DEFAULT_PADDING};
use eitslm::patterns::{
    azimuthal_ramp, fork_grating, uniform, CouplingMap, PatternKind, RampParams,
};
use eitslm::pipeline::run_pipeline;
use eitslm::{EitError, ErrorKind, GridSpec};

#[derive(Parser, Debug)]
#[command(
    name = "eitslm",
    version,
    about = "EIT spatial light modulator simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Probe susceptibility at one coupling Rabi frequency, or a CSV scan.
    SusceptibilityScan(ScanArgs),
    /// Write an azimuthal-ramp coupling map.
    DesignRamp(RampArgs),
    /// Write a forked-grating coupling map.
    DesignFork(ForkArgs),
    /// Cell thickness giving a Δl·2π phase step across a ramp.
    SolveThickness(SolveArgs),
    /// Send a Gaussian probe through the cell defined by a coupling map.
    Transmit(TransmitArgs),
    /// Far-field (Fraunhofer) transform of a field file.
    FarField(FarFieldArgs),
    /// Winding number, OAM and LG spectra of a field, or diffraction orders of a far field.
    Analyze(AnalyzeArgs),
    /// Switching-time estimate between two coupling maps.
    Switching(SwitchingArgs),
    /// Run a full configured pipeline.
    Run(RunArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    Rb87,
    Rb87Resonant,
}

#[derive(Args, Debug)]
struct AtomicArgs {
    #[arg(long, value_enum, default_value = "rb87")]
    preset: Preset,
    /// Atom density, m⁻³.
    #[arg(long)]
    rho: Option<f64>,
    /// Two-photon detuning, rad/s.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Ground-state dephasing, 1/s.
    #[arg(long)]
    gamma21: Option<f64>,
}

impl AtomicArgs {
    fn params(&self) -> AtomicParams {
        let mut p = match self.preset {
            Preset::Rb87 => AtomicParams::rb87_d2(),
            Preset::Rb87Resonant => AtomicParams::rb87_d2_resonant(),
        };
        if let Some(v) = self.rho {
            p.rho = v;
        }
        if let Some(v) = self.delta {
            p.delta = v;
        }
        if let Some(v) = self.gamma21 {
            p.gamma21 = v;
        }
        p
    }
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = 512)]
    n: usize,
    #[arg(long, default_value_t = 16.0)]
    pitch_um: f64,
}

impl GridArgs {
    fn grid(&self) -> eitslm::Result<GridSpec> {
        GridSpec::square(self.n, um_to_m(self.pitch_um))
    }
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    atomic: AtomicArgs,
    /// Coupling Rabi frequency, rad/s.
    #[arg(long, default_value_t = 0.0)]
    omega: f64,
    /// Scan from --omega to this value instead, printing CSV.
    #[arg(long)]
    scan_to: Option<f64>,
    #[arg(long, default_value_t = 101)]
    points: usize,
}

#[derive(Args, Debug)]
struct RampSpec {
    #[arg(long, default_value_t = 500.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1)]
    sectors: u32,
}

impl RampSpec {
    fn params(&self) -> RampParams {
        RampParams::new(self.a, self.b, self.c).with_sectors(self.sectors)
    }
}

#[derive(Args, Debug)]
struct RampArgs {
    #[command(flatten)]
    atomic: AtomicArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    ramp: RampSpec,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    png: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ForkArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    charge: i32,
    #[arg(long, default_value_t = 16.0)]
    period_px: f64,
    /// Bright-fringe intensity, mW/cm².
    #[arg(long, default_value_t = 838.0)]
    intensity: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    png: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    atomic: AtomicArgs,
    /// Ramp parameters as `a=500,b=1,c=1`.
    #[arg(long, default_value = "a=500,b=1,c=1")]
    ramp: String,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    delta_l: i32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Eit,
    Resonant,
}

impl ModeArg {
    fn cell(self) -> CellMode {
        match self {
            ModeArg::Eit => CellMode::Eit,
            ModeArg::Resonant => CellMode::ResonantTwoLevel,
        }
    }

    fn scheme(self) -> Scheme {
        match self {
            ModeArg::Eit => Scheme::Phase,
            ModeArg::Resonant => Scheme::Amplitude,
        }
    }
}

#[derive(Args, Debug)]
struct TransmitArgs {
    #[command(flatten)]
    atomic: AtomicArgs,
    /// Coupling map (real FieldGridFile, W/m²).
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long)]
    thickness_um: f64,
    #[arg(long, value_enum, default_value = "eit")]
    mode: ModeArg,
    #[arg(long, default_value_t = 1000.0)]
    waist_um: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FarFieldArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PADDING)]
    padding: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    png: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Probe waist, µm; sets the winding radii and LG basis waist.
    #[arg(long, default_value_t = 1000.0)]
    waist_um: f64,
    /// Winding circle radii in units of the waist.
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.5,1.0,1.5")]
    radii: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    harmonics: u32,
    #[arg(long, default_value_t = 3)]
    p_max: u32,
    #[arg(long, default_value_t = 3)]
    l_max: u32,
    #[arg(long)]
    optimize_waist: bool,
    /// Grating period, µm (far-field inputs).
    #[arg(long)]
    period_um: Option<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "-1,1",
        allow_hyphen_values = true
    )]
    orders: Vec<i32>,
}

#[derive(Args, Debug)]
struct SwitchingArgs {
    #[command(flatten)]
    atomic: AtomicArgs,
    #[arg(long)]
    before: PathBuf,
    /// Post-switch map; defaults to uniform illumination of --after-uniform.
    #[arg(long)]
    after: Option<PathBuf>,
    /// mW/cm².
    #[arg(long, default_value_t = 838.0)]
    after_uniform: f64,
    #[arg(long)]
    thickness_um: f64,
    #[arg(long, value_enum, default_value = "eit")]
    mode: ModeArg,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Override output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn kv(key: &str, value: impl std::fmt::Display) {
    println!("{key} {value}");
}

fn parse_ramp(text: &str) -> eitslm::Result<RampParams> {
    let (mut a, mut b, mut c, mut sectors) = (500.0, 1.0, 1.0, 1u32);
    for part in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| {
            EitError::Config(format!("expected key=value in --ramp, got {part:?}"))
        })?;
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| EitError::Config(format!("bad --ramp value {v:?}: {e}")))
        };
        match k.trim() {
            "a" => a = num(v)?,
            "b" => b = num(v)?,
            "c" => c = num(v)?,
            "sectors" => sectors = num(v)? as u32,
            other => return Err(EitError::Config(format!("unknown --ramp key {other:?}"))),
        }
    }
    Ok(RampParams::new(a, b, c).with_sectors(sectors))
}

fn load_map(path: &Path) -> eitslm::Result<CouplingMap> {
    let file = FieldGridFile::read(path)?;
    let (dx, dy) = (file.dx, file.dy);
    let values = match file.data {
        FieldData::Real(v) => v,
        FieldData::Complex(_) => {
            return Err(EitError::Format(format!(
                "{}: coupling map must be real",
                path.display()
            )))
        }
    };
    let (ny, nx) = values.dim();
    let grid = GridSpec::new(nx, ny, dx, dy)?;
    let first = values[[0, 0]];
    let kind = if values.iter().all(|v| *v == first) {
        PatternKind::Uniform
    } else if values
        .iter()
        .all(|v| *v == 0.0 || *v == values.iter().copied().fold(0.0, f64::max))
    {
        PatternKind::BinaryMask
    } else {
        PatternKind::AzimuthalRamp
    };
    CouplingMap::new(grid, values, kind)
}

fn load_spatial(path: &Path, lambda: f64) -> eitslm::Result<eitslm::cell::ComplexField> {
    FieldGridFile::read(path)?.into_field(lambda)
}

fn execute(cmd: Command) -> eitslm::Result<()> {
    match cmd {
        Command::SusceptibilityScan(a) => {
            let p = a.atomic.params();
            p.validate()?;
            match a.scan_to {
                None => {
                    let chi = medium::susceptibility(&p, a.omega)?;
                    kv("omega_rad_s", format!("{:.6e}", a.omega));
                    kv("chi_re", format!("{:.6e}", chi.chi_re));
                    kv("chi_im", format!("{:.6e}", chi.chi_im));
                    kv(
                        "alpha_per_m",
                        format!("{:.6e}", chi.absorption_coefficient(p.lambda)?),
                    );
                }
                Some(end) => {
                    let n = a.points.max(2);
                    println!("omega_rad_s,chi_re,chi_im,alpha_per_m");
                    for k in 0..n {
                        let om = a.omega + (end - a.omega) * k as f64 / (n - 1) as f64;
                        let chi = medium::susceptibility(&p, om)?;
                        println!(
                            "{om:.6e},{:.6e},{:.6e},{:.6e}",
                            chi.chi_re,
                            chi.chi_im,
                            chi.absorption_coefficient(p.lambda)?
                        );
                    }
                }
            }
        }
        Command::DesignRamp(a) => {
            let p = a.atomic.params();
            let ramp = a.ramp.params();
            let map = azimuthal_ramp(a.grid.grid()?, ramp, &p)?;
            FieldGridFile::from_map(&map).write(&a.out)?;
            if let Some(png) = &a.png {
                write_png(png, &map.intensity)?;
            }
            let (o0, o2) = ramp.endpoint_rabi(p.gamma31);
            kv(
                "intensity_0_mw_cm2",
                format!("{:.4}", si_to_mw_per_cm2(intensity_from_rabi(o0, p.mu23)?)),
            );
            kv(
                "intensity_2pi_mw_cm2",
                format!("{:.4}", si_to_mw_per_cm2(intensity_from_rabi(o2, p.mu23)?)),
            );
            kv("output", a.out.display());
        }
        Command::DesignFork(a) => {
            let grid = a.grid.grid()?;
            let map = fork_grating(
                grid,
                a.charge,
                a.period_px * grid.dx,
                mw_per_cm2_to_si(a.intensity),
            )?;
            FieldGridFile::from_map(&map).write(&a.out)?;
            if let Some(png) = &a.png {
                write_png(png, &map.intensity)?;
            }
            kv("duty_cycle", format!("{:.4}", map.duty_cycle()));
            kv("output", a.out.display());
        }
        Command::SolveThickness(a) => {
            let p = a.atomic.params();
            let ramp = parse_ramp(&a.ramp)?;
            ramp.validate()
                .map_err(|e| EitError::Config(e.to_string()))?;
            let (o0, o2) = ramp.endpoint_rabi(p.gamma31);
            let s = medium::solve_cell_thickness(&p, o0, o2, a.delta_l)?;
            kv("thickness_um", format!("{:.3}", m_to_um(s.thickness)));
            kv("chi_re_0", format!("{:.6e}", s.chi_at_0.chi_re));
            kv("chi_re_2pi", format!("{:.6e}", s.chi_at_2pi.chi_re));
            kv("worst_transmission", format!("{:.6}", s.worst_transmission));
            kv("below_floor", s.below_floor);
        }
        Command::Transmit(a) => {
            let p = a.atomic.params();
            let map = load_map(&a.pattern)?;
            let transfer = build_transfer(&map, &p, um_to_m(a.thickness_um), a.mode.cell())?;
            let probe = gaussian_source(map.grid, um_to_m(a.waist_um), p.lambda)?;
            let out = apply_transfer(&probe, &transfer)?;
            FieldGridFile::from_field(&out).write(&a.out)?;
            let s = transmission_stats(&transfer);
            kv("transmission_min", format!("{:.6e}", s.min));
            kv("transmission_max", format!("{:.6e}", s.max));
            kv("transmission_mean", format!("{:.6e}", s.mean));
            kv(
                "power_fraction",
                format!("{:.6}", out.power() / probe.power()),
            );
            kv("output", a.out.display());
        }
        Command::FarField(a) => {
            let field = load_spatial(&a.input, AtomicParams::rb87_d2().lambda)?;
            let far = far_field(&field, a.padding)?;
            FieldGridFile::from_far_field(&far).write(&a.out)?;
            if let Some(png) = &a.png {
                write_png(png, &far.amplitude.mapv(|z| z.norm()))?;
            }
            kv("power", format!("{:.9e}", far.power()));
            kv("frequency_pitch_per_m", format!("{:.6e}", far.grid.dx));
            kv("output", a.out.display());
        }
        Command::Analyze(a) => {
            let lambda = AtomicParams::rb87_d2().lambda;
            let file = FieldGridFile::read(&a.input)?;
            match file.domain {
                Domain::Frequency => {
                    let period = a.period_um.ok_or_else(|| {
                        EitError::Config("far-field input needs --period-um".into())
                    })?;
                    let field = file.into_field(lambda)?;
                    let g = field.grid;
                    let spatial = GridSpec::new(
                        g.nx,
                        g.ny,
                        1.0 / (g.nx as f64 * g.dx),
                        1.0 / (g.ny as f64 * g.dy),
                    )?;
                    let far = FarField {
                        grid: g,
                        spatial,
                        amplitude: field.amplitude,
                        lambda,
                    };
                    for &n in &a.orders {
                        let ex = extract_order(&far, um_to_m(period), n)?;
                        kv(&format!("order{n}_winding"), ex.winding()?);
                        kv(
                            &format!("order{n}_containment"),
                            format!("{:.6}", ex.containment),
                        );
                    }
                }
                Domain::Spatial => {
                    let field = file.into_field(lambda)?;
                    let w = um_to_m(a.waist_um);
                    for rw in &a.radii {
                        match winding_number(&field, rw * w) {
                            Ok(n) => kv(&format!("winding_r{rw}w"), n),
                            Err(e) => kv(&format!("winding_r{rw}w"), format!("error: {e}")),
                        }
                    }
                    let s = oam_spectrum(&field, a.harmonics)?;
                    for (m, p) in &s.harmonics {
                        kv(&format!("oam_p{m}"), format!("{p:.6e}"));
                    }
                    let fit = if a.optimize_waist {
                        WaistFit::Optimize
                    } else {
                        WaistFit::Fixed
                    };
                    let lg = lg_decompose(&field, w, a.p_max, a.l_max, fit)?;
                    for ((p, l), v) in &lg.weights {
                        kv(&format!("lg_{p}_{l}"), format!("{v:.6e}"));
                    }
                    kv("lg_waist_um", format!("{:.3}", m_to_um(lg.waist_used)));
                    kv("lg_residual", format!("{:.6e}", lg.residual));
                }
            }
        }
        Command::Switching(a) => {
            let p = a.atomic.params();
            let before = load_map(&a.before)?;
            let after = match &a.after {
                Some(path) => load_map(path)?,
                None => uniform(before.grid, mw_per_cm2_to_si(a.after_uniform))?,
            };
            let r = switching_report(
                &before,
                &after,
                &p,
                um_to_m(a.thickness_um),
                a.mode.scheme(),
            )?;
            print!("{}", r.to_text());
        }
        Command::Run(a) => {
            let mut cfg = match (&a.config, &a.preset) {
                (Some(path), _) => PipelineConfig::from_file(path)?,
                (None, Some(name)) => PipelineConfig::preset(name)?,
                (None, None) => unreachable!("clap requires one of --config/--preset"),
            };
            if let Some(out) = a.out {
                cfg.output.dir = out;
            }
            let s = run_pipeline(&cfg)?;
            for (k, v) in &s.results {
                kv(k, v);
            }
            kv("manifest", s.manifest.display());
        }
    }
    Ok(())
}

fn exit_code(e: &EitError) -> u8 {
    match e.kind() {
        ErrorKind::Config => 2,
        ErrorKind::Numeric => 3,
        ErrorKind::Io => 4,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
