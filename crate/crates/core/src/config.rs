//! TOML pipeline configuration. Unknown keys are rejected.
//!
//! ```toml
//! [atomic]
//! preset = "rb87-d2"        # or "rb87-d2-resonant"; fields below override
//! rho = 5e18
//!
//! [grid]
//! n = 512
//! pitch_um = 16.0
//!
//! [pattern]
//! kind = "ramp"             # "uniform" | "ramp" | "fork"
//! a = 500.0
//! b = 1.0
//! c = 1.0
//!
//! [probe]
//! waist_um = 1000.0
//!
//! [cell]
//! thickness = "solve"       # or a number in µm
//!
//! [analysis]
//! requests = ["transmission", "winding", "oam"]
//!
//! [output]
//! dir = "out"
//! ```

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::cell::CellMode;
use crate::constants::units::{mw_per_cm2_to_si, um_to_m};
use crate::dynamics::Scheme;
use crate::error::{EitError, Result};
use crate::grid::GridSpec;
use crate::medium::{AtomicParams, DEFAULT_TRANSMISSION_FLOOR};
use crate::optics::DEFAULT_PADDING;
use crate::patterns::RampParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub atomic: AtomicSection,
    pub grid: GridSection,
    pub pattern: PatternSection,
    #[serde(default)]
    pub probe: ProbeSection,
    #[serde(default)]
    pub cell: CellSection,
    #[serde(default)]
    pub far_field: FarFieldSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AtomicPreset {
    #[default]
    Rb87D2,
    Rb87D2Resonant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct AtomicSection {
    #[serde(default)]
    pub preset: AtomicPreset,
    pub gamma31: Option<f64>,
    pub gamma21: Option<f64>,
    pub mu13: Option<f64>,
    pub mu23: Option<f64>,
    /// m⁻³
    pub rho: Option<f64>,
    /// rad/s
    pub delta: Option<f64>,
    pub lambda_nm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    pub pitch_um: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternKindConfig {
    Uniform,
    Ramp,
    Fork,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSection {
    pub kind: PatternKindConfig,
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default = "one")]
    pub b: f64,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "one_u32")]
    pub sectors: u32,
    #[serde(default = "one_i32")]
    pub charge: i32,
    #[serde(default = "default_period")]
    pub period_px: f64,
    /// Bright-fringe (fork) or uniform intensity.
    #[serde(default = "default_bright")]
    pub intensity_mw_cm2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ProbeMode {
    #[default]
    Gaussian,
    Lg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    #[serde(default = "default_waist")]
    pub waist_um: f64,
    #[serde(default)]
    pub mode: ProbeMode,
    #[serde(default)]
    pub p: u32,
    #[serde(default)]
    pub l: i32,
}

impl Default for ProbeSection {
    fn default() -> Self {
        Self {
            waist_um: default_waist(),
            mode: ProbeMode::Gaussian,
            p: 0,
            l: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solve {
    Solve,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Thickness {
    Solve(Solve),
    Micrometres(f64),
}

impl Default for Thickness {
    fn default() -> Self {
        Thickness::Solve(Solve::Solve)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CellModeConfig {
    #[default]
    Eit,
    Resonant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSection {
    #[serde(default)]
    pub thickness: Thickness,
    #[serde(default)]
    pub mode: CellModeConfig,
    #[serde(default = "one_i32")]
    pub delta_l: i32,
    #[serde(default = "default_floor")]
    pub transmission_floor: f64,
}

impl Default for CellSection {
    fn default() -> Self {
        Self {
            thickness: Thickness::default(),
            mode: CellModeConfig::Eit,
            delta_l: 1,
            transmission_floor: default_floor(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FarFieldSection {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "default_padding")]
    pub padding: usize,
}

impl Default for FarFieldSection {
    fn default() -> Self {
        Self {
            enabled: true,
            padding: DEFAULT_PADDING,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Request {
    Profile,
    Transmission,
    Winding,
    Oam,
    Lg,
    Orders,
    Switching,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    #[serde(default)]
    pub requests: Vec<Request>,
    /// Winding circle radii in units of the probe waist.
    #[serde(default = "default_radii")]
    pub winding_radii: Vec<f64>,
    #[serde(default = "default_harmonics")]
    pub oam_harmonics: u32,
    #[serde(default = "default_modes")]
    pub lg_p_max: u32,
    #[serde(default = "default_modes")]
    pub lg_l_max: u32,
    #[serde(default)]
    pub lg_optimize_waist: bool,
    #[serde(default = "default_orders")]
    pub orders: Vec<i32>,
    /// Uniform intensity switched to (or from) in the switching estimate.
    #[serde(default = "default_uniform")]
    pub switch_uniform_mw_cm2: f64,
    #[serde(default = "default_profile_points")]
    pub profile_points: usize,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            requests: Vec::new(),
            winding_radii: default_radii(),
            oam_harmonics: default_harmonics(),
            lg_p_max: default_modes(),
            lg_l_max: default_modes(),
            lg_optimize_waist: false,
            orders: default_orders(),
            switch_uniform_mw_cm2: default_uniform(),
            profile_points: default_profile_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub png: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            png: false,
        }
    }
}

fn default_a() -> f64 {
    500.0
}
fn one() -> f64 {
    1.0
}
fn one_u32() -> u32 {
    1
}
fn one_i32() -> i32 {
    1
}
fn yes() -> bool {
    true
}
fn default_period() -> f64 {
    16.0
}
fn default_bright() -> f64 {
    838.0
}
fn default_uniform() -> f64 {
    838.0
}
fn default_waist() -> f64 {
    1000.0
}
fn default_floor() -> f64 {
    DEFAULT_TRANSMISSION_FLOOR
}
fn default_padding() -> usize {
    DEFAULT_PADDING
}
fn default_radii() -> Vec<f64> {
    vec![0.3, 0.5, 1.0, 1.5]
}
fn default_harmonics() -> u32 {
    5
}
fn default_modes() -> u32 {
    3
}
fn default_orders() -> Vec<i32> {
    vec![-1, 1]
}
fn default_profile_points() -> usize {
    361
}
fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

pub const PRESETS: &[&str] = &["phase-demo", "amplitude-demo"];

const PHASE_DEMO: &str = r#"
[atomic]
preset = "rb87-d2"

[grid]
n = 512
pitch_um = 16.0

[pattern]
kind = "ramp"
a = 500.0
b = 1.0
c = 1.0

[probe]
waist_um = 1000.0

[cell]
thickness = "solve"
mode = "eit"

[far_field]
enabled = true
padding = 2

[analysis]
requests = ["profile", "transmission", "winding", "oam", "lg", "switching"]

[output]
dir = "out/phase-demo"
"#;

const AMPLITUDE_DEMO: &str = r#"
[atomic]
preset = "rb87-d2-resonant"

[grid]
n = 512
pitch_um = 16.0

[pattern]
kind = "fork"
charge = 1
period_px = 16.0
intensity_mw_cm2 = 838.0

[probe]
waist_um = 1000.0

[cell]
thickness = 500.0
mode = "resonant"

[far_field]
enabled = true
padding = 2

[analysis]
requests = ["transmission", "orders", "switching"]
orders = [-1, 1]

[output]
dir = "out/amplitude-demo"
"#;

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| EitError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "phase-demo" => Self::from_toml(PHASE_DEMO),
            "amplitude-demo" => Self::from_toml(AMPLITUDE_DEMO),
            other => Err(EitError::Config(format!(
                "unknown preset {other:?}; available: {}",
                PRESETS.join(", ")
            ))),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| EitError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(EitError::Config(m));
        self.grid().map_err(|e| EitError::Config(e.to_string()))?;
        self.atomic()
            .validate()
            .map_err(|e| EitError::Config(e.to_string()))?;
        if !(self.probe.waist_um > 0.0) {
            return bad(format!(
                "probe.waist_um must be > 0, got {}",
                self.probe.waist_um
            ));
        }
        if let Thickness::Micrometres(d) = self.cell.thickness {
            if !(d > 0.0) {
                return bad(format!(
                    "cell.thickness must be > 0 µm or \"solve\", got {d}"
                ));
            }
        } else if self.pattern.kind != PatternKindConfig::Ramp {
            return bad("cell.thickness = \"solve\" requires pattern.kind = \"ramp\"".into());
        }
        if self.far_field.padding == 0 {
            return bad("far_field.padding must be >= 1".into());
        }
        if !(self.pattern.intensity_mw_cm2 >= 0.0) {
            return bad("pattern.intensity_mw_cm2 must be >= 0".into());
        }
        if self.pattern.kind == PatternKindConfig::Ramp {
            self.ramp()
                .validate()
                .map_err(|e| EitError::Config(e.to_string()))?;
        }
        if self.pattern.kind == PatternKindConfig::Fork && !(self.pattern.period_px > 0.0) {
            return bad("pattern.period_px must be > 0".into());
        }
        let needs_far = self.analysis.requests.contains(&Request::Orders);
        if needs_far && !self.far_field.enabled {
            return bad("analysis request \"orders\" needs far_field.enabled = true".into());
        }
        if needs_far && self.pattern.kind != PatternKindConfig::Fork {
            return bad("analysis request \"orders\" needs pattern.kind = \"fork\"".into());
        }
        if self.analysis.requests.contains(&Request::Profile)
            && self.pattern.kind != PatternKindConfig::Ramp
        {
            return bad("analysis request \"profile\" needs pattern.kind = \"ramp\"".into());
        }
        Ok(())
    }

    pub fn atomic(&self) -> AtomicParams {
        let a = &self.atomic;
        let mut p = match a.preset {
            AtomicPreset::Rb87D2 => AtomicParams::rb87_d2(),
            AtomicPreset::Rb87D2Resonant => AtomicParams::rb87_d2_resonant(),
        };
        if let Some(v) = a.gamma31 {
            p.gamma31 = v;
        }
        if let Some(v) = a.gamma21 {
            p.gamma21 = v;
        }
        if let Some(v) = a.mu13 {
            p.mu13 = v;
        }
        if let Some(v) = a.mu23 {
            p.mu23 = v;
        }
        if let Some(v) = a.rho {
            p.rho = v;
        }
        if let Some(v) = a.delta {
            p.delta = v;
        }
        if let Some(v) = a.lambda_nm {
            p.lambda = v * 1e-9;
        }
        p
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::square(self.grid.n, um_to_m(self.grid.pitch_um))
    }

    pub fn ramp(&self) -> RampParams {
        let p = &self.pattern;
        RampParams::new(p.a, p.b, p.c).with_sectors(p.sectors)
    }

    pub fn pattern_intensity(&self) -> f64 {
        mw_per_cm2_to_si(self.pattern.intensity_mw_cm2)
    }

    pub fn waist(&self) -> f64 {
        um_to_m(self.probe.waist_um)
    }

    pub fn cell_mode(&self) -> CellMode {
        match self.cell.mode {
            CellModeConfig::Eit => CellMode::Eit,
            CellModeConfig::Resonant => CellMode::ResonantTwoLevel,
        }
    }

    pub fn scheme(&self) -> Scheme {
        match self.cell.mode {
            CellModeConfig::Eit => Scheme::Phase,
            CellModeConfig::Resonant => Scheme::Amplitude,
        }
    }

    pub fn wants(&self, r: Request) -> bool {
        self.analysis.requests.contains(&r)
    }
}
