use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{HarnessError, OUT_DIR_ENV};
use crate::coupling::SpinSystem;
use crate::pulses::Family;

pub const SCHEMA_VERSION: u32 = 1;

/// Upper bound on grid points per family, to catch runaway step sizes.
const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ExcitationProfile,
    FidelitySweep,
    Counting,
    CouplingMultiplet,
    SimplifyDemo,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::ExcitationProfile => "excitation-profile",
            Experiment::FidelitySweep => "fidelity-sweep",
            Experiment::Counting => "counting",
            Experiment::CouplingMultiplet => "coupling-multiplet",
            Experiment::SimplifyDemo => "simplify-demo",
        }
    }

    fn default_families(self) -> Vec<Family> {
        match self {
            Experiment::ExcitationProfile | Experiment::FidelitySweep => Family::ALL.to_vec(),
            Experiment::Counting => vec![Family::Naive, Family::Bb1],
            Experiment::CouplingMultiplet => Family::COUPLING.to_vec(),
            Experiment::SimplifyDemo => vec![Family::Bb1],
        }
    }

    fn default_phi(self) -> f64 {
        match self {
            Experiment::ExcitationProfile => FRAC_PI_2,
            _ => 0.0,
        }
    }

    fn default_grid(self) -> ErrorGrid {
        match self {
            Experiment::ExcitationProfile | Experiment::FidelitySweep => {
                ErrorGrid::new(-1.0, 1.0, 0.01)
            }
            Experiment::Counting => ErrorGrid::new(0.0, 0.1, 0.05),
            Experiment::CouplingMultiplet | Experiment::SimplifyDemo => {
                ErrorGrid::new(0.0, 0.0, 1.0)
            }
        }
    }
}

/// Pulse-length error grid plus the fixed off-resonance and phase errors.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorGrid {
    pub f_min: f64,
    pub f_max: f64,
    pub f_step: f64,
    #[serde(default)]
    pub g: f64,
    #[serde(default)]
    pub epsilon: f64,
}

impl ErrorGrid {
    pub fn new(f_min: f64, f_max: f64, f_step: f64) -> Self {
        Self {
            f_min,
            f_max,
            f_step,
            g: 0.0,
            epsilon: 0.0,
        }
    }

    /// `f_min + i·f_step` up to `f_max` inclusive (with a small tolerance).
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.f_max - self.f_min) / self.f_step + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|i| self.f_min + i as f64 * self.f_step)
            .collect()
    }

    fn validate(&self) -> Result<(), HarnessError> {
        for (name, v) in [
            ("error_grid.f_min", self.f_min),
            ("error_grid.f_max", self.f_max),
            ("error_grid.f_step", self.f_step),
            ("error_grid.g", self.g),
            ("error_grid.epsilon", self.epsilon),
        ] {
            if !v.is_finite() {
                return Err(HarnessError::field(name, "must be finite"));
            }
        }
        if self.f_step <= 0.0 {
            return Err(HarnessError::field(
                "error_grid.f_step",
                format!("must be > 0, got {}", self.f_step),
            ));
        }
        if self.f_max < self.f_min {
            return Err(HarnessError::field(
                "error_grid",
                format!("empty grid: f_max {} < f_min {}", self.f_max, self.f_min),
            ));
        }
        if (self.f_max - self.f_min) / self.f_step >= MAX_GRID_POINTS as f64 {
            return Err(HarnessError::field(
                "error_grid.f_step",
                "grid exceeds 1e6 points",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SpinSystemRef {
    Preset(String),
    Inline(SpinSystem),
}

impl SpinSystemRef {
    pub fn resolve(&self) -> Result<SpinSystem, HarnessError> {
        match self {
            SpinSystemRef::Preset(name) => match name.as_str() {
                "formate" => Ok(SpinSystem::formate()),
                "alanine" => Ok(SpinSystem::alanine()),
                other => Err(HarnessError::field(
                    "spin_system",
                    format!("unknown preset {other:?} (expected \"formate\" or \"alanine\")"),
                )),
            },
            SpinSystemRef::Inline(sys) => Ok(sys.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CountingParams {
    pub k: Vec<usize>,
    pub r_max: usize,
    pub coupling_family: String,
    pub damping: f64,
    pub coupling_error: f64,
    pub rf_spread: f64,
    pub rf_points: usize,
}

impl Default for CountingParams {
    fn default() -> Self {
        Self {
            k: vec![0, 1, 2],
            r_max: 20,
            coupling_family: "naive".into(),
            damping: 0.0,
            coupling_error: 0.0,
            rf_spread: 0.0,
            rf_points: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MultipletParams {
    pub n_max: usize,
    pub damping: f64,
    pub observed: usize,
    pub partner: usize,
    pub tilt_spin: usize,
}

impl Default for MultipletParams {
    fn default() -> Self {
        Self {
            n_max: 10,
            damping: 0.0,
            observed: 0,
            partner: 1,
            tilt_spin: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimplifyParams {
    pub r_max: usize,
    pub k: usize,
    pub single_family: String,
}

impl Default for SimplifyParams {
    fn default() -> Self {
        Self {
            r_max: 20,
            k: 1,
            single_family: "naive".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

impl OutputSpec {
    /// Explicit format, else inferred from the extension (CSV by default).
    pub fn resolved_format(&self) -> OutputFormat {
        self.format
            .unwrap_or_else(|| match self.path.extension().and_then(|e| e.to_str()) {
                Some("json") => OutputFormat::Json,
                _ => OutputFormat::Csv,
            })
    }

    /// Relative paths are placed under `ROBUST_GATES_OUT_DIR` when it is set.
    pub fn resolved_path(&self) -> PathBuf {
        match std::env::var_os(OUT_DIR_ENV) {
            Some(dir) if self.path.is_relative() => Path::new(&dir).join(&self.path),
            _ => self.path.clone(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    schema_version: u32,
    experiment: Experiment,
    #[serde(default)]
    families: Option<Vec<String>>,
    #[serde(default)]
    theta: Option<f64>,
    #[serde(default)]
    phi: Option<f64>,
    #[serde(default)]
    error_grid: Option<ErrorGrid>,
    #[serde(default)]
    spin_system: Option<SpinSystemRef>,
    #[serde(default)]
    counting: Option<CountingParams>,
    #[serde(default)]
    multiplet: Option<MultipletParams>,
    #[serde(default)]
    simplify: Option<SimplifyParams>,
    #[serde(default)]
    output: Option<OutputSpec>,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub experiment: Experiment,
    pub families: Vec<Family>,
    pub theta: f64,
    pub phi: f64,
    pub error_grid: ErrorGrid,
    pub spin_system: SpinSystem,
    pub counting: CountingParams,
    pub multiplet: MultipletParams,
    pub simplify: SimplifyParams,
    pub output: Option<OutputSpec>,
}

pub(crate) fn parse_family(field: &str, name: &str) -> Result<Family, HarnessError> {
    name.parse::<Family>()
        .map_err(|_| HarnessError::field(field, format!("unknown family {name:?}")))
}

impl SweepSpec {
    /// Defaults for an experiment, as used by the CLI without `--config`.
    pub fn defaults(experiment: Experiment) -> Self {
        let spin_system = match experiment {
            Experiment::Counting => SpinSystem::formate(),
            _ => SpinSystem::alanine(),
        };
        Self {
            experiment,
            families: experiment.default_families(),
            theta: FRAC_PI_2,
            phi: experiment.default_phi(),
            error_grid: experiment.default_grid(),
            spin_system,
            counting: CountingParams::default(),
            multiplet: MultipletParams::default(),
            simplify: SimplifyParams::default(),
            output: None,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !self.theta.is_finite() {
            return Err(HarnessError::field("theta", "must be finite"));
        }
        if !self.phi.is_finite() {
            return Err(HarnessError::field("phi", "must be finite"));
        }
        if self.families.is_empty() {
            return Err(HarnessError::field(
                "families",
                "must list at least one family",
            ));
        }
        self.error_grid.validate()?;
        for fam in &self.families {
            if !fam.accepts_theta(self.theta) {
                return Err(HarnessError::field(
                    "theta",
                    format!("{} outside the {} domain (0, 2π]", self.theta, fam.name()),
                ));
            }
            if self.experiment == Experiment::CouplingMultiplet && !fam.supports_coupling() {
                return Err(HarnessError::field(
                    "families",
                    format!("{} has no coupling-gate form", fam.name()),
                ));
            }
            if self.experiment == Experiment::SimplifyDemo && !fam.supports_coupling() {
                return Err(HarnessError::field(
                    "families",
                    format!("{} has no coupling-gate form", fam.name()),
                ));
            }
        }
        match self.experiment {
            Experiment::Counting => {
                let c = &self.counting;
                let cf = parse_family("counting.coupling_family", &c.coupling_family)?;
                if !cf.supports_coupling() {
                    return Err(HarnessError::field(
                        "counting.coupling_family",
                        format!("{} has no coupling-gate form", cf.name()),
                    ));
                }
                if c.k.is_empty() {
                    return Err(HarnessError::field(
                        "counting.k",
                        "must list at least one k",
                    ));
                }
                if let Some(k) = c.k.iter().find(|&&k| k > 2) {
                    return Err(HarnessError::field(
                        "counting.k",
                        format!("k = {k} exceeds N = 2"),
                    ));
                }
                for (name, v) in [
                    ("counting.damping", c.damping),
                    ("counting.rf_spread", c.rf_spread),
                ] {
                    if !v.is_finite() || v < 0.0 {
                        return Err(HarnessError::field(
                            name,
                            format!("must be finite and >= 0, got {v}"),
                        ));
                    }
                }
                if !c.coupling_error.is_finite() {
                    return Err(HarnessError::field(
                        "counting.coupling_error",
                        "must be finite",
                    ));
                }
                if c.rf_spread > 0.0 && c.rf_points == 0 {
                    return Err(HarnessError::field(
                        "counting.rf_points",
                        "must be positive",
                    ));
                }
            }
            Experiment::CouplingMultiplet => {
                let m = &self.multiplet;
                if m.n_max == 0 {
                    return Err(HarnessError::field("multiplet.n_max", "must be positive"));
                }
                if !m.damping.is_finite() || m.damping < 0.0 {
                    return Err(HarnessError::field(
                        "multiplet.damping",
                        "must be finite and >= 0",
                    ));
                }
                let n = self.spin_system.n_spins();
                for (name, s) in [
                    ("multiplet.observed", m.observed),
                    ("multiplet.partner", m.partner),
                    ("multiplet.tilt_spin", m.tilt_spin),
                ] {
                    if s >= n {
                        return Err(HarnessError::field(
                            name,
                            format!("spin {s} out of range for {n} spins"),
                        ));
                    }
                }
            }
            Experiment::SimplifyDemo => {
                let s = &self.simplify;
                parse_family("simplify.single_family", &s.single_family)?;
                if s.k > 2 {
                    return Err(HarnessError::field(
                        "simplify.k",
                        format!("k = {} exceeds N = 2", s.k),
                    ));
                }
                if !self.spin_system.spins().iter().any(|sp| sp.group.is_some()) {
                    return Err(HarnessError::field(
                        "spin_system",
                        "simplify-demo needs an equivalent-spin group",
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Parses and validates a JSON scenario.
pub fn parse_config(text: &str) -> Result<SweepSpec, HarnessError> {
    let raw: RawSpec =
        serde_json::from_str(text).map_err(|e| HarnessError::ConfigSyntax(e.to_string()))?;
    if raw.schema_version != SCHEMA_VERSION {
        return Err(HarnessError::field(
            "schema_version",
            format!(
                "unsupported version {} (expected {SCHEMA_VERSION})",
                raw.schema_version
            ),
        ));
    }
    let mut spec = SweepSpec::defaults(raw.experiment);
    if let Some(names) = raw.families {
        spec.families = names
            .iter()
            .map(|n| parse_family("families", n))
            .collect::<Result<_, _>>()?;
    }
    if let Some(t) = raw.theta {
        spec.theta = t;
    }
    if let Some(p) = raw.phi {
        spec.phi = p;
    }
    if let Some(g) = raw.error_grid {
        spec.error_grid = g;
    }
    if let Some(s) = raw.spin_system {
        spec.spin_system = s.resolve()?;
    }
    if let Some(c) = raw.counting {
        spec.counting = c;
    }
    if let Some(m) = raw.multiplet {
        spec.multiplet = m;
    }
    if let Some(s) = raw.simplify {
        spec.simplify = s;
    }
    spec.output = raw.output;
    spec.validate()?;
    Ok(spec)
}

pub fn load_config(path: &Path) -> Result<SweepSpec, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::ConfigRead {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
