//! Experiment configuration: a TOML document with one section per module.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use nls_core::functionals::{Equation, ModelParams};
use nls_core::groundstate::GroundStateOptions;
use nls_core::propagator::StepperConfig;
use nls_core::spectral::{make_grid, GridSpec};
use nls_core::symmetries::{SymmetryElement, SymmetryOptions, DEFAULT_PROJECTOR_EXPONENT};

/// Validation failure attributed to a config field and, when known, its line.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub d: usize,
    pub p: f64,
    pub omega: f64,
    pub equation: Equation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepperSection {
    pub dt: f64,
    pub t_final: f64,
    pub snapshot_every: usize,
    pub blowup_grad_factor: f64,
    pub tail_fraction_max: f64,
    pub edge_mass_max: f64,
    pub edge_cells: usize,
    pub checkpoint_times: Vec<f64>,
}

impl Default for StepperSection {
    fn default() -> Self {
        let c = StepperConfig::<f64>::default();
        Self {
            dt: c.dt,
            t_final: c.t_final,
            snapshot_every: c.snapshot_every,
            blowup_grad_factor: c.blowup_grad_factor,
            tail_fraction_max: c.tail_fraction_max,
            edge_mass_max: c.edge_mass_max,
            edge_cells: c.edge_cells,
            checkpoint_times: c.checkpoint_times,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroundStateSection {
    pub cross_check: bool,
    pub residual_tol: f64,
    pub agreement_tol: f64,
    pub pohozaev_tol: f64,
}

impl Default for GroundStateSection {
    fn default() -> Self {
        let o = GroundStateOptions::<f64>::default();
        Self {
            cross_check: false,
            residual_tol: o.residual_tol,
            agreement_tol: o.agreement_tol,
            pohozaev_tol: o.pohozaev_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SymmetrySection {
    pub theta: f64,
    pub h: f64,
    pub t0: f64,
    pub x0: [f64; 2],
    pub xi: [f64; 2],
    pub edge_mass_max: f64,
    pub edge_cells: usize,
}

impl Default for SymmetrySection {
    fn default() -> Self {
        let o = SymmetryOptions::<f64>::default();
        Self {
            theta: 0.0,
            h: 1.0,
            t0: 0.0,
            x0: [0.0; 2],
            xi: [0.0; 2],
            edge_mass_max: o.edge_mass_max,
            edge_cells: o.edge_cells,
        }
    }
}

impl SymmetrySection {
    pub fn element(&self) -> SymmetryElement<f64> {
        SymmetryElement {
            theta: self.theta,
            h: self.h,
            t0: self.t0,
            x0: self.x0,
            xi: self.xi,
        }
    }

    pub fn options(&self) -> SymmetryOptions<f64> {
        SymmetryOptions {
            edge_mass_max: self.edge_mass_max,
            edge_cells: self.edge_cells,
        }
    }
}

fn default_center() -> [f64; 2] {
    [0.0; 2]
}

fn default_exponent() -> f64 {
    DEFAULT_PROJECTOR_EXPONENT
}

/// Initial datum `u0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `amplitude * exp(-|x - center|^2 / (2 width^2)) e^{i boost.x}`.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default = "default_center")]
        center: [f64; 2],
        #[serde(default = "default_center")]
        boost: [f64; 2],
    },
    /// `amplitude * sech(|x - center| / width) e^{i boost.x}`.
    Sech {
        amplitude: f64,
        width: f64,
        #[serde(default = "default_center")]
        center: [f64; 2],
        #[serde(default = "default_center")]
        boost: [f64; 2],
    },
    /// `c Q` with `Q` the model's ground state.
    ScaledGroundState { c: f64 },
    /// Gaussian profile `phi` carried to large scale by the `[symmetry]`
    /// element with the projector `P_{<= h^exponent}`.
    LargeScaleProfile {
        amplitude: f64,
        width: f64,
        #[serde(default = "default_exponent")]
        exponent: f64,
    },
    /// Binary field file, relative paths resolved against the config file.
    File { path: PathBuf },
}

impl InitialData {
    pub fn label(&self) -> String {
        match self {
            InitialData::Gaussian { amplitude, width, .. } => format!("gaussian(a={amplitude}, w={width})"),
            InitialData::Sech { amplitude, width, .. } => format!("sech(a={amplitude}, w={width})"),
            InitialData::ScaledGroundState { c } => format!("{c}*Q"),
            InitialData::LargeScaleProfile { amplitude, width, exponent } => {
                format!("large_scale(a={amplitude}, w={width}, theta={exponent})")
            }
            InitialData::File { path } => format!("file({})", path.display()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VirialSection {
    /// Weight radius `R`; the whole-box weight when absent.
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Recorded in the summary; no part of a run draws random numbers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub model: ModelConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub stepper: StepperSection,
    #[serde(default)]
    pub ground_state: GroundStateSection,
    pub initial_data: InitialData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetrySection>,
    #[serde(default)]
    pub virial: VirialSection,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    /// Parses and validates `src`; relative paths resolve against `base_dir`.
    pub fn parse(src: &str, base_dir: impl Into<PathBuf>) -> Result<Self, ConfigError> {
        let mut cfg: ExperimentConfig = toml::from_str(src).map_err(|e| ConfigError {
            field: "config".into(),
            line: e.span().map(|s| line_of_offset(src, s.start)),
            message: e.message().to_string(),
        })?;
        cfg.base_dir = base_dir.into();
        cfg.validate().map_err(|mut e| {
            e.line = locate(src, &e.field);
            e
        })?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path).map_err(|e| ConfigError {
            field: "config".into(),
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&src, base)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn model(&self) -> Result<ModelParams<f64>, ConfigError> {
        let m = &self.model;
        ModelParams::new(m.d, m.p, m.omega, m.equation).map_err(|e| {
            let msg = e.to_string();
            let field = if msg.contains("dimension") {
                "model.d"
            } else if msg.contains("omega") {
                "model.omega"
            } else {
                "model.p"
            };
            invalid(field, msg)
        })
    }

    pub fn grid(&self) -> Result<GridSpec<f64>, ConfigError> {
        let field = if self.grid.half_width > 0.0 { "grid.n" } else { "grid.half_width" };
        make_grid(self.model.d, self.grid.n, self.grid.half_width).map_err(|e| invalid(field, e))
    }

    pub fn stepper(&self) -> StepperConfig<f64> {
        let s = &self.stepper;
        StepperConfig {
            dt: s.dt,
            t_final: s.t_final,
            snapshot_every: s.snapshot_every,
            blowup_grad_factor: s.blowup_grad_factor,
            tail_fraction_max: s.tail_fraction_max,
            edge_mass_max: s.edge_mass_max,
            edge_cells: s.edge_cells,
            checkpoint_times: s.checkpoint_times.clone(),
        }
    }

    pub fn ground_state_options(&self) -> GroundStateOptions<f64> {
        let g = &self.ground_state;
        GroundStateOptions {
            cross_check: g.cross_check,
            residual_tol: g.residual_tol,
            agreement_tol: g.agreement_tol,
            pohozaev_tol: g.pohozaev_tol,
            grid: if g.cross_check { self.grid().ok() } else { None },
            ..Default::default()
        }
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) || self.name.starts_with('.') {
            return Err(invalid("name", "must be a nonempty plain directory name"));
        }
        self.model()?;
        self.grid()?;
        let s = &self.stepper;
        positive("stepper.dt", s.dt)?;
        positive("stepper.t_final", s.t_final)?;
        positive("stepper.blowup_grad_factor", s.blowup_grad_factor)?;
        positive("stepper.tail_fraction_max", s.tail_fraction_max)?;
        positive("stepper.edge_mass_max", s.edge_mass_max)?;
        if s.snapshot_every == 0 {
            return Err(invalid("stepper.snapshot_every", "must be at least 1"));
        }
        if s.checkpoint_times.iter().any(|&t| !(0.0..=s.t_final).contains(&t)) {
            return Err(invalid("stepper.checkpoint_times", "times must lie in [0, t_final]"));
        }
        let g = &self.ground_state;
        positive("ground_state.residual_tol", g.residual_tol)?;
        positive("ground_state.agreement_tol", g.agreement_tol)?;
        positive("ground_state.pohozaev_tol", g.pohozaev_tol)?;
        match &self.initial_data {
            InitialData::Gaussian { amplitude, width, .. } | InitialData::Sech { amplitude, width, .. } => {
                positive("initial_data.amplitude", *amplitude)?;
                positive("initial_data.width", *width)?;
            }
            InitialData::ScaledGroundState { c } => positive("initial_data.c", *c)?,
            InitialData::LargeScaleProfile { amplitude, width, exponent } => {
                positive("initial_data.amplitude", *amplitude)?;
                positive("initial_data.width", *width)?;
                if !(*exponent > 0.0 && *exponent < 1.0) {
                    return Err(invalid("initial_data.exponent", format!("must lie in (0, 1), got {exponent}")));
                }
                if self.symmetry.is_none() {
                    return Err(invalid("symmetry", "large_scale_profile needs a [symmetry] element"));
                }
            }
            InitialData::File { path } => {
                let full = self.resolve(path);
                if !full.is_file() {
                    return Err(invalid("initial_data.path", format!("{} does not exist", full.display())));
                }
            }
        }
        if let Some(s) = &self.symmetry {
            s.element().validate().map_err(|e| invalid("symmetry.h", e))?;
            positive("symmetry.edge_mass_max", s.edge_mass_max)?;
        }
        if let Some(r) = self.virial.radius {
            positive("virial.radius", r)?;
        }
        Ok(())
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive, got {v}")))
    }
}

fn invalid(field: &str, msg: impl ToString) -> ConfigError {
    ConfigError {
        field: field.into(),
        line: None,
        message: msg.to_string(),
    }
}

fn line_of_offset(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// 1-based line of `section.key` in `src`, or of the section header.
fn locate(src: &str, field: &str) -> Option<usize> {
    let (section, key) = field.split_once('.').unwrap_or(("", field));
    let mut current = "";
    let mut header = None;
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim();
            if current == section || (section.is_empty() && current == key) {
                header = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
name = "run"

[model]
d = 1
p = 7.0
omega = 1.0
equation = "E1"

[grid]
n = 256
half_width = 16.0

[stepper]
dt = 1e-3
t_final = 0.1
snapshot_every = 10

[initial_data]
kind = "gaussian"
amplitude = 0.5
width = 1.0
"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = ExperimentConfig::parse(BASE, ".").unwrap();
        assert_eq!(cfg.stepper.edge_cells, 4);
        assert_eq!(cfg.stepper.edge_mass_max, 1e-10);
        assert!(cfg.symmetry.is_none());
        assert_eq!(cfg.virial.radius, None);
    }

    #[test]
    fn model_bound_violation_names_the_bound_and_line() {
        let src = BASE.replace("p = 7.0", "p = 3.0");
        let e = ExperimentConfig::parse(&src, ".").unwrap_err();
        assert_eq!(e.field, "model.p");
        assert!(e.message.contains("1 + 4/d = 5"), "{e}");
        assert_eq!(e.line, Some(6));
    }

    #[test]
    fn syntax_and_unknown_keys_report_lines() {
        let e = ExperimentConfig::parse(&BASE.replace("n = 256", "n = 256\nbogus = 1"), ".").unwrap_err();
        assert!(e.message.contains("bogus"), "{e}");
        assert_eq!(e.line, Some(12));
        let e = ExperimentConfig::parse(&BASE.replace("omega = 1.0", "omega = "), ".").unwrap_err();
        assert_eq!(e.line, Some(7));
    }

    #[test]
    fn missing_file_is_rejected() {
        let src = BASE.replace(
            "kind = \"gaussian\"\namplitude = 0.5\nwidth = 1.0",
            "kind = \"file\"\npath = \"nope.bin\"",
        );
        let e = ExperimentConfig::parse(&src, "/nonexistent").unwrap_err();
        assert_eq!(e.field, "initial_data.path");
    }
}
