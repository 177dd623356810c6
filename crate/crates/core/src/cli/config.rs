//! JSON run configuration: parsing with field paths and aggregated validation.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::hormander::{ConditionSpace, PieceGrid};
use crate::opnorm::check_region;
use crate::oracles::suites::{Suite, SuiteOptions};
use crate::spectral::{Grid, LittlewoodPaleyFamily};
use crate::symbols::SymbolSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_box")]
    pub box_side: f64,
    #[serde(default = "default_samples")]
    pub samples_per_dim: usize,
    /// Dyadic window `[j_min, j_max]`; defaults to the window the grid resolves.
    #[serde(default)]
    pub j_range: Option<[i32; 2]>,
    #[serde(default)]
    pub seed: u64,
    /// Not embedded in outputs, so reports are independent of where they land.
    #[serde(default = "default_output", skip_serializing)]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub symbol: Option<SymbolSpec>,
    #[serde(default)]
    pub analyze: AnalyzeConfig,
    #[serde(default)]
    pub lemmas: LemmaConfig,
    #[serde(default)]
    pub opnorm: OpNormConfig,
}

fn default_dim() -> usize {
    2
}

fn default_box() -> f64 {
    16.0
}

fn default_samples() -> usize {
    128
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    #[serde(default = "one")]
    pub s: f64,
    #[serde(default = "default_conditions")]
    pub conditions: Vec<ConditionSpace>,
    #[serde(default)]
    pub piece: PieceGrid,
    #[serde(default)]
    pub mikhlin: Option<MikhlinConfig>,
}

fn default_conditions() -> Vec<ConditionSpace> {
    vec![ConditionSpace::Lorentz, ConditionSpace::Sobolev { r: 2.0 }]
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self {
            s: 1.0,
            conditions: default_conditions(),
            piece: PieceGrid::default(),
            mikhlin: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MikhlinConfig {
    /// Defaults to `⌊n/2⌋ + 1`.
    #[serde(default)]
    pub alpha_max: Option<u32>,
    #[serde(default = "default_mikhlin_samples")]
    pub samples: usize,
    #[serde(default = "default_r_min")]
    pub r_min: f64,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
}

fn default_mikhlin_samples() -> usize {
    200
}

fn default_r_min() -> f64 {
    0.1
}

fn default_r_max() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaConfig {
    #[serde(default = "default_suites")]
    pub suites: Vec<Suite>,
    /// Overrides every suite's default case count.
    #[serde(default)]
    pub cases: Option<usize>,
    /// Grid for the suites that sample functions on a box.
    #[serde(default = "default_lemma_resolution")]
    pub resolution: usize,
    #[serde(default = "default_lemma_box")]
    pub box_side: f64,
}

fn default_lemma_resolution() -> usize {
    SuiteOptions::default().resolution
}

fn default_lemma_box() -> f64 {
    SuiteOptions::default().box_side
}

fn default_suites() -> Vec<Suite> {
    vec![Suite::ThreeLines, Suite::HolderLorentz, Suite::Sunrise]
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self {
            suites: default_suites(),
            cases: None,
            resolution: default_lemma_resolution(),
            box_side: default_lemma_box(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpNormConfig {
    #[serde(default = "default_ps")]
    pub p: Vec<f64>,
    #[serde(default = "one")]
    pub s: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub override_region: bool,
    #[serde(default)]
    pub piece: PieceGrid,
}

fn default_ps() -> Vec<f64> {
    vec![1.5, 2.0, 3.0]
}

fn default_trials() -> usize {
    60
}

impl Default for OpNormConfig {
    fn default() -> Self {
        Self {
            p: default_ps(),
            s: 1.0,
            trials: default_trials(),
            override_region: false,
            piece: PieceGrid::default(),
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    AnalyzeSymbol,
    CheckLemmas,
    EstimateOpnorm,
}

/// A config that failed to parse or validate.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Read { path: PathBuf, message: String },
    Parse { path: String, message: String },
    Invalid(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Read { path, message } => write!(f, "cannot read config {}: {message}", path.display()),
            ConfigError::Parse { path, message } => write!(f, "invalid config at `{path}`: {message}"),
            ConfigError::Invalid(problems) => {
                write!(
                    f,
                    "invalid config ({} problem{}):",
                    problems.len(),
                    if problems.len() == 1 { "" } else { "s" }
                )?;
                for p in problems {
                    write!(f, "\n  - {p}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Parse {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

impl RunConfig {
    pub fn grid(&self) -> crate::Result<Grid> {
        Grid::new(self.dim, self.box_side, self.samples_per_dim)
    }

    pub fn family(&self) -> crate::Result<LittlewoodPaleyFamily> {
        match self.j_range {
            Some([lo, hi]) => LittlewoodPaleyFamily::new(lo, hi),
            None => LittlewoodPaleyFamily::for_grid(&self.grid()?),
        }
    }

    /// Every problem relevant to `command`, collected before any work starts.
    pub fn validate(&self, command: CommandKind) -> Result<(), ConfigError> {
        let mut problems = Vec::new();
        if let Err(e) = self.grid() {
            problems.push(format!("grid: {e}"));
        } else if let Err(e) = self.family() {
            problems.push(format!("j_range: {e}"));
        }
        let needs_symbol = matches!(command, CommandKind::AnalyzeSymbol | CommandKind::EstimateOpnorm);
        if needs_symbol {
            match &self.symbol {
                None => problems.push("symbol: required for this command".into()),
                Some(spec) => {
                    if let Err(e) = spec.validate() {
                        problems.push(format!("symbol: {e}"));
                    }
                    if spec.dim != self.dim {
                        problems.push(format!("symbol.dim: {} differs from dim {}", spec.dim, self.dim));
                    }
                }
            }
        }
        match command {
            CommandKind::AnalyzeSymbol => {
                let a = &self.analyze;
                if a.conditions.is_empty() {
                    problems.push("analyze.conditions: need at least one condition".into());
                }
                for c in &a.conditions {
                    match c {
                        ConditionSpace::Lorentz if !(a.s > 0.0 && a.s < self.dim as f64) => problems.push(format!(
                            "analyze.s: Lorentz condition needs 0 < s < {}, got {}",
                            self.dim, a.s
                        )),
                        ConditionSpace::Sobolev { r } if !(1.0..=2.0).contains(r) => problems.push(format!(
                            "analyze.conditions: Sobolev exponent r must lie in [1, 2], got {r}"
                        )),
                        _ => {}
                    }
                }
                if !(a.s.is_finite() && a.s > 0.0) {
                    problems.push(format!("analyze.s: must be positive, got {}", a.s));
                }
                if let Err(e) = a.piece.validate() {
                    problems.push(format!("analyze.piece: {e}"));
                }
                if let Some(m) = &a.mikhlin {
                    if !(m.r_min > 0.0 && m.r_max > m.r_min) {
                        problems.push(format!(
                            "analyze.mikhlin: need 0 < r_min < r_max, got {} and {}",
                            m.r_min, m.r_max
                        ));
                    }
                    if m.samples == 0 {
                        problems.push("analyze.mikhlin.samples: must be positive".into());
                    }
                }
            }
            CommandKind::CheckLemmas => {
                if self.lemmas.suites.is_empty() {
                    problems.push("lemmas.suites: need at least one suite".into());
                }
                if self.lemmas.cases == Some(0) {
                    problems.push("lemmas.cases: must be positive".into());
                }
                if self.lemmas.resolution < 8 || !self.lemmas.resolution.is_power_of_two() {
                    problems.push(format!(
                        "lemmas.resolution: need a power of two ≥ 8, got {}",
                        self.lemmas.resolution
                    ));
                }
                if !(self.lemmas.box_side.is_finite() && self.lemmas.box_side > 0.0) {
                    problems.push(format!(
                        "lemmas.box_side: must be positive, got {}",
                        self.lemmas.box_side
                    ));
                }
            }
            CommandKind::EstimateOpnorm => {
                let o = &self.opnorm;
                if o.p.is_empty() {
                    problems.push("opnorm.p: need at least one exponent".into());
                }
                if o.trials == 0 {
                    problems.push("opnorm.trials: must be positive".into());
                }
                for &p in &o.p {
                    if let Err(e) = check_region(p, o.s, self.dim) {
                        let region = matches!(&e, crate::Error::Parameter { name: "p, s", .. });
                        if !(region && o.override_region) {
                            problems.push(format!("opnorm: {e}"));
                        }
                    }
                }
                if let Some(spec) = &self.symbol {
                    if !spec.is_bounded() {
                        problems.push("symbol: power-type symbols are unbounded; operator norms are refused".into());
                    }
                }
                if let Err(e) = o.piece.validate() {
                    problems.push(format!("opnorm.piece: {e}"));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(problems))
        }
    }
}
