//! Run configuration, read from TOML. Unknown keys are rejected.
//!
//! ```toml
//! version = 1
//! action = "solve"
//! seed = 2024
//!
//! [problem]
//! n = 2
//! time_modes = 16
//! tangential = 64
//!
//! [data]
//! generator = "manufactured"
//! recipe = "swirl"
//! ```

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::setup::Problem;
use crate::symbols::audit::AuditLattice;
use crate::verification::estimates::{DataMode, DataSlot, ModeBundle};
use crate::verification::manufactured::{recipe, ExpPoly};
use crate::verification::suites::{Suite, SuiteOptions};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Solve,
    Verify,
    Sweep,
    Besov,
    SymbolsAudit,
}

impl Action {
    pub fn name(&self) -> &'static str {
        match self {
            Action::Solve => "solve",
            Action::Verify => "verify",
            Action::Sweep => "sweep",
            Action::Besov => "besov",
            Action::SymbolsAudit => "symbols-audit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    Force,
    Divergence,
    Boundary,
}

/// One explicitly listed data mode: `amplitude * P(x_n)` at `(time,
/// tangential)` plus its conjugate partner, with
/// `P(x) = (sum_i coeffs[i] x^i) e^{-rate x}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub slot: SlotKind,
    #[serde(default)]
    pub component: usize,
    pub time: i64,
    pub tangential: Vec<i64>,
    /// Real and imaginary part.
    pub amplitude: [f64; 2],
    pub rate: f64,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    #[default]
    Zero,
    Manufactured,
    /// Seeded random few-mode bundles.
    Bundle,
    /// Explicit list of modes.
    Modes,
    /// A tangential boundary datum at the single time frequency `4^level`,
    /// which fills exactly one parabolic dyadic shell.
    SingleShell,
    Files,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    pub generator: Generator,
    /// Recipe name for the manufactured generator.
    pub recipe: Option<String>,
    pub modes: Vec<ModeSpec>,
    pub level: u32,
    /// Field files for the files generator.
    pub force: Option<PathBuf>,
    pub divergence: Option<PathBuf>,
    pub boundary: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Largest relative residual `solve` accepts.
    pub residual: f64,
    /// Relative tolerance of the compatibility checks.
    pub compat: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-10,
            compat: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Suites to run; all when empty.
    pub suites: Vec<Suite>,
    pub oracle_modes: usize,
    pub trials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let d = SuiteOptions::default();
        Self {
            suites: Vec::new(),
            oracle_modes: d.oracle_modes,
            trials: d.trials,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Ensemble size for the bundle and zero generators.
    pub trials: usize,
    /// Also evaluate at `(K/2, N/2)` and report the change.
    pub two_resolutions: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            trials: 50,
            two_resolutions: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BesovConfig {
    /// Smoothness orders; `2 - 1/q` is always included.
    pub s: Vec<f64>,
}

impl Default for BesovConfig {
    fn default() -> Self {
        Self { s: vec![0.5] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditConfig {
    pub min_exp: i32,
    pub max_exp: i32,
    pub per_octave: u32,
    /// Symbol names; all standard symbols when empty.
    pub symbols: Vec<String>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            min_exp: -10,
            max_exp: 10,
            per_octave: 2,
            symbols: Vec::new(),
        }
    }
}

impl AuditConfig {
    pub fn lattice(&self) -> AuditLattice {
        AuditLattice {
            min_exp: self.min_exp,
            max_exp: self.max_exp,
            per_octave: self.per_octave,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default)]
    pub action: Option<Action>,
    /// Not part of the serialized form, so it never enters the config hash.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub problem: Problem,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub besov: BesovConfig,
    #[serde(default)]
    pub audit: AuditConfig,
}

fn default_seed() -> u64 {
    SuiteOptions::default().seed
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            action: None,
            out: None,
            seed: default_seed(),
            problem: Problem::default(),
            data: DataConfig::default(),
            tolerances: Tolerances::default(),
            verify: VerifyConfig::default(),
            sweep: SweepConfig::default(),
            besov: BesovConfig::default(),
            audit: AuditConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Reads a file; relative data paths are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.data.force, &mut cfg.data.divergence, &mut cfg.data.boundary]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        self.problem.validate()?;
        let t = &self.tolerances;
        if !(t.residual > 0.0 && t.compat > 0.0) {
            return Err(Error::Config(format!(
                "tolerances must be positive, got residual = {} and compat = {}",
                t.residual, t.compat
            )));
        }
        let d = &self.data;
        match d.generator {
            Generator::Manufactured => {
                let name = d.recipe.as_deref().ok_or_else(|| Error::Config("data.recipe is required".into()))?;
                let r = recipe(name).ok_or_else(|| Error::Config(format!("unknown recipe {name:?}")))?;
                if r.min_dim > self.problem.n {
                    return Err(Error::Config(format!("recipe {name} needs n >= {}", r.min_dim)));
                }
            }
            Generator::Files => {
                for (key, p) in [("force", &d.force), ("divergence", &d.divergence), ("boundary", &d.boundary)] {
                    let p = p.as_ref().ok_or_else(|| Error::Config(format!("data.{key} is required")))?;
                    if !p.is_file() {
                        return Err(Error::Config(format!("data.{key}: no such file {}", p.display())));
                    }
                }
            }
            Generator::Modes => {
                for (i, m) in d.modes.iter().enumerate() {
                    let comps = if m.slot == SlotKind::Divergence { 1 } else { self.problem.n };
                    if m.component >= comps || m.tangential.len() != self.problem.n - 1 || m.coeffs.is_empty() {
                        return Err(Error::Config(format!("data.modes[{i}] does not fit dimension {}", self.problem.n)));
                    }
                    if !(m.rate > 0.0) {
                        return Err(Error::Config(format!("data.modes[{i}].rate must be positive")));
                    }
                }
            }
            Generator::Zero | Generator::Bundle | Generator::SingleShell => {}
        }
        if self.sweep.trials == 0 || self.verify.trials == 0 {
            return Err(Error::Config("trial counts must be positive".into()));
        }
        if self.audit.per_octave == 0 || self.audit.min_exp > self.audit.max_exp {
            return Err(Error::Config("audit lattice is empty".into()));
        }
        Ok(())
    }

    /// Canonical JSON of the configuration, the input of the config hash.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }
}

impl ModeSpec {
    pub fn to_mode(&self) -> DataMode {
        DataMode {
            slot: match self.slot {
                SlotKind::Force => DataSlot::Force(self.component),
                SlotKind::Divergence => DataSlot::Divergence,
                SlotKind::Boundary => DataSlot::Boundary(self.component),
            },
            time: self.time,
            tangential: self.tangential.clone(),
            amplitude: Complex64::new(self.amplitude[0], self.amplitude[1]),
            profile: ExpPoly::new(self.rate, &self.coeffs),
        }
    }
}

pub fn bundle_of(specs: &[ModeSpec]) -> ModeBundle {
    ModeBundle {
        modes: specs.iter().map(ModeSpec::to_mode).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = RunConfig::parse("version = 1\n").unwrap();
        assert_eq!(cfg, RunConfig::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::parse("version = 1\n[problem]\ntime_mode = 4\n").unwrap_err();
        assert!(err.to_string().contains("time_mode"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn version_is_required_and_checked() {
        assert!(RunConfig::parse("seed = 3\n").is_err());
        let cfg = RunConfig::parse("version = 9\n").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn missing_files_and_recipes_are_config_errors() {
        let cfg = RunConfig::parse(
            "version = 1\n[data]\ngenerator = \"files\"\nforce = \"nope\"\ndivergence = \"nope\"\nboundary = \"nope\"\n",
        )
        .unwrap();
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 2);
        let cfg = RunConfig::parse("version = 1\n[data]\ngenerator = \"manufactured\"\nrecipe = \"nope\"\n").unwrap();
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn suites_and_actions_parse_by_name() {
        let cfg = RunConfig::parse("version = 1\naction = \"symbols-audit\"\n[verify]\nsuites = [\"oracle\", \"audits\"]\n")
            .unwrap();
        assert_eq!(cfg.action, Some(Action::SymbolsAudit));
        assert_eq!(cfg.verify.suites, vec![Suite::Oracle, Suite::Audits]);
    }
}
