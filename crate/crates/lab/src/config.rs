//! Experiment configuration: one TOML file, every field optional.
//!
//! Missing fields take their defaults, and the resolved value (all defaults
//! filled in) is what gets echoed into every summary JSON.

use std::fs;
use std::path::{Path, PathBuf};

use adaptscale_core::engine::{HorizonMode, PolicyKind, PolicySpec, SimConfig};
use adaptscale_core::trace::{Archetype, TraceParams, MIN_SPLIT_LEN};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub const DEFAULT_SEEDS: [u64; 5] = [42, 123, 456, 789, 1337];
pub const DEFAULT_LEVELS_SECONDS: [f64; 5] = [30.0, 60.0, 120.0, 180.0, 300.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub archetypes: Vec<String>,
    pub seeds: Vec<u64>,
    /// `hpa` or `mpc_<forecaster>`.
    pub policies: Vec<String>,
    pub num_steps: usize,
    pub out_dir: PathBuf,
    /// Worker threads for the cell pool; 0 uses one per core.
    pub threads: usize,
    pub trace: TraceParams,
    pub sim: SimConfig,
    pub sensitivity: SensitivityConfig,
    pub abtest: AbTestConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensitivityConfig {
    pub levels_seconds: Vec<f64>,
    pub archetypes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AbTestConfig {
    pub policy: String,
    pub archetypes: Vec<String>,
    pub fixed_horizon: u32,
}

fn names(list: &[Archetype]) -> Vec<String> {
    list.iter().map(|a| a.name().to_string()).collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            archetypes: names(&Archetype::ALL),
            seeds: DEFAULT_SEEDS.to_vec(),
            policies: vec!["hpa".into(), "mpc_des".into(), "mpc_ar_ls".into()],
            num_steps: 500,
            out_dir: PathBuf::from("out"),
            threads: 0,
            trace: TraceParams::default(),
            sim: SimConfig::default(),
            sensitivity: SensitivityConfig::default(),
            abtest: AbTestConfig::default(),
        }
    }
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        Self {
            levels_seconds: DEFAULT_LEVELS_SECONDS.to_vec(),
            archetypes: names(&Archetype::ALL),
        }
    }
}

impl Default for AbTestConfig {
    fn default() -> Self {
        Self {
            policy: "mpc_ar_ls".into(),
            archetypes: names(&[Archetype::DiurnalBurst, Archetype::FlashCrowd]),
            fixed_horizon: 2,
        }
    }
}

fn parse_archetypes(field: &str, list: &[String]) -> Result<Vec<Archetype>> {
    if list.is_empty() {
        return Err(LabError::Config(format!("{field}: must name at least one archetype")));
    }
    list.iter()
        .enumerate()
        .map(|(i, s)| {
            s.parse()
                .map_err(|_| LabError::Config(format!("{field}[{i}]: unknown archetype `{s}`")))
        })
        .collect()
}

fn parse_policy(field: &str, s: &str) -> Result<PolicySpec> {
    s.parse()
        .map_err(|e: adaptscale_core::Error| LabError::Config(format!("{field}: `{s}` is not a known policy ({e})")))
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(LabError::io(path))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            LabError::Config(msg) => LabError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(LabError::Config("seeds: must not be empty".into()));
        }
        self.archetype_list()?;
        self.policy_list()?;
        if self.num_steps < MIN_SPLIT_LEN {
            return Err(LabError::Config(format!("num_steps: must be >= {MIN_SPLIT_LEN}")));
        }
        self.trace.validate()?;
        self.sim.validate()?;
        if self.trace.step_seconds != self.sim.step_seconds {
            return Err(LabError::Config(format!(
                "trace.step_seconds ({}) must equal sim.step_seconds ({})",
                self.trace.step_seconds, self.sim.step_seconds
            )));
        }
        if self.sensitivity.levels_seconds.is_empty() {
            return Err(LabError::Config("sensitivity.levels_seconds: must not be empty".into()));
        }
        for (i, &level) in self.sensitivity.levels_seconds.iter().enumerate() {
            self.sim_at_level(level)
                .validate()
                .map_err(|e| LabError::Config(format!("sensitivity.levels_seconds[{i}] = {level}: {e}")))?;
        }
        parse_archetypes("sensitivity.archetypes", &self.sensitivity.archetypes)?;
        parse_archetypes("abtest.archetypes", &self.abtest.archetypes)?;
        if self.ab_policy()?.kind != PolicyKind::Mpc {
            return Err(LabError::Config("abtest.policy: the horizon A/B needs an mpc policy".into()));
        }
        if self.abtest.fixed_horizon == 0 {
            return Err(LabError::Config("abtest.fixed_horizon: must be >= 1".into()));
        }
        Ok(())
    }

    pub fn archetype_list(&self) -> Result<Vec<Archetype>> {
        parse_archetypes("archetypes", &self.archetypes)
    }

    pub fn policy_list(&self) -> Result<Vec<PolicySpec>> {
        if self.policies.is_empty() {
            return Err(LabError::Config("policies: must name at least one policy".into()));
        }
        self.policies
            .iter()
            .enumerate()
            .map(|(i, s)| parse_policy(&format!("policies[{i}]"), s))
            .collect()
    }

    pub fn sensitivity_archetypes(&self) -> Result<Vec<Archetype>> {
        parse_archetypes("sensitivity.archetypes", &self.sensitivity.archetypes)
    }

    pub fn ab_archetypes(&self) -> Result<Vec<Archetype>> {
        parse_archetypes("abtest.archetypes", &self.abtest.archetypes)
    }

    pub fn ab_policy(&self) -> Result<PolicySpec> {
        parse_policy("abtest.policy", &self.abtest.policy)
    }

    /// The simulation config with the nominal cold start replaced; everything
    /// else is held fixed.
    pub fn sim_at_level(&self, nominal_seconds: f64) -> SimConfig {
        let mut sim = self.sim.clone();
        sim.cold_start.nominal_seconds = nominal_seconds;
        sim
    }

    pub fn sim_with_horizon(&self, mode: HorizonMode) -> SimConfig {
        SimConfig {
            horizon_mode: mode,
            ..self.sim.clone()
        }
    }

    /// Sets the jitter fraction; zero switches jitter off.
    pub fn set_jitter(&mut self, fraction: f64) {
        self.sim.cold_start.jitter_fraction = fraction;
        self.sim.cold_start.jitter_enabled = fraction > 0.0;
    }
}
