//! Experiment specifications read from TOML.
//!
//! ```toml
//! seed = 7
//! replications = 500
//! n_obs_list = [100, 1600]
//! levels = [0.01, 0.05, 0.1]
//! keep_classes = ["JOINT"]
//!
//! [scenario]
//! preset = "I-j"
//!
//! [test]
//! k = 2
//! draws = 2000
//!
//! [methods]
//! joint = ["simulated", "normal"]
//! disjoint = ["simulated", "markov"]
//! ```
//!
//! An inline scenario replaces `preset` with the fields of `ScenarioConfig`.

use std::path::Path;

use cojump::estimators::{TruncationSpec, WindowSpec};
use cojump::resampling::check_draws;
use cojump::{DisjointCutoffMethod, JointCutoffMethod, PathClass, PowerGuard, ScenarioConfig, TestConfig};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Cap on the default number of copies.
pub const MAX_DEFAULT_DRAWS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioSpec {
    Preset { preset: String },
    Inline(ScenarioConfig),
}

impl ScenarioSpec {
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let cfg = match self {
            ScenarioSpec::Preset { preset } => ScenarioConfig::preset(preset)
                .ok_or_else(|| HarnessError::Config(format!("unknown scenario preset {preset:?}")))?,
            ScenarioSpec::Inline(cfg) => cfg.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestSettings {
    pub k: usize,
    /// Truncation multiplier, applied to the norm of the increment.
    pub alpha: f64,
    pub varpi: f64,
    /// Spot window; `round(Δ^{-1/2})` when absent.
    pub kn: Option<usize>,
    /// Copies per path; `⌈1000/α_min⌉` capped at 20000 when absent.
    pub draws: Option<usize>,
    pub power_guard: Option<PowerGuard<f64>>,
}

impl Default for TestSettings {
    fn default() -> Self {
        Self { k: 2, alpha: 0.03, varpi: 0.49, kn: None, draws: None, power_guard: None }
    }
}

impl TestSettings {
    pub fn draws_for(&self, min_level: f64) -> usize {
        self.draws.unwrap_or_else(|| cojump::resampling::default_draws(min_level).min(MAX_DEFAULT_DRAWS))
    }

    /// Test configuration for a series with step `delta`.
    pub fn config(&self, delta: f64, level: f64, n_draws: usize) -> Result<TestConfig<f64>> {
        let window = match self.kn {
            Some(k_n) => WindowSpec::new(k_n)?,
            None => WindowSpec::default_for(delta),
        };
        let cfg = TestConfig {
            k: self.k,
            level,
            trunc: TruncationSpec::joint(self.alpha, self.varpi)?,
            window,
            n_draws,
            power_guard: self.power_guard,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodSelection {
    pub joint: Vec<String>,
    pub disjoint: Vec<String>,
}

impl Default for MethodSelection {
    fn default() -> Self {
        Self { joint: vec!["simulated".into()], disjoint: vec!["simulated".into()] }
    }
}

impl MethodSelection {
    pub fn joint_methods(&self) -> Result<Vec<JointCutoffMethod>> {
        self.joint.iter().map(|s| parse_joint(s)).collect()
    }

    pub fn disjoint_methods(&self) -> Result<Vec<DisjointCutoffMethod>> {
        self.disjoint.iter().map(|s| parse_disjoint(s)).collect()
    }
}

pub fn parse_joint(s: &str) -> Result<JointCutoffMethod> {
    JointCutoffMethod::parse(s).ok_or_else(|| HarnessError::Config(format!("unknown joint method {s:?}")))
}

pub fn parse_disjoint(s: &str) -> Result<DisjointCutoffMethod> {
    DisjointCutoffMethod::parse(s).ok_or_else(|| HarnessError::Config(format!("unknown disjoint method {s:?}")))
}

fn default_attempts() -> usize {
    100
}

fn default_replications() -> usize {
    1000
}

fn default_n_obs() -> Vec<usize> {
    vec![100, 1600]
}

fn default_levels() -> Vec<f64> {
    vec![0.01, 0.05, 0.1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub scenario: ScenarioSpec,
    #[serde(default = "default_n_obs")]
    pub n_obs_list: Vec<usize>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_levels")]
    pub levels: Vec<f64>,
    #[serde(default)]
    pub test: TestSettings,
    #[serde(default)]
    pub methods: MethodSelection,
    #[serde(default)]
    pub seed: u64,
    /// Paths of other classes are redrawn; empty keeps everything.
    #[serde(default)]
    pub keep_classes: Vec<PathClass>,
    /// Draws per replication before it is dropped by screening.
    #[serde(default = "default_attempts")]
    pub max_attempts: usize,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn min_level(&self) -> f64 {
        self.levels.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn n_draws(&self) -> usize {
        self.test.draws_for(self.min_level())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.replications == 0 {
            return bad("replications must be >= 1".into());
        }
        if self.n_obs_list.is_empty() || self.n_obs_list.contains(&0) {
            return bad("n_obs_list must be nonempty with positive entries".into());
        }
        if self.levels.is_empty() {
            return bad("levels must be nonempty".into());
        }
        if let Some(l) = self.levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return bad(format!("level {l} outside (0,1)"));
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be >= 1".into());
        }
        self.scenario.resolve()?;
        let joint = self.methods.joint_methods()?;
        let disjoint = self.methods.disjoint_methods()?;
        if joint.iter().any(|m| matches!(m, JointCutoffMethod::NormalTruncated | JointCutoffMethod::ChebyshevTruncated))
            && self.test.power_guard.is_none()
        {
            return Err(cojump::CojumpError::MissingPowerGuard.into());
        }
        let simulated = joint.contains(&JointCutoffMethod::Simulated)
            || disjoint.iter().any(|d| d.kind == cojump::DisjointCutoffKind::Simulated);
        if simulated {
            check_draws(self.min_level(), self.n_draws())?;
        }
        // window and truncation are checked against a nominal step
        self.test.config(1.0 / self.n_obs_list[0] as f64, self.levels[0], self.n_draws().max(1))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_preset_and_inline() {
        let spec = ExperimentSpec::from_toml(
            r#"
            seed = 3
            replications = 10
            n_obs_list = [100]
            levels = [0.05]
            keep_classes = ["JOINT"]
            [scenario]
            preset = "II-m"
            [methods]
            joint = ["simulated", "chebyshev"]
            disjoint = ["markov"]
            "#,
        )
        .unwrap();
        assert_eq!(spec.scenario.resolve().unwrap(), ScenarioConfig::preset("II-m").unwrap());
        assert_eq!(spec.n_draws(), 20_000);
        assert_eq!(spec.keep_classes, vec![PathClass::Joint]);

        let inline = ExperimentSpec::from_toml(
            r#"
            replications = 2
            [scenario]
            rho = 0.2
            sigma1 = 0.01
            sigma2 = 0.02
            x0 = [1.0, 2.0]
            horizon = 1.0
            fine_steps_per_obs = 1
            sources = [
                { alpha = 0.01, lambda = 2.0, low = 0.1, high = 0.5 },
                { alpha = 0.0, lambda = 0.0, low = 0.0, high = 0.0 },
                { alpha = 0.02, lambda = 1.0, low = 0.1, high = 0.5 },
            ]
            "#,
        )
        .unwrap();
        assert_eq!(inline.scenario.resolve().unwrap().sigma2, 0.02);
    }

    #[test]
    fn rejects_bad_specs() {
        let base = "[scenario]\npreset = \"I-j\"\n";
        for extra in [
            "replications = 0\n",
            "levels = [1.5]\n",
            "[methods]\njoint = [\"bogus\"]\n",
            "[test]\ndraws = 10\n",
        ] {
            let text = if extra.starts_with('[') { format!("{base}{extra}") } else { format!("{extra}{base}") };
            assert!(ExperimentSpec::from_toml(&text).is_err(), "{extra}");
        }
        assert!(ExperimentSpec::from_toml("[scenario]\npreset = \"IV-x\"\n").is_err());
        let guard = format!("{base}[methods]\njoint = [\"normal-truncated\"]\n");
        assert!(matches!(
            ExperimentSpec::from_toml(&guard),
            Err(HarnessError::Stats(cojump::CojumpError::MissingPowerGuard))
        ));
    }
}
