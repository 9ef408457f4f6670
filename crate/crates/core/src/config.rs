//! Experiment configuration, stored as a sectioned `key = value` TOML file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::approximator::ApproximatorConfig;
use crate::arena::{ArenaConfig, Scenario, ShapeSpec};
use crate::ddqn::{DdqnConfig, EpsilonSchedule};
use crate::error::{Error, Result};
use crate::frameworks::{FrameworkConfig, FrameworkKind, SystemConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub scenario: Scenario,
    /// Custom mask replacing the scenario design.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape_file: Option<PathBuf>,
    pub framework: FrameworkKind,
    pub episodes: usize,
    pub eval_every: usize,
    /// Greedy episodes averaged per evaluation point.
    pub eval_episodes: usize,
    pub trials: usize,
    pub seed: u64,
    /// Concurrent trials; 0 uses every core.
    pub jobs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            scenario: Scenario::Line,
            shape_file: None,
            framework: FrameworkKind::Nested,
            episodes: 3000,
            eval_every: 30,
            eval_episodes: 1,
            trials: 10,
            seed: 1,
            jobs: 0,
            out: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplorationConfig {
    pub eps_start: f64,
    pub eps_main_floor: f64,
    pub eps_nested_floor: f64,
    /// Decay horizon in episodes; unset means `main_horizon_fraction * episodes`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_main_horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_nested_horizon: Option<usize>,
    pub main_horizon_fraction: f64,
    pub nested_horizon_fraction: f64,
}

impl Default for ExplorationConfig {
    fn default() -> Self {
        ExplorationConfig {
            eps_start: 1.0,
            eps_main_floor: 0.01,
            eps_nested_floor: 0.001,
            eps_main_horizon: None,
            eps_nested_horizon: None,
            main_horizon_fraction: 0.2,
            nested_horizon_fraction: 0.8,
        }
    }
}

impl ExplorationConfig {
    pub fn schedules(&self, episodes: usize) -> Result<(EpsilonSchedule, EpsilonSchedule)> {
        let horizon = |explicit: Option<usize>, frac: f64| {
            explicit.unwrap_or_else(|| (frac * episodes as f64).round() as usize)
        };
        Ok((
            EpsilonSchedule::new(
                self.eps_start,
                self.eps_main_floor,
                horizon(self.eps_main_horizon, self.main_horizon_fraction),
            )?,
            EpsilonSchedule::new(
                self.eps_start,
                self.eps_nested_floor,
                horizon(self.eps_nested_horizon, self.nested_horizon_fraction),
            )?,
        ))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub arena: ArenaConfig,
    pub approximator: ApproximatorConfig,
    pub ddqn: DdqnConfig,
    pub exploration: ExplorationConfig,
    pub framework: FrameworkConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serialisable")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        ExperimentConfig::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        if e.episodes == 0 || e.eval_every == 0 || e.eval_episodes == 0 {
            return Err(Error::Config(
                "episodes, eval_every and eval_episodes must be positive".into(),
            ));
        }
        if e.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.arena.max_steps == 0 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        if self.approximator.learning_rate.is_nan() || self.approximator.learning_rate <= 0.0 {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if !(self.framework.main_reward_scale.is_finite()) {
            return Err(Error::Config("main_reward_scale must be finite".into()));
        }
        self.ddqn.validate()?;
        self.exploration.schedules(e.episodes)?;
        Ok(())
    }

    /// The design in use: the mask file if one is given, else the scenario.
    pub fn shape(&self) -> Result<ShapeSpec> {
        match &self.experiment.shape_file {
            Some(path) => ShapeSpec::from_file(path),
            None => Ok(self.experiment.scenario.shape()),
        }
    }

    pub fn system_config(&self) -> Result<SystemConfig> {
        let (main_schedule, nested_schedule) =
            self.exploration.schedules(self.experiment.episodes)?;
        Ok(SystemConfig {
            approximator: self.approximator.clone(),
            ddqn: self.ddqn.clone(),
            framework: self.framework.clone(),
            main_schedule,
            nested_schedule,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddqn::TargetRule;

    #[test]
    fn default_hyperparameters() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.ddqn.replay_capacity, 1_000_000);
        assert_eq!(cfg.ddqn.batch_size, 32);
        assert_eq!(cfg.approximator.hidden, vec![32, 32]);
        assert_eq!(cfg.exploration.eps_start, 1.0);
        assert_eq!(cfg.exploration.eps_nested_floor, 0.001);
        assert_eq!(cfg.experiment.episodes, 3000);
        assert_eq!(cfg.experiment.eval_every, 30);
        assert_eq!(cfg.experiment.trials, 10);
    }

    #[test]
    fn toml_round_trip_is_idempotent() {
        let mut cfg = ExperimentConfig::default();
        cfg.experiment.shape_file = Some("masks/house.txt".into());
        cfg.exploration.eps_main_horizon = Some(123);
        cfg.ddqn.target = TargetRule::Dqn;
        cfg.approximator.learning_rate = 3e-4;
        let text = cfg.to_toml_string();
        let parsed = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(parsed, cfg);
        assert_eq!(parsed.to_toml_string(), text);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = ExperimentConfig::from_toml_str(
            "[experiment]\nscenario = \"diamond\"\nepisodes = 50\n\n[ddqn]\ntarget = \"eq3\"\n",
        )
        .unwrap();
        assert_eq!(cfg.experiment.scenario, Scenario::Diamond);
        assert_eq!(cfg.experiment.episodes, 50);
        assert_eq!(cfg.ddqn.target, TargetRule::Dqn);
        assert_eq!(cfg.ddqn.gamma, 0.99);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_toml_str("[ddqn]\ngama = 0.5\n").is_err());
        assert!(ExperimentConfig::from_toml_str("[nope]\n").is_err());
    }

    #[test]
    fn horizons_default_to_fractions() {
        let cfg = ExperimentConfig::default();
        let (main, nested) = cfg.exploration.schedules(1000).unwrap();
        assert_eq!((main.horizon, nested.horizon), (200, 800));
        assert_eq!((main.floor, nested.floor), (0.01, 0.001));
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut cfg = ExperimentConfig::default();
        cfg.experiment.trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.ddqn.gamma = 1.5;
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::default().validate().is_ok());
    }
}
