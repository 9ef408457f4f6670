//! The three agent architectures under comparison.
//!
//! - Nested: a main learner picks the material once per episode; a single nested
//!   learner builds, seeing the main observation with the material appended.
//! - Hierarchical: a top learner picks one of two low-level learners (one per
//!   material); the low-level learners never see the top-level choice.
//! - Flat: one learner over the union of both action sets.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::approximator::ApproximatorConfig;
use crate::arena::{Arena, Material, NestedAction};
use crate::ddqn::{DdqnConfig, DdqnLearner, EpsilonSchedule, Transition};
use crate::error::{Error, Result};

pub const MAIN_OBS_DIM: usize = 3;
pub const NESTED_OBS_DIM: usize = MAIN_OBS_DIM + 1;
pub const MAIN_ACTIONS: usize = 2;
pub const FLAT_ACTIONS: usize = MAIN_ACTIONS + NestedAction::COUNT;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameworkKind {
    Nested,
    Hierarchical,
    Flat,
}

impl FrameworkKind {
    pub const ALL: [FrameworkKind; 3] = [
        FrameworkKind::Nested,
        FrameworkKind::Hierarchical,
        FrameworkKind::Flat,
    ];
}

impl fmt::Display for FrameworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameworkKind::Nested => "nested",
            FrameworkKind::Hierarchical => "hierarchical",
            FrameworkKind::Flat => "flat",
        })
    }
}

impl FromStr for FrameworkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nested" => Ok(FrameworkKind::Nested),
            "hierarchical" => Ok(FrameworkKind::Hierarchical),
            "flat" => Ok(FrameworkKind::Flat),
            other => Err(Error::Config(format!(
                "unknown framework '{other}' (expected nested, hierarchical or flat)"
            ))),
        }
    }
}

/// Knobs specific to how the frameworks feed their learners.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameworkConfig {
    /// Replay warmup for learners that receive one transition per episode
    /// (main, top-level).
    pub main_warmup: usize,
    /// Multiplier applied to the episode score before it is stored as a reward.
    pub main_reward_scale: f64,
    /// Score a flat episode that skipped the material choice with the literal
    /// indicator sum instead of 0.
    pub flat_invalid_literal: bool,
}

impl Default for FrameworkConfig {
    fn default() -> Self {
        FrameworkConfig {
            main_warmup: 32,
            main_reward_scale: 0.01,
            flat_invalid_literal: false,
        }
    }
}

/// Everything needed to build any of the agent systems.
#[derive(Clone, Debug)]
pub struct SystemConfig {
    pub approximator: ApproximatorConfig,
    pub ddqn: DdqnConfig,
    pub framework: FrameworkConfig,
    pub main_schedule: EpsilonSchedule,
    pub nested_schedule: EpsilonSchedule,
}

impl SystemConfig {
    fn main_ddqn(&self) -> DdqnConfig {
        DdqnConfig {
            warmup: self.framework.main_warmup,
            ..self.ddqn.clone()
        }
    }
}

/// How an episode is run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpisodeMode {
    /// ε from the schedules at this episode index; transitions stored and trained.
    Train { episode: usize },
    /// ε = 0, nothing stored, no parameter updates.
    Evaluate,
}

impl EpisodeMode {
    fn training(self) -> bool {
        matches!(self, EpisodeMode::Train { .. })
    }

    fn epsilon(self, schedule: &EpsilonSchedule) -> f64 {
        match self {
            EpisodeMode::Train { episode } => schedule.value(episode),
            EpisodeMode::Evaluate => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpisodeResult {
    /// Episode-level reward (indicator sum plus material constant).
    pub score: i64,
    /// Sum of low-level rewards.
    pub nested_return: i64,
    pub steps: usize,
    pub material: Option<Material>,
    /// Blocks sitting on design cells at the end of the episode.
    pub correct_placements: usize,
}

pub trait AgentSystem: Send {
    fn kind(&self) -> FrameworkKind;

    /// Runs one episode on a freshly reset arena.
    fn run_episode(
        &mut self,
        arena: &mut Arena,
        mode: EpisodeMode,
        rng: &mut dyn RngCore,
    ) -> Result<EpisodeResult>;

    fn learners(&self) -> Vec<&DdqnLearner>;

    /// Exploration rates in force for a training episode: (main-level, low-level).
    fn epsilons(&self, episode: usize) -> (f64, f64);

    /// One optimizer per trained network.
    fn optimizer_count(&self) -> usize {
        self.learners().len()
    }
}

pub fn build_system(
    kind: FrameworkKind,
    cfg: &SystemConfig,
    rng: &mut dyn RngCore,
) -> Result<Box<dyn AgentSystem>> {
    Ok(match kind {
        FrameworkKind::Nested => Box::new(NestedAgentSystem::new(cfg, rng)?),
        FrameworkKind::Hierarchical => Box::new(HierarchicalAgentSystem::new(cfg, rng)?),
        FrameworkKind::Flat => Box::new(FlatAgentSystem::new(cfg, rng)?),
    })
}

fn check_fresh(arena: &Arena) -> Result<()> {
    let s = arena.state();
    if s.steps_taken != 0 || s.material.is_some() || s.terminal {
        return Err(Error::Contract("episode started on a used arena".into()));
    }
    Ok(())
}

fn finish(arena: &Arena, nested_return: i64, steps: usize) -> Result<EpisodeResult> {
    Ok(EpisodeResult {
        score: arena.main_reward()?,
        nested_return,
        steps,
        material: arena.state().material,
        correct_placements: arena.correct_placements(),
    })
}

/// Runs the building phase with a low-level learner until terminal.
/// `augment` is the material code appended to observations, if any.
fn build_phase(
    learner: &mut DdqnLearner,
    arena: &mut Arena,
    augment: Option<Material>,
    epsilon: f64,
    train: bool,
    rng: &mut dyn RngCore,
) -> Result<i64> {
    let observe = |arena: &Arena| match augment {
        Some(m) => arena.observe_nested(m).to_vec(),
        None => arena.observe_main().to_vec(),
    };
    let mut total = 0;
    let mut obs = observe(arena);
    loop {
        let a = learner.act(&obs, epsilon, rng);
        let action = NestedAction::from_index(a).expect("low-level learner has 8 outputs");
        let out = arena.step(action)?;
        total += out.reward;
        let next = observe(arena);
        if train {
            learner.remember(Transition {
                s: obs,
                a,
                r: out.reward as f64,
                s_next: next.clone(),
                done: out.done,
            });
            learner.train_step(rng)?;
        }
        if out.done {
            return Ok(total);
        }
        obs = next;
    }
}

/// Stores and trains the one-step episodic transition for a main-level learner.
fn train_main(
    learner: &mut DdqnLearner,
    obs: [f64; MAIN_OBS_DIM],
    action: usize,
    reward: f64,
    rng: &mut dyn RngCore,
) -> Result<()> {
    learner.remember(Transition {
        s: obs.to_vec(),
        a: action,
        r: reward,
        s_next: obs.to_vec(),
        done: true,
    });
    learner.train_step(rng)?;
    Ok(())
}

pub struct NestedAgentSystem {
    pub main: DdqnLearner,
    pub nested: DdqnLearner,
    pub main_schedule: EpsilonSchedule,
    pub nested_schedule: EpsilonSchedule,
    reward_scale: f64,
}

impl NestedAgentSystem {
    pub fn new(cfg: &SystemConfig, rng: &mut dyn RngCore) -> Result<Self> {
        Ok(NestedAgentSystem {
            main: DdqnLearner::new(
                MAIN_OBS_DIM,
                MAIN_ACTIONS,
                &cfg.approximator,
                cfg.main_ddqn(),
                rng,
            )?,
            nested: DdqnLearner::new(
                NESTED_OBS_DIM,
                NestedAction::COUNT,
                &cfg.approximator,
                cfg.ddqn.clone(),
                rng,
            )?,
            main_schedule: cfg.main_schedule,
            nested_schedule: cfg.nested_schedule,
            reward_scale: cfg.framework.main_reward_scale,
        })
    }
}

impl AgentSystem for NestedAgentSystem {
    fn kind(&self) -> FrameworkKind {
        FrameworkKind::Nested
    }

    fn run_episode(
        &mut self,
        arena: &mut Arena,
        mode: EpisodeMode,
        rng: &mut dyn RngCore,
    ) -> Result<EpisodeResult> {
        check_fresh(arena)?;
        let s_main = arena.observe_main();
        let a_main = self
            .main
            .act(&s_main, mode.epsilon(&self.main_schedule), rng);
        let material = Material::from_index(a_main).expect("main learner has 2 outputs");
        arena.set_material(material)?;

        let eps = mode.epsilon(&self.nested_schedule);
        let nested_return = build_phase(
            &mut self.nested,
            arena,
            Some(material),
            eps,
            mode.training(),
            rng,
        )?;
        let result = finish(arena, nested_return, arena.state().steps_taken)?;
        if mode.training() {
            let r = result.score as f64 * self.reward_scale;
            train_main(&mut self.main, s_main, a_main, r, rng)?;
        }
        Ok(result)
    }

    fn learners(&self) -> Vec<&DdqnLearner> {
        vec![&self.main, &self.nested]
    }

    fn epsilons(&self, episode: usize) -> (f64, f64) {
        (
            self.main_schedule.value(episode),
            self.nested_schedule.value(episode),
        )
    }
}

pub struct HierarchicalAgentSystem {
    pub top: DdqnLearner,
    /// Low-level learners indexed by material.
    pub low: [DdqnLearner; 2],
    pub main_schedule: EpsilonSchedule,
    pub nested_schedule: EpsilonSchedule,
    reward_scale: f64,
}

impl HierarchicalAgentSystem {
    pub fn new(cfg: &SystemConfig, rng: &mut dyn RngCore) -> Result<Self> {
        let top = DdqnLearner::new(
            MAIN_OBS_DIM,
            MAIN_ACTIONS,
            &cfg.approximator,
            cfg.main_ddqn(),
            rng,
        )?;
        let mut low_level = || {
            DdqnLearner::new(
                MAIN_OBS_DIM,
                NestedAction::COUNT,
                &cfg.approximator,
                cfg.ddqn.clone(),
                rng,
            )
        };
        let wood = low_level()?;
        let stone = low_level()?;
        Ok(HierarchicalAgentSystem {
            top,
            low: [wood, stone],
            main_schedule: cfg.main_schedule,
            nested_schedule: cfg.nested_schedule,
            reward_scale: cfg.framework.main_reward_scale,
        })
    }
}

impl AgentSystem for HierarchicalAgentSystem {
    fn kind(&self) -> FrameworkKind {
        FrameworkKind::Hierarchical
    }

    fn run_episode(
        &mut self,
        arena: &mut Arena,
        mode: EpisodeMode,
        rng: &mut dyn RngCore,
    ) -> Result<EpisodeResult> {
        check_fresh(arena)?;
        let s_top = arena.observe_main();
        let choice = self.top.act(&s_top, mode.epsilon(&self.main_schedule), rng);
        let material = Material::from_index(choice).expect("top learner has 2 outputs");
        arena.set_material(material)?;

        let eps = mode.epsilon(&self.nested_schedule);
        let worker = &mut self.low[material.index()];
        let nested_return = build_phase(worker, arena, None, eps, mode.training(), rng)?;
        let result = finish(arena, nested_return, arena.state().steps_taken)?;
        if mode.training() {
            let r = result.score as f64 * self.reward_scale;
            train_main(&mut self.top, s_top, choice, r, rng)?;
        }
        Ok(result)
    }

    fn learners(&self) -> Vec<&DdqnLearner> {
        vec![&self.top, &self.low[0], &self.low[1]]
    }

    fn epsilons(&self, episode: usize) -> (f64, f64) {
        (
            self.main_schedule.value(episode),
            self.nested_schedule.value(episode),
        )
    }
}

/// Single learner over `[wood, stone, F, B, L, R, FD, LD, RD, BD]`.
///
/// The first action must pick a material or the episode ends at once. Later
/// material actions only spend a step. Low-level rewards are paid per step and
/// the scaled episode score is added on the terminal transition.
pub struct FlatAgentSystem {
    pub agent: DdqnLearner,
    pub schedule: EpsilonSchedule,
    reward_scale: f64,
    invalid_literal: bool,
}

impl FlatAgentSystem {
    pub fn new(cfg: &SystemConfig, rng: &mut dyn RngCore) -> Result<Self> {
        Ok(FlatAgentSystem {
            agent: DdqnLearner::new(
                MAIN_OBS_DIM,
                FLAT_ACTIONS,
                &cfg.approximator,
                cfg.ddqn.clone(),
                rng,
            )?,
            schedule: cfg.nested_schedule,
            reward_scale: cfg.framework.main_reward_scale,
            invalid_literal: cfg.framework.flat_invalid_literal,
        })
    }

    fn invalid_score(&self, arena: &Arena) -> i64 {
        if self.invalid_literal {
            arena.indicator_sum()
        } else {
            0
        }
    }
}

impl AgentSystem for FlatAgentSystem {
    fn kind(&self) -> FrameworkKind {
        FrameworkKind::Flat
    }

    fn run_episode(
        &mut self,
        arena: &mut Arena,
        mode: EpisodeMode,
        rng: &mut dyn RngCore,
    ) -> Result<EpisodeResult> {
        check_fresh(arena)?;
        let train = mode.training();
        let eps = mode.epsilon(&self.schedule);

        let s0 = arena.observe_main().to_vec();
        let first = self.agent.act(&s0, eps, rng);
        let Some(material) = Material::from_index(first) else {
            arena.abort();
            let score = self.invalid_score(arena);
            if train {
                self.agent.remember(Transition {
                    s: s0.clone(),
                    a: first,
                    r: score as f64 * self.reward_scale,
                    s_next: s0,
                    done: true,
                });
                self.agent.train_step(rng)?;
            }
            return Ok(EpisodeResult {
                score,
                nested_return: 0,
                steps: 1,
                material: None,
                correct_placements: 0,
            });
        };
        arena.set_material(material)?;
        let mut obs = arena.observe_main().to_vec();
        if train {
            self.agent.remember(Transition {
                s: s0,
                a: first,
                r: 0.0,
                s_next: obs.clone(),
                done: false,
            });
            self.agent.train_step(rng)?;
        }

        let mut nested_return = 0;
        loop {
            let a = self.agent.act(&obs, eps, rng);
            let out = match NestedAction::from_index(a.wrapping_sub(MAIN_ACTIONS)) {
                Some(action) => arena.step(action)?,
                None => arena.idle()?,
            };
            nested_return += out.reward;
            let next = arena.observe_main().to_vec();
            if train {
                let mut r = out.reward as f64;
                if out.done {
                    r += arena.main_reward()? as f64 * self.reward_scale;
                }
                self.agent.remember(Transition {
                    s: obs,
                    a,
                    r,
                    s_next: next.clone(),
                    done: out.done,
                });
                self.agent.train_step(rng)?;
            }
            if out.done {
                break;
            }
            obs = next;
        }
        finish(arena, nested_return, arena.state().steps_taken + 1)
    }

    fn learners(&self) -> Vec<&DdqnLearner> {
        vec![&self.agent]
    }

    fn epsilons(&self, episode: usize) -> (f64, f64) {
        let e = self.schedule.value(episode);
        (e, e)
    }
}
