//! Double-DQN learner with uniform experience replay and a periodically
//! synchronised target network.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::approximator::{apply_gradients, Activations, Adam, ApproximatorConfig, Gradients, Mlp};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub s: Vec<f64>,
    pub a: usize,
    pub r: f64,
    pub s_next: Vec<f64>,
    pub done: bool,
}

/// Fixed-capacity FIFO ring of transitions.
#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<Transition>,
    // index of the oldest item once the ring is full
    head: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer {
            capacity,
            items: Vec::new(),
            head: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.head] = t;
            self.head = (self.head + 1) % self.capacity;
        }
    }

    /// Transitions from oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        let (newer, older) = self.items.split_at(self.head);
        older.iter().chain(newer)
    }

    /// Slot index of a uniformly drawn transition.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.gen_range(0..self.items.len())
    }

    pub fn get(&self, slot: usize) -> &Transition {
        &self.items[slot]
    }

    /// `n` transitions drawn uniformly with replacement.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<&Transition> {
        assert!(!self.is_empty(), "sampling from an empty replay buffer");
        (0..n)
            .map(|_| &self.items[self.sample_index(rng)])
            .collect()
    }
}

/// Linear decay from `start` to `floor` over `horizon` episodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub floor: f64,
    pub horizon: usize,
}

impl EpsilonSchedule {
    pub fn new(start: f64, floor: f64, horizon: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&start) || !(0.0..=start).contains(&floor) {
            return Err(Error::Config(format!(
                "epsilon schedule needs 1 >= start >= floor >= 0 (got {start} -> {floor})"
            )));
        }
        Ok(EpsilonSchedule {
            start,
            floor,
            horizon,
        })
    }

    pub fn value(&self, episode: usize) -> f64 {
        if episode >= self.horizon {
            return self.floor;
        }
        let frac = episode as f64 / self.horizon as f64;
        (self.start - (self.start - self.floor) * frac).max(self.floor)
    }
}

/// Which bootstrap target the learner regresses on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetRule {
    /// `r + γ max_a Q_target(s', a)`
    #[serde(rename = "eq3")]
    Dqn,
    /// `r + γ Q_target(s', argmax_a Q_online(s', a))`
    #[default]
    #[serde(rename = "eq4")]
    DoubleDqn,
}

impl std::str::FromStr for TargetRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq3" | "dqn" => Ok(TargetRule::Dqn),
            "eq4" | "ddqn" => Ok(TargetRule::DoubleDqn),
            other => Err(Error::Config(format!(
                "unknown target rule '{other}' (expected eq3 or eq4)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DdqnConfig {
    pub gamma: f64,
    /// Learner steps between target synchronisations.
    pub tau: u64,
    pub batch_size: usize,
    /// Replay size required before the first gradient step.
    pub warmup: usize,
    pub replay_capacity: usize,
    pub target: TargetRule,
}

impl Default for DdqnConfig {
    fn default() -> Self {
        DdqnConfig {
            gamma: 0.99,
            tau: 100,
            batch_size: 32,
            warmup: 500,
            replay_capacity: 1_000_000,
            target: TargetRule::DoubleDqn,
        }
    }
}

impl DdqnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!(
                "gamma {} outside [0, 1]",
                self.gamma
            )));
        }
        if self.tau == 0 || self.batch_size == 0 || self.replay_capacity == 0 {
            return Err(Error::Config(
                "tau, batch_size and replay_capacity must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Bootstrapped regression target for one transition; `scratch` is reused
/// between calls to avoid allocating.
fn target_with(
    online: &Mlp,
    target: &Mlp,
    config: &DdqnConfig,
    t: &Transition,
    scratch: &mut Activations,
) -> f64 {
    if t.done {
        return t.r;
    }
    let bootstrap = match config.target {
        TargetRule::Dqn => {
            target.forward_into(&t.s_next, scratch);
            let q = scratch.output();
            q[argmax(q)]
        }
        TargetRule::DoubleDqn => {
            online.forward_into(&t.s_next, scratch);
            let chosen = argmax(scratch.output());
            target.forward_into(&t.s_next, scratch);
            scratch.output()[chosen]
        }
    };
    t.r + config.gamma * bootstrap
}

#[derive(Clone, Debug)]
pub struct DdqnLearner {
    online: Mlp,
    target: Mlp,
    optimizer: Adam,
    replay: ReplayBuffer,
    config: DdqnConfig,
    steps: u64,
    grads: Gradients,
    acts: Activations,
}

impl DdqnLearner {
    pub fn new<R: Rng + ?Sized>(
        input: usize,
        output: usize,
        approx: &ApproximatorConfig,
        config: DdqnConfig,
        rng: &mut R,
    ) -> Result<Self> {
        let online = Mlp::new(&approx.layer_dims(input, output), rng)?;
        DdqnLearner::from_network(online, approx, config)
    }

    pub fn from_network(
        online: Mlp,
        approx: &ApproximatorConfig,
        config: DdqnConfig,
    ) -> Result<Self> {
        config.validate()?;
        let optimizer = Adam::new(online.params().len(), approx)?;
        Ok(DdqnLearner {
            target: online.clone(),
            grads: Gradients::zeros_like(&online),
            online,
            optimizer,
            replay: ReplayBuffer::new(config.replay_capacity),
            config,
            steps: 0,
            acts: Activations::default(),
        })
    }

    pub fn online(&self) -> &Mlp {
        &self.online
    }

    pub fn target(&self) -> &Mlp {
        &self.target
    }

    pub fn online_mut(&mut self) -> &mut Mlp {
        &mut self.online
    }

    pub fn target_mut(&mut self) -> &mut Mlp {
        &mut self.target
    }

    pub fn replay(&self) -> &ReplayBuffer {
        &self.replay
    }

    pub fn optimizer(&self) -> &Adam {
        &self.optimizer
    }

    pub fn config(&self) -> &DdqnConfig {
        &self.config
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn num_actions(&self) -> usize {
        self.online.output_dim()
    }

    pub fn greedy(&self, obs: &[f64]) -> usize {
        argmax(&self.online.forward(obs))
    }

    /// ε-greedy action selection.
    pub fn act<R: Rng + ?Sized>(&self, obs: &[f64], epsilon: f64, rng: &mut R) -> usize {
        debug_assert!((0.0..=1.0).contains(&epsilon));
        if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
            rng.gen_range(0..self.num_actions())
        } else {
            self.greedy(obs)
        }
    }

    pub fn remember(&mut self, t: Transition) {
        debug_assert_eq!(t.s.len(), self.online.input_dim());
        debug_assert!(t.a < self.num_actions());
        self.replay.push(t);
    }

    pub fn target_value(&self, t: &Transition) -> f64 {
        target_with(
            &self.online,
            &self.target,
            &self.config,
            t,
            &mut Activations::default(),
        )
    }

    pub fn compute_targets(&self, batch: &[&Transition]) -> Vec<f64> {
        batch.iter().map(|t| self.target_value(t)).collect()
    }

    pub fn sync_target(&mut self) {
        self.target.copy_from(&self.online);
    }

    pub fn ready(&self) -> bool {
        self.replay.len() >= self.config.batch_size.max(self.config.warmup)
    }

    /// One minibatch gradient step on the mean squared TD error.
    ///
    /// Returns `Ok(None)` without touching anything while the replay memory is
    /// below warmup.
    pub fn train_step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Option<f64>> {
        if !self.ready() {
            return Ok(None);
        }
        let n = self.config.batch_size;
        let slots: Vec<usize> = (0..n).map(|_| self.replay.sample_index(rng)).collect();
        self.grads.clear();
        let weight = 1.0 / n as f64;
        let mut loss = 0.0;
        for &slot in &slots {
            let t = self.replay.get(slot);
            let y = target_with(&self.online, &self.target, &self.config, t, &mut self.acts);
            let residual = self.online.accumulate_td_gradient(
                &t.s,
                t.a,
                y,
                weight,
                &mut self.acts,
                &mut self.grads,
            );
            loss += residual * residual * weight;
        }
        if !loss.is_finite() {
            return Err(Error::Training(format!(
                "non-finite loss at learner step {}",
                self.steps
            )));
        }
        apply_gradients(&mut self.online, &mut self.optimizer, &self.grads)?;
        self.steps += 1;
        if self.steps.is_multiple_of(self.config.tau) {
            self.sync_target();
        }
        Ok(Some(loss))
    }
}
