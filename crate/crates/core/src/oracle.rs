//! Ground truth for small problems: an exact planner over placement orders and
//! a tabular Q-learner.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arena::{Arena, ArenaConfig, GridPos, Material, NestedAction, ShapeSpec};
use crate::ddqn::{argmax, EpsilonSchedule};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub max_main_reward: i64,
    pub max_nested_return: i64,
    /// Fewest steps that achieve `max_nested_return`.
    pub min_steps: usize,
    pub optimal_material: Material,
    /// False when the node budget ran out; the values are then only what the
    /// search reached, i.e. lower bounds on the optimum.
    pub proven: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlannerOptions {
    pub node_budget: u64,
    /// Shuffles the order in which cells are tried.
    pub order_seed: Option<u64>,
    /// Restrict the main decision to one material.
    pub material: Option<Material>,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions {
            node_budget: 20_000_000,
            order_seed: None,
            material: None,
        }
    }
}

pub fn plan_optimal(shape: &ShapeSpec, max_steps: usize) -> OracleResult {
    plan_optimal_with(shape, max_steps, PlannerOptions::default())
}

/// Best achievable episode under agent-cell drops.
///
/// Every placement is the last step of a walk into the target cell, so a plan
/// is an ordering of design cells and its cost is the sum of Manhattan
/// distances along it. The one exception is the start cell, which needs two
/// steps (out and back) unless it sits on the border where a clamped move
/// drops in place. Placing off-design blocks never helps, and the material
/// constant does not interact with the build, so stone is always optimal.
pub fn plan_optimal_with(
    shape: &ShapeSpec,
    max_steps: usize,
    opts: PlannerOptions,
) -> OracleResult {
    let n = shape.size();
    let start = GridPos::new(n / 2, n / 2);
    let mut cells = shape.mask().positions();
    if let Some(seed) = opts.order_seed {
        cells.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let material = opts.material.unwrap_or(Material::Stone);

    let (placed, steps, proven) = if cells.len() <= 64 {
        let mut search = Search::new(start, &cells, n, max_steps, opts.node_budget);
        search.run();
        let k = search.reachable_depth();
        (k, search.depth_cost[k], !search.exhausted)
    } else {
        let (k, steps) = greedy_plan(start, &cells, n, max_steps);
        (k, steps, false)
    };

    let grid_cells = (n * n) as i64;
    OracleResult {
        max_main_reward: grid_cells - (shape.cell_count() - placed) as i64 + material.penalty(),
        max_nested_return: placed as i64,
        min_steps: steps,
        optimal_material: material,
        proven,
    }
}

fn travel(from: GridPos, to: GridPos, size: usize) -> usize {
    if from != to {
        return from.manhattan(to);
    }
    let on_border = from.x == 0 || from.y == 0 || from.x + 1 == size || from.y + 1 == size;
    if on_border {
        1
    } else {
        2
    }
}

/// Nearest-neighbour order, used past the exact search's size limit.
fn greedy_plan(start: GridPos, cells: &[GridPos], size: usize, max_steps: usize) -> (usize, usize) {
    let mut left: Vec<GridPos> = cells.to_vec();
    let (mut cur, mut cost, mut placed) = (start, 0, 0);
    while !left.is_empty() {
        let (i, d) = left
            .iter()
            .enumerate()
            .map(|(i, &c)| (i, travel(cur, c, size)))
            .min_by_key(|&(_, d)| d)
            .unwrap();
        if cost + d > max_steps {
            break;
        }
        cost += d;
        placed += 1;
        cur = left.swap_remove(i);
    }
    (placed, cost)
}

struct Search {
    n: usize,
    /// `dist[i][j]`, with index `n` standing for the start position.
    dist: Vec<Vec<usize>>,
    max_steps: usize,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    best_full: Option<usize>,
    /// Cheapest cost found for each number of placements.
    depth_cost: Vec<usize>,
    memo: HashMap<(u64, usize), usize>,
}

impl Search {
    fn new(start: GridPos, cells: &[GridPos], size: usize, max_steps: usize, budget: u64) -> Self {
        let n = cells.len();
        let mut points = cells.to_vec();
        points.push(start);
        let dist = points
            .iter()
            .map(|&a| points.iter().map(|&b| travel(a, b, size)).collect())
            .collect();
        let mut depth_cost = vec![usize::MAX; n + 1];
        depth_cost[0] = 0;
        Search {
            n,
            dist,
            max_steps,
            budget,
            nodes: 0,
            exhausted: false,
            best_full: None,
            depth_cost,
            memo: HashMap::new(),
        }
    }

    fn run(&mut self) {
        self.visit(self.n, 0, 0, 0);
    }

    fn reachable_depth(&self) -> usize {
        (0..=self.n)
            .rev()
            .find(|&k| self.depth_cost[k] <= self.max_steps)
            .unwrap_or(0)
    }

    /// Every remaining cell must be entered from the current position or from
    /// another remaining cell; summing those cheapest entries bounds the rest
    /// of the walk from below.
    fn lower_bound(&self, cur: usize, mask: u64) -> usize {
        let remaining = || (0..self.n).filter(move |&i| mask & (1 << i) == 0);
        remaining()
            .map(|r| {
                remaining()
                    .filter(|&u| u != r)
                    .map(|u| self.dist[u][r])
                    .chain(std::iter::once(self.dist[cur][r]))
                    .min()
                    .unwrap()
            })
            .sum()
    }

    fn visit(&mut self, cur: usize, mask: u64, depth: usize, cost: usize) {
        if self.exhausted || cost > self.max_steps {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        self.depth_cost[depth] = self.depth_cost[depth].min(cost);
        if depth == self.n {
            self.best_full = Some(self.best_full.map_or(cost, |b| b.min(cost)));
            return;
        }
        match self.memo.get(&(mask, cur)) {
            Some(&seen) if seen <= cost => return,
            _ => {
                self.memo.insert((mask, cur), cost);
            }
        }
        if let Some(best) = self.best_full {
            if cost + self.lower_bound(cur, mask) >= best {
                return;
            }
        }
        let mut next: Vec<usize> = (0..self.n).filter(|&i| mask & (1 << i) == 0).collect();
        next.sort_by_key(|&i| self.dist[cur][i]);
        for i in next {
            let d = self.dist[cur][i];
            self.visit(i, mask | (1 << i), depth + 1, cost + d);
        }
    }
}

/// Small arena for exact tabular learning.
#[derive(Clone, Debug)]
pub struct MiniArenaSpec {
    pub shape: ShapeSpec,
    pub max_steps: usize,
}

impl MiniArenaSpec {
    pub const MAX_SIZE: usize = 7;
    pub const MAX_CELLS: usize = 5;

    pub fn new(shape: ShapeSpec, max_steps: usize) -> Result<Self> {
        if shape.size() > Self::MAX_SIZE || shape.cell_count() > Self::MAX_CELLS {
            return Err(Error::Config(format!(
                "mini arena limited to {0}x{0} and {1} cells",
                Self::MAX_SIZE,
                Self::MAX_CELLS
            )));
        }
        Ok(MiniArenaSpec { shape, max_steps })
    }

    /// Vertical line of `cells` blocks through the centre of a `size` grid,
    /// starting one row below the centre.
    pub fn line(size: usize, cells: usize, max_steps: usize) -> Result<Self> {
        let c = size / 2;
        let positions: Vec<GridPos> = (0..cells).map(|i| GridPos::new(c, c - 1 + i)).collect();
        MiniArenaSpec::new(
            ShapeSpec::from_cells("mini-line", size, &positions)?,
            max_steps,
        )
    }

    fn arena(&self) -> Result<Arena> {
        let mut arena = Arena::reset(
            self.shape.clone(),
            ArenaConfig {
                max_steps: self.max_steps,
                front_cell_drop: false,
            },
        )?;
        arena.set_material(Material::Stone)?;
        Ok(arena)
    }
}

/// Discrete state `(x, y, blocks_remaining)`.
pub type TabularState = (usize, usize, usize);

fn tabular_state(arena: &Arena) -> TabularState {
    let s = arena.state();
    (s.pos.x, s.pos.y, s.blocks_remaining)
}

#[derive(Clone, Debug)]
pub struct TabularQ {
    table: HashMap<TabularState, [f64; NestedAction::COUNT]>,
    pub alpha: f64,
    pub gamma: f64,
}

impl TabularQ {
    pub fn new(alpha: f64, gamma: f64) -> Self {
        TabularQ {
            table: HashMap::new(),
            alpha,
            gamma,
        }
    }

    /// Action values, zero for unseen states.
    pub fn values(&self, s: TabularState) -> [f64; NestedAction::COUNT] {
        self.table
            .get(&s)
            .copied()
            .unwrap_or([0.0; NestedAction::COUNT])
    }

    pub fn set(&mut self, s: TabularState, a: usize, value: f64) {
        self.table.entry(s).or_insert([0.0; NestedAction::COUNT])[a] = value;
    }

    pub fn max_value(&self, s: TabularState) -> f64 {
        self.values(s).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Q(s,a) += α (r + γ max_a' Q(s',a') − Q(s,a))`; a terminal successor
    /// contributes nothing.
    pub fn update(&mut self, s: TabularState, a: usize, r: f64, next: Option<TabularState>) {
        let future = next.map_or(0.0, |n| self.max_value(n));
        self.update_with_max(s, a, r, future);
    }

    pub fn update_with_max(&mut self, s: TabularState, a: usize, r: f64, max_next: f64) {
        let alpha = self.alpha;
        let gamma = self.gamma;
        let q = &mut self.table.entry(s).or_insert([0.0; NestedAction::COUNT])[a];
        *q += alpha * (r + gamma * max_next - *q);
    }

    pub fn greedy(&self, s: TabularState) -> usize {
        argmax(&self.values(s))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = (&TabularState, &[f64; NestedAction::COUNT])> {
        self.table.iter()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rollout {
    pub nested_return: i64,
    pub main_reward: i64,
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct TabularRun {
    pub q: TabularQ,
    pub rollout: Rollout,
}

/// Q-learning on the mini arena with stone fixed; the reward is the low-level
/// placement reward.
pub fn tabular_q_learn(
    spec: &MiniArenaSpec,
    episodes: usize,
    alpha: f64,
    gamma: f64,
    schedule: EpsilonSchedule,
    seed: u64,
) -> Result<TabularRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = TabularQ::new(alpha, gamma);
    for episode in 0..episodes {
        let eps = schedule.value(episode);
        let mut arena = spec.arena()?;
        loop {
            let s = tabular_state(&arena);
            let a = if rng.gen::<f64>() < eps {
                rng.gen_range(0..NestedAction::COUNT)
            } else {
                q.greedy(s)
            };
            let out = arena.step(NestedAction::ALL[a])?;
            let next = (!out.done).then(|| tabular_state(&arena));
            q.update(s, a, out.reward as f64, next);
            if out.done {
                break;
            }
        }
    }
    let rollout = greedy_rollout(&q, spec)?;
    Ok(TabularRun { q, rollout })
}

pub fn greedy_rollout(q: &TabularQ, spec: &MiniArenaSpec) -> Result<Rollout> {
    let mut arena = spec.arena()?;
    let mut nested_return = 0;
    loop {
        let a = q.greedy(tabular_state(&arena));
        let out = arena.step(NestedAction::ALL[a])?;
        nested_return += out.reward;
        if out.done {
            break;
        }
    }
    Ok(Rollout {
        nested_return,
        main_reward: arena.main_reward()?,
        steps: arena.state().steps_taken,
    })
}
