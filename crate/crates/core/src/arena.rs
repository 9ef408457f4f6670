//! Block-building grid world.
//!
//! The agent walks a square grid (15×15 by default), carries a fixed budget of
//! blocks equal to the number of cells in the target design, and drops blocks
//! while moving. A block dropped on a design cell earns the low-level reward 1;
//! the episode-level reward counts every cell where the placement matrix agrees
//! with the design and adds a material-dependent constant.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ARENA_SIZE: usize = 15;
pub const DEFAULT_MAX_STEPS: usize = 500;

/// Building material chosen once per episode by the main agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Material {
    Wood,
    Stone,
}

impl Material {
    pub const ALL: [Material; 2] = [Material::Wood, Material::Stone];

    /// Constant added to the episode reward.
    pub fn penalty(self) -> i64 {
        match self {
            Material::Wood => -5,
            Material::Stone => 10,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Material::Wood => 0,
            Material::Stone => 1,
        }
    }

    pub fn from_index(index: usize) -> Option<Material> {
        Material::ALL.get(index).copied()
    }

    /// Encoding appended to the nested agent's observation.
    pub fn code(self) -> f64 {
        self.index() as f64
    }
}

impl fmt::Display for Material {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Material::Wood => f.write_str("wood"),
            Material::Stone => f.write_str("stone"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridPos {
    pub x: usize,
    pub y: usize,
}

impl GridPos {
    pub fn new(x: usize, y: usize) -> Self {
        GridPos { x, y }
    }

    pub fn manhattan(self, other: GridPos) -> usize {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }
}

impl fmt::Display for GridPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Square boolean matrix indexed by `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    size: usize,
    cells: Vec<bool>,
}

impl Grid {
    pub fn new(size: usize) -> Self {
        Grid {
            size,
            cells: vec![false; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, pos: GridPos) -> bool {
        self.cells[pos.y * self.size + pos.x]
    }

    pub fn set(&mut self, pos: GridPos, value: bool) {
        self.cells[pos.y * self.size + pos.x] = value;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Positions of all true cells, row by row.
    pub fn positions(&self) -> Vec<GridPos> {
        (0..self.size)
            .flat_map(|y| (0..self.size).map(move |x| GridPos::new(x, y)))
            .filter(|&p| self.get(p))
            .collect()
    }
}

/// Built-in scenario designs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Line,
    Zigzag,
    Diamond,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Line, Scenario::Zigzag, Scenario::Diamond];

    pub fn shape(self) -> ShapeSpec {
        match self {
            Scenario::Line => ShapeSpec::line(),
            Scenario::Zigzag => ShapeSpec::zigzag(),
            Scenario::Diamond => ShapeSpec::diamond(),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Line => "line",
            Scenario::Zigzag => "zigzag",
            Scenario::Diamond => "diamond",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "line" => Ok(Scenario::Line),
            "zigzag" => Ok(Scenario::Zigzag),
            "diamond" => Ok(Scenario::Diamond),
            other => Err(Error::Config(format!(
                "unknown scenario '{other}' (expected line, zigzag or diamond)"
            ))),
        }
    }
}

/// Target design: the cells that should end up holding a block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeSpec {
    name: String,
    mask: Grid,
    cell_count: usize,
}

impl ShapeSpec {
    pub fn new(name: impl Into<String>, mask: Grid) -> Result<Self> {
        let cell_count = mask.count();
        if mask.size() == 0 {
            return Err(Error::Config("shape mask has zero size".into()));
        }
        if cell_count == 0 {
            return Err(Error::Config("shape mask has no cells".into()));
        }
        Ok(ShapeSpec {
            name: name.into(),
            mask,
            cell_count,
        })
    }

    pub fn from_cells(name: impl Into<String>, size: usize, cells: &[GridPos]) -> Result<Self> {
        let mut mask = Grid::new(size);
        for &c in cells {
            if c.x >= size || c.y >= size {
                return Err(Error::Config(format!(
                    "cell {c} outside a {size}x{size} grid"
                )));
            }
            mask.set(c, true);
        }
        ShapeSpec::new(name, mask)
    }

    /// Vertical line through the centre column.
    pub fn line() -> Self {
        let cells: Vec<_> = (0..ARENA_SIZE).map(|y| GridPos::new(7, y)).collect();
        ShapeSpec::from_cells("line", ARENA_SIZE, &cells).expect("line mask is valid")
    }

    /// Triangle wave `x = 3 + tri(y)` with `tri` cycling 0,1,2,3,4,3,2,1.
    pub fn zigzag() -> Self {
        const TRI: [usize; 8] = [0, 1, 2, 3, 4, 3, 2, 1];
        let cells: Vec<_> = (0..ARENA_SIZE)
            .map(|y| GridPos::new(3 + TRI[y % TRI.len()], y))
            .collect();
        ShapeSpec::from_cells("zigzag", ARENA_SIZE, &cells).expect("zigzag mask is valid")
    }

    /// Cells at Manhattan distance 4 from the centre.
    pub fn diamond() -> Self {
        let centre = GridPos::new(7, 7);
        let cells: Vec<_> = (0..ARENA_SIZE)
            .flat_map(|y| (0..ARENA_SIZE).map(move |x| GridPos::new(x, y)))
            .filter(|p| p.manhattan(centre) == 4)
            .collect();
        ShapeSpec::from_cells("diamond", ARENA_SIZE, &cells).expect("diamond mask is valid")
    }

    /// Parses a mask of `size` lines with `size` characters each: `#` marks a
    /// design cell, `.` an empty one. Line 1 is row `y = 0`.
    pub fn parse(name: impl Into<String>, text: &str, size: usize) -> Result<Self> {
        let mut mask = Grid::new(size);
        let mut rows = 0;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if rows == size {
                if line.is_empty() {
                    continue;
                }
                return Err(Error::Mask {
                    line: line_no,
                    message: format!("expected {size} rows, found more"),
                });
            }
            let chars: Vec<char> = line.chars().collect();
            if chars.len() != size {
                return Err(Error::Mask {
                    line: line_no,
                    message: format!("expected {size} characters, found {}", chars.len()),
                });
            }
            for (x, c) in chars.into_iter().enumerate() {
                match c {
                    '#' => mask.set(GridPos::new(x, rows), true),
                    '.' => {}
                    other => {
                        return Err(Error::Mask {
                            line: line_no,
                            message: format!("unexpected character {other:?} in column {}", x + 1),
                        })
                    }
                }
            }
            rows += 1;
        }
        if rows != size {
            return Err(Error::Mask {
                line: rows + 1,
                message: format!("expected {size} rows, found {rows}"),
            });
        }
        ShapeSpec::new(name, mask).map_err(|e| Error::Mask {
            line: 1,
            message: e.to_string(),
        })
    }

    /// Loads a 15×15 mask file; the shape is named after the file stem.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".into());
        ShapeSpec::parse(name, &text, ARENA_SIZE)
    }

    pub fn to_text(&self) -> String {
        let n = self.mask.size();
        let mut out = String::with_capacity(n * (n + 1));
        for y in 0..n {
            for x in 0..n {
                out.push(if self.mask.get(GridPos::new(x, y)) {
                    '#'
                } else {
                    '.'
                });
            }
            out.push('\n');
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mask(&self) -> &Grid {
        &self.mask
    }

    pub fn size(&self) -> usize {
        self.mask.size()
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn contains(&self, pos: GridPos) -> bool {
        self.mask.get(pos)
    }
}

/// The eight low-level actions: four moves, each optionally followed by a drop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NestedAction {
    F,
    B,
    L,
    R,
    FD,
    LD,
    RD,
    BD,
}

impl NestedAction {
    pub const ALL: [NestedAction; 8] = [
        NestedAction::F,
        NestedAction::B,
        NestedAction::L,
        NestedAction::R,
        NestedAction::FD,
        NestedAction::LD,
        NestedAction::RD,
        NestedAction::BD,
    ];
    pub const COUNT: usize = 8;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<NestedAction> {
        NestedAction::ALL.get(index).copied()
    }

    pub fn drops(self) -> bool {
        self.index() >= 4
    }

    /// Movement as `(dx, dy)`. Forward is `+y`, right is `+x`.
    pub fn delta(self) -> (isize, isize) {
        match self {
            NestedAction::F | NestedAction::FD => (0, 1),
            NestedAction::B | NestedAction::BD => (0, -1),
            NestedAction::L | NestedAction::LD => (-1, 0),
            NestedAction::R | NestedAction::RD => (1, 0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArenaConfig {
    /// Step cap per episode.
    pub max_steps: usize,
    /// Place blocks on the cell in front of (`+y` from) the agent instead of
    /// under it.
    pub front_cell_drop: bool,
}

impl Default for ArenaConfig {
    fn default() -> Self {
        ArenaConfig {
            max_steps: DEFAULT_MAX_STEPS,
            front_cell_drop: false,
        }
    }
}

/// Full environment snapshot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArenaState {
    pub pos: GridPos,
    /// Cells where a block has been placed.
    pub k: Grid,
    pub material: Option<Material>,
    pub blocks_remaining: usize,
    pub initial_budget: usize,
    pub steps_taken: usize,
    pub terminal: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    /// Low-level reward: 1 for a block placed on a design cell, else 0.
    pub reward: i64,
    pub done: bool,
}

/// Number of cells where placements agree with the design, counted over the
/// whole grid (empty cells that should stay empty count too).
pub fn indicator_sum(state: &ArenaState, shape: &ShapeSpec) -> i64 {
    debug_assert_eq!(state.k.size(), shape.size());
    state
        .k
        .cells
        .iter()
        .zip(&shape.mask.cells)
        .filter(|(k, s)| k == s)
        .count() as i64
}

/// Arena instance: a design plus the evolving state.
#[derive(Clone, Debug)]
pub struct Arena {
    shape: ShapeSpec,
    config: ArenaConfig,
    state: ArenaState,
}

impl Arena {
    pub fn reset(shape: ShapeSpec, config: ArenaConfig) -> Result<Self> {
        if config.max_steps == 0 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        let state = Arena::fresh_state(&shape);
        Ok(Arena {
            shape,
            config,
            state,
        })
    }

    /// Starts a new episode on the same design.
    pub fn restart(&mut self) {
        self.state = Arena::fresh_state(&self.shape);
    }

    fn fresh_state(shape: &ShapeSpec) -> ArenaState {
        let n = shape.size();
        ArenaState {
            pos: GridPos::new(n / 2, n / 2),
            k: Grid::new(n),
            material: None,
            blocks_remaining: shape.cell_count(),
            initial_budget: shape.cell_count(),
            steps_taken: 0,
            terminal: false,
        }
    }

    pub fn state(&self) -> &ArenaState {
        &self.state
    }

    pub fn shape(&self) -> &ShapeSpec {
        &self.shape
    }

    pub fn config(&self) -> &ArenaConfig {
        &self.config
    }

    pub fn set_material(&mut self, material: Material) -> Result<()> {
        if let Some(current) = self.state.material {
            return Err(Error::IllegalAction(format!(
                "material already set to {current}"
            )));
        }
        if self.state.steps_taken != 0 {
            return Err(Error::IllegalAction(
                "material can only be chosen before the first step".into(),
            ));
        }
        self.state.material = Some(material);
        Ok(())
    }

    pub fn step(&mut self, action: NestedAction) -> Result<StepOutcome> {
        self.check_can_step()?;
        let n = self.shape.size() as isize;
        let (dx, dy) = action.delta();
        let pos = self.state.pos;
        let new_pos = GridPos::new(
            (pos.x as isize + dx).clamp(0, n - 1) as usize,
            (pos.y as isize + dy).clamp(0, n - 1) as usize,
        );
        self.state.pos = new_pos;

        let mut reward = 0;
        if action.drops() {
            let target = if self.config.front_cell_drop {
                (new_pos.y + 1 < n as usize).then(|| GridPos::new(new_pos.x, new_pos.y + 1))
            } else {
                Some(new_pos)
            };
            if let Some(cell) = target.filter(|&c| !self.state.k.get(c)) {
                self.state.k.set(cell, true);
                self.state.blocks_remaining -= 1;
                reward = i64::from(self.shape.contains(cell));
            }
        }
        Ok(StepOutcome {
            reward,
            done: self.advance_clock(),
        })
    }

    /// Spends one step without touching the grid.
    pub fn idle(&mut self) -> Result<StepOutcome> {
        self.check_can_step()?;
        Ok(StepOutcome {
            reward: 0,
            done: self.advance_clock(),
        })
    }

    fn check_can_step(&self) -> Result<()> {
        if self.state.terminal {
            return Err(Error::IllegalAction("step after terminal".into()));
        }
        if self.state.material.is_none() {
            return Err(Error::IllegalAction("no material chosen".into()));
        }
        Ok(())
    }

    fn advance_clock(&mut self) -> bool {
        self.state.steps_taken += 1;
        self.state.terminal =
            self.state.blocks_remaining == 0 || self.state.steps_taken >= self.config.max_steps;
        self.state.terminal
    }

    /// Ends the episode early. Used when the flat agent skips the material choice.
    pub fn abort(&mut self) {
        self.state.terminal = true;
    }

    pub fn indicator_sum(&self) -> i64 {
        indicator_sum(&self.state, &self.shape)
    }

    /// Episode-level reward: indicator sum plus the material constant.
    pub fn main_reward(&self) -> Result<i64> {
        if !self.state.terminal {
            return Err(Error::Contract(
                "main reward requested before terminal".into(),
            ));
        }
        let material = self
            .state
            .material
            .ok_or_else(|| Error::Contract("main reward requested without a material".into()))?;
        Ok(self.indicator_sum() + material.penalty())
    }

    /// Diagnostic only: blocks sitting on design cells.
    pub fn correct_placements(&self) -> usize {
        self.shape
            .mask
            .positions()
            .into_iter()
            .filter(|&p| self.state.k.get(p))
            .count()
    }

    pub fn observe_main(&self) -> [f64; 3] {
        let span = (self.shape.size() - 1).max(1) as f64;
        let s = &self.state;
        [
            s.pos.x as f64 / span,
            s.pos.y as f64 / span,
            s.blocks_remaining as f64 / s.initial_budget as f64,
        ]
    }

    pub fn observe_nested(&self, main_action: Material) -> [f64; 4] {
        let [x, y, b] = self.observe_main();
        [x, y, b, main_action.code()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arena(shape: ShapeSpec) -> Arena {
        Arena::reset(shape, ArenaConfig::default()).unwrap()
    }

    fn walk(arena: &mut Arena, actions: &[NestedAction]) -> i64 {
        actions.iter().map(|&a| arena.step(a).unwrap().reward).sum()
    }

    #[test]
    fn canonical_cell_counts() {
        assert_eq!(ShapeSpec::line().cell_count(), 15);
        assert_eq!(ShapeSpec::zigzag().cell_count(), 15);
        // |x-7|+|y-7| = 4 enumerated independently
        let mut diamond = 0;
        for x in 0..15i32 {
            for y in 0..15i32 {
                if (x - 7).abs() + (y - 7).abs() == 4 {
                    diamond += 1;
                }
            }
        }
        assert_eq!(diamond, 16);
        assert_eq!(ShapeSpec::diamond().cell_count(), diamond);
    }

    #[test]
    fn zigzag_is_one_cell_per_row() {
        let z = ShapeSpec::zigzag();
        let xs: Vec<usize> = (0..15)
            .map(|y| (0..15).find(|&x| z.contains(GridPos::new(x, y))).unwrap())
            .collect();
        assert_eq!(xs, vec![3, 4, 5, 6, 7, 6, 5, 4, 3, 4, 5, 6, 7, 6, 5]);
    }

    #[test]
    fn reset_budget_and_start() {
        let a = arena(ShapeSpec::line());
        let s = a.state();
        assert_eq!(s.pos, GridPos::new(7, 7));
        assert_eq!(s.blocks_remaining, 15);
        assert_eq!(s.k.count(), 0);
        assert_eq!(s.steps_taken, 0);
        assert!(s.material.is_none() && !s.terminal);
        assert_eq!(arena(ShapeSpec::diamond()).state().blocks_remaining, 16);
    }

    #[test]
    fn reset_rejects_zero_step_cap() {
        let cfg = ArenaConfig {
            max_steps: 0,
            ..ArenaConfig::default()
        };
        assert!(matches!(
            Arena::reset(ShapeSpec::line(), cfg),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn material_is_set_once() {
        let mut a = arena(ShapeSpec::line());
        a.set_material(Material::Wood).unwrap();
        assert_eq!(a.state().material.unwrap().penalty(), -5);
        assert!(matches!(
            a.set_material(Material::Stone),
            Err(Error::IllegalAction(_))
        ));
        let mut b = arena(ShapeSpec::line());
        b.set_material(Material::Stone).unwrap();
        assert_eq!(b.state().material.unwrap().penalty(), 10);
    }

    #[test]
    fn step_requires_material() {
        let mut a = arena(ShapeSpec::line());
        assert!(matches!(
            a.step(NestedAction::F),
            Err(Error::IllegalAction(_))
        ));
    }

    #[test]
    fn pure_move_earns_nothing() {
        let mut a = arena(ShapeSpec::line());
        a.set_material(Material::Stone).unwrap();
        let out = a.step(NestedAction::R).unwrap();
        assert_eq!(a.state().pos, GridPos::new(8, 7));
        assert_eq!(out.reward, 0);
        assert_eq!(a.state().blocks_remaining, 15);
    }

    #[test]
    fn forward_drop_on_line() {
        let mut a = arena(ShapeSpec::line());
        a.set_material(Material::Stone).unwrap();
        walk(&mut a, &[NestedAction::B; 4]);
        assert_eq!(a.state().pos, GridPos::new(7, 3));
        let out = a.step(NestedAction::FD).unwrap();
        assert_eq!(a.state().pos, GridPos::new(7, 4));
        assert!(a.state().k.get(GridPos::new(7, 4)));
        assert_eq!(out.reward, 1);
        assert_eq!(a.state().blocks_remaining, 14);
    }

    #[test]
    fn drop_on_occupied_cell_is_noop() {
        let mut a = arena(ShapeSpec::line());
        a.set_material(Material::Stone).unwrap();
        a.step(NestedAction::FD).unwrap();
        a.step(NestedAction::F).unwrap();
        let out = a.step(NestedAction::BD).unwrap();
        assert_eq!(out.reward, 0);
        assert_eq!(a.state().blocks_remaining, 14);
        assert_eq!(a.state().k.count(), 1);
    }

    #[test]
    fn moves_clamp_at_boundary() {
        let mut a = arena(ShapeSpec::line());
        a.set_material(Material::Wood).unwrap();
        walk(&mut a, &[NestedAction::L; 10]);
        assert_eq!(a.state().pos, GridPos::new(0, 7));
        // clamped drop lands on the current cell
        a.step(NestedAction::LD).unwrap();
        assert!(a.state().k.get(GridPos::new(0, 7)));
    }

    #[test]
    fn front_cell_drop_places_ahead() {
        let cfg = ArenaConfig {
            front_cell_drop: true,
            ..ArenaConfig::default()
        };
        let mut a = Arena::reset(ShapeSpec::line(), cfg).unwrap();
        a.set_material(Material::Stone).unwrap();
        let out = a.step(NestedAction::RD).unwrap();
        assert_eq!(a.state().pos, GridPos::new(8, 7));
        assert!(a.state().k.get(GridPos::new(8, 8)));
        assert_eq!(out.reward, 0);
        // nothing in front of the top row
        walk(&mut a, &[NestedAction::F; 10]);
        let before = a.state().blocks_remaining;
        a.step(NestedAction::FD).unwrap();
        assert_eq!(a.state().blocks_remaining, before);
    }

    #[test]
    fn step_cap_terminates() {
        let cfg = ArenaConfig {
            max_steps: 3,
            ..ArenaConfig::default()
        };
        let mut a = Arena::reset(ShapeSpec::line(), cfg).unwrap();
        a.set_material(Material::Wood).unwrap();
        assert!(!a.step(NestedAction::F).unwrap().done);
        assert!(!a.idle().unwrap().done);
        assert!(a.step(NestedAction::F).unwrap().done);
        assert!(matches!(
            a.step(NestedAction::F),
            Err(Error::IllegalAction(_))
        ));
    }

    fn perfect_line(a: &mut Arena) {
        use NestedAction::*;
        let mut plan = vec![FD; 7];
        plan.extend([BD; 15]);
        for act in plan {
            if a.state().terminal {
                break;
            }
            a.step(act).unwrap();
        }
    }

    #[test]
    fn indicator_sum_examples() {
        let mut a = arena(ShapeSpec::line());
        assert_eq!(a.indicator_sum(), 210);
        a.set_material(Material::Stone).unwrap();
        a.step(NestedAction::RD).unwrap();
        assert_eq!(a.indicator_sum(), 209);

        let mut b = arena(ShapeSpec::line());
        b.set_material(Material::Stone).unwrap();
        perfect_line(&mut b);
        assert_eq!(b.state().k, *b.shape().mask());
        assert_eq!(b.indicator_sum(), 225);
    }

    #[test]
    fn main_reward_examples() {
        let mut stone = arena(ShapeSpec::line());
        stone.set_material(Material::Stone).unwrap();
        perfect_line(&mut stone);
        assert!(stone.state().terminal);
        assert_eq!(stone.main_reward().unwrap(), 235);
        assert_eq!(stone.correct_placements(), 15);

        let mut wood = arena(ShapeSpec::line());
        wood.set_material(Material::Wood).unwrap();
        perfect_line(&mut wood);
        assert_eq!(wood.main_reward().unwrap(), 220);

        let cfg = ArenaConfig {
            max_steps: 1,
            ..ArenaConfig::default()
        };
        let mut empty = Arena::reset(ShapeSpec::line(), cfg).unwrap();
        empty.set_material(Material::Wood).unwrap();
        empty.step(NestedAction::F).unwrap();
        assert_eq!(empty.main_reward().unwrap(), 205);
    }

    #[test]
    fn main_reward_before_terminal_is_error() {
        let mut a = arena(ShapeSpec::line());
        a.set_material(Material::Stone).unwrap();
        assert!(matches!(a.main_reward(), Err(Error::Contract(_))));
    }

    #[test]
    fn observations() {
        let mut a = arena(ShapeSpec::line());
        a.set_material(Material::Stone).unwrap();
        for _ in 0..7 {
            a.step(NestedAction::L).unwrap();
            a.step(NestedAction::B).unwrap();
        }
        assert_eq!(a.observe_main(), [0.0, 0.0, 1.0]);

        let mut c = arena(ShapeSpec::from_cells("one", 15, &[GridPos::new(14, 7)]).unwrap());
        c.set_material(Material::Stone).unwrap();
        for _ in 0..6 {
            c.step(NestedAction::R).unwrap();
        }
        c.step(NestedAction::RD).unwrap();
        assert_eq!(c.observe_nested(Material::Stone), [1.0, 0.5, 0.0, 1.0]);
        assert_eq!(
            c.observe_nested(Material::Wood).len() - c.observe_main().len(),
            1
        );
    }

    #[test]
    fn mask_round_trip_and_errors() {
        let text = ShapeSpec::diamond().to_text();
        let parsed = ShapeSpec::parse("diamond", &text, 15).unwrap();
        assert_eq!(parsed, ShapeSpec::diamond());

        let bad_char = text.replacen('.', "x", 1);
        assert!(matches!(
            ShapeSpec::parse("d", &bad_char, 15),
            Err(Error::Mask { line: 1, .. })
        ));
        let short: String = text.lines().take(14).map(|l| format!("{l}\n")).collect();
        assert!(ShapeSpec::parse("d", &short, 15).is_err());
        let wide = text.replacen('\n', ".\n", 1);
        assert!(ShapeSpec::parse("d", &wide, 15).is_err());
        let empty = ".".repeat(15) + "\n";
        assert!(ShapeSpec::parse("d", &empty.repeat(15), 15).is_err());
    }
}
