//! Greedy planner: pools the suggesters' candidates every step, executes the
//! fittest after two optimisation passes, and stops once the target region
//! is full or no candidate makes progress.

mod blueprint;
mod optimize;
mod suggest;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use blueprint::{Blueprint, MoveKind};
pub use optimize::{optimize_add_tones, optimize_independent_sites};
pub use suggest::{suggest_compactification, suggest_complex, suggest_lateral, suggest_lengthwise};

pub use crate::config::PlannerConfig;
use crate::cost::{fitness, time_demand, Fitness};
use crate::error::Result;
use crate::grid::{count_target_vacancies, OccupancyGrid, TargetRegion};
use crate::moves::{apply_unchecked, move_distance, validate_move, CompositeMove};

/// Relative tolerance under which two fitness values or costs count as equal.
/// Keeps selection independent of rounding when the cost model is rescaled.
const REL_TOL: f64 = 1e-9;

/// A suggested move together with its shape and fitness on the grid it was
/// generated for.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub blueprint: Blueprint,
    pub mv: CompositeMove,
    pub fitness: Fitness,
}

impl Candidate {
    /// Total selection order: higher fitness, then lower cost, then the
    /// lexicographically smaller move.
    pub fn rank(&self, other: &Self) -> Ordering {
        match cmp_rel(self.fitness.value, other.fitness.value) {
            Ordering::Equal => {}
            o => return o.reverse(),
        }
        match cmp_rel(self.fitness.cost, other.fitness.cost) {
            Ordering::Equal => {}
            o => return o,
        }
        self.mv.cmp(&other.mv)
    }

    pub(crate) fn improves_on(&self, other: &Self) -> bool {
        cmp_rel(self.fitness.value, other.fitness.value) == Ordering::Greater
    }
}

fn cmp_rel(a: f64, b: f64) -> Ordering {
    let scale = a.abs().max(b.abs());
    if (a - b).abs() <= REL_TOL * scale {
        Ordering::Equal
    } else {
        a.partial_cmp(&b).unwrap_or(Ordering::Equal)
    }
}

/// Grid, region and configuration of one planning step, with the shared
/// feasibility rules the suggesters and optimisers rely on.
pub(crate) struct Scene<'a> {
    pub grid: &'a OccupancyGrid,
    pub region: TargetRegion,
    pub config: &'a PlannerConfig,
}

impl<'a> Scene<'a> {
    #[inline]
    pub fn occupied(&self, r: usize, c: usize) -> bool {
        self.grid.is_occupied(r, c)
    }

    /// Holds an atom that may be picked up.
    #[inline]
    pub fn carryable(&self, r: usize, c: usize) -> bool {
        self.grid.is_occupied(r, c) && (self.config.allow_multiple_moves || !self.grid.is_moved(r, c))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.grid.rows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.grid.cols()
    }

    pub fn tone_cap(&self) -> usize {
        self.config.n_h.min(self.config.k)
    }

    /// Builds and scores a blueprint; `None` if it cannot be realised within
    /// the configured limits.
    pub fn evaluate(&self, blueprint: Blueprint) -> Option<Candidate> {
        let mv = self.realize(&blueprint)?;
        let fitness = fitness(self.grid, &self.region, &mv, &self.config.cost);
        Some(Candidate { blueprint, mv, fitness })
    }

    /// Like [`Scene::evaluate`] when the net gain is already known.
    pub fn evaluate_with_net(&self, blueprint: Blueprint, net_filled: i64) -> Option<Candidate> {
        let mv = self.realize(&blueprint)?;
        let fitness = Fitness::new(net_filled, time_demand(&self.config.cost, &mv));
        Some(Candidate { blueprint, mv, fitness })
    }

    fn realize(&self, blueprint: &Blueprint) -> Option<CompositeMove> {
        let cfg = self.config;
        if blueprint.rows.len() > cfg.n_v || blueprint.cols.len() > cfg.n_h || blueprint.trap_count() > cfg.k {
            return None;
        }
        if (blueprint.kind.needs_row_gaps() && !cfg.allow_row_gap_motion)
            || (blueprint.kind.needs_col_gaps() && !cfg.allow_col_gap_motion)
        {
            return None;
        }
        blueprint.build(self.rows(), self.cols())
    }
}

/// Scene data with rows and columns exchanged, so row-oriented suggesters can
/// serve columns too.
pub(crate) struct Transposed {
    grid: OccupancyGrid,
    region: TargetRegion,
    config: PlannerConfig,
}

impl Transposed {
    pub fn of(scene: &Scene<'_>) -> Self {
        let c = scene.config;
        Self {
            grid: scene.grid.transposed(),
            region: scene.region.transposed(),
            config: PlannerConfig {
                n_h: c.n_v,
                n_v: c.n_h,
                allow_row_gap_motion: c.allow_col_gap_motion,
                allow_col_gap_motion: c.allow_row_gap_motion,
                ..*c
            },
        }
    }

    pub fn scene(&self) -> Scene<'_> {
        Scene { grid: &self.grid, region: self.region, config: &self.config }
    }
}

/// Why planning stopped without filling the region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureReason {
    /// Fewer atoms in the whole array than target sites.
    InsufficientAtoms,
    /// Atoms suffice but no candidate fills a target site.
    NoProgress,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::InsufficientAtoms => "insufficient-atoms",
            Self::NoProgress => "no-progress",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanFailure {
    pub reason: FailureReason,
    /// Moves executed before giving up.
    pub moves_done: usize,
    pub vacancies_left: usize,
}

impl fmt::Display for PlanFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} after {} moves with {} vacancies left",
            self.reason, self.moves_done, self.vacancies_left
        )
    }
}

/// An executable rearrangement sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub moves: Vec<CompositeMove>,
    /// µs under the cost model the plan was made with.
    pub total_time: f64,
    /// µm.
    pub total_distance: f64,
    pub move_count: usize,
}

impl Plan {
    pub(crate) fn from_moves(moves: Vec<CompositeMove>, config: &PlannerConfig) -> Self {
        let total_time = moves.iter().map(|m| time_demand(&config.cost, m)).sum();
        let total_distance = moves.iter().map(|m| move_distance(m, config.cost.site_pitch)).sum();
        let move_count = moves.len();
        Self { moves, total_time, total_distance, move_count }
    }
}

pub type PlanOutcome = std::result::Result<Plan, PlanFailure>;

/// Every candidate the four suggesters produce on this grid.
pub fn suggest_all(grid: &OccupancyGrid, region: &TargetRegion, config: &PlannerConfig) -> Vec<Candidate> {
    let scene = Scene { grid, region: *region, config };
    let flipped = Transposed::of(&scene);
    let flipped = flipped.scene();
    let mut pool = suggest::compactification(&scene, &flipped);
    pool.extend(suggest::lateral(&scene, &flipped));
    pool.extend(suggest::lengthwise(&scene, &flipped));
    pool.extend(suggest::complex(&scene, &flipped));
    pool
}

fn select_best(pool: &[Candidate]) -> Option<&Candidate> {
    pool.iter()
        .filter(|c| c.fitness.net_filled > 0)
        .min_by(|a, b| a.rank(b))
}

/// Picks, optimises and validates the next move; `None` if nothing makes progress.
pub fn next_move(grid: &OccupancyGrid, region: &TargetRegion, config: &PlannerConfig) -> Option<Candidate> {
    let mut pool = suggest_all(grid, region, config);
    let scene = Scene { grid, region: *region, config };
    while let Some(best) = select_best(&pool).cloned() {
        let grown = optimize::add_tones(&scene, &best, true, true);
        let grown = optimize::independent_sites(&scene, &grown);
        for pick in [grown, best.clone()] {
            if pick.fitness.net_filled > 0 && validate_move(grid, &pick.mv, config).is_empty() {
                return Some(pick);
            }
        }
        debug_assert!(false, "suggested move failed validation: {:?}", best.blueprint);
        pool.retain(|c| c.mv != best.mv);
    }
    None
}

/// Plans a sequence filling `region` completely.
pub fn plan(grid: &OccupancyGrid, region: &TargetRegion, config: &PlannerConfig) -> Result<PlanOutcome> {
    config.validate()?;
    region.check_fits(grid.rows(), grid.cols())?;
    Ok(plan_with(grid, region, config, next_move))
}

/// Runs the shared greedy loop with a step function that proposes one move.
pub(crate) fn plan_with<F>(grid: &OccupancyGrid, region: &TargetRegion, config: &PlannerConfig, mut step: F) -> PlanOutcome
where
    F: FnMut(&OccupancyGrid, &TargetRegion, &PlannerConfig) -> Option<Candidate>,
{
    let mut vacancies = count_target_vacancies(grid, region);
    if grid.total_atoms() < region.area() {
        return Err(PlanFailure { reason: FailureReason::InsufficientAtoms, moves_done: 0, vacancies_left: vacancies });
    }
    let mut state = grid.clone();
    let mut moves = Vec::new();
    while vacancies > 0 {
        let Some(pick) = step(&state, region, config) else {
            return Err(PlanFailure { reason: FailureReason::NoProgress, moves_done: moves.len(), vacancies_left: vacancies });
        };
        state = apply_unchecked(&state, &pick.mv);
        let after = count_target_vacancies(&state, region);
        debug_assert_eq!(after as i64, vacancies as i64 - pick.fitness.net_filled);
        vacancies = after;
        moves.push(pick.mv);
    }
    Ok(Plan::from_moves(moves, config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{random_grid, InstanceSpec};
    use crate::moves::apply_move;

    #[test]
    fn full_region_needs_no_moves() {
        let grid = OccupancyGrid::full(5, 5).unwrap();
        let region = TargetRegion::centered(5, 5, 3, 3).unwrap();
        let plan = plan(&grid, &region, &PlannerConfig::default()).unwrap().unwrap();
        assert_eq!(plan.move_count, 0);
        assert_eq!(plan.total_time, 0.0);
    }

    #[test]
    fn insufficient_atoms_fail_immediately() {
        let mut grid = OccupancyGrid::empty(5, 5).unwrap();
        for c in 0..5 {
            grid.set_occupied(0, c, true);
        }
        let region = TargetRegion::centered(5, 5, 3, 3).unwrap();
        let failure = plan(&grid, &region, &PlannerConfig::default()).unwrap().unwrap_err();
        assert_eq!(failure.reason, FailureReason::InsufficientAtoms);
        assert_eq!(failure.moves_done, 0);
    }

    #[test]
    fn plans_replay_cleanly() {
        let config = PlannerConfig::default();
        for seed in 0..40 {
            let spec = InstanceSpec::new(36, 1.5, 0.5, seed).unwrap();
            let (grid, region) = random_grid(&spec).unwrap();
            match plan(&grid, &region, &config).unwrap() {
                Ok(plan) => {
                    let mut state = grid.clone();
                    for mv in &plan.moves {
                        assert!(validate_move(&state, mv, &config).is_empty());
                        state = apply_move(&state, mv).unwrap();
                    }
                    assert_eq!(count_target_vacancies(&state, &region), 0);
                }
                Err(f) => assert_eq!(f.reason, FailureReason::InsufficientAtoms, "seed {seed}"),
            }
        }
    }

    #[test]
    fn planning_is_deterministic() {
        let spec = InstanceSpec::new(100, 1.5, 0.5, 3).unwrap();
        let (grid, region) = random_grid(&spec).unwrap();
        let config = PlannerConfig::default();
        assert_eq!(plan(&grid, &region, &config).unwrap(), plan(&grid, &region, &config).unwrap());
    }

    #[test]
    fn rejects_bad_inputs() {
        let grid = OccupancyGrid::full(3, 3).unwrap();
        let region = TargetRegion::new(2, 2, 2, 2).unwrap();
        assert!(plan(&grid, &region, &PlannerConfig::default()).is_err());
        let ok_region = TargetRegion::new(0, 0, 2, 2).unwrap();
        let config = PlannerConfig { combo_budget: 0, ..PlannerConfig::default() };
        assert!(plan(&grid, &ok_region, &config).is_err());
    }

    #[test]
    fn rank_prefers_fitness_then_cost() {
        let region = TargetRegion::new(0, 0, 1, 1).unwrap();
        let grid = OccupancyGrid::empty(3, 3).unwrap();
        let config = PlannerConfig::default();
        let scene = Scene { grid: &grid, region, config: &config };
        let near = scene.evaluate(Blueprint::new(MoveKind::Complex, vec![(1, 0)], vec![(1, 0)])).unwrap();
        let far = scene.evaluate(Blueprint::new(MoveKind::Complex, vec![(2, 0)], vec![(2, 0)])).unwrap();
        // Both move nothing (empty grid): equal fitness 0, so the cheaper wins.
        assert_eq!(near.rank(&far), Ordering::Less);
        assert_eq!(far.rank(&near), Ordering::Greater);
        assert_eq!(near.rank(&near), Ordering::Equal);
    }
}
