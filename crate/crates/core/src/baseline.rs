//! One-atom-per-move reference planner used as the speedup anchor.
//!
//! Each step pairs the closest (Manhattan) loose atom outside the region
//! with an empty target site and moves it with a single trap: straight along
//! the shared row or column when nothing is in the way, through the gaps
//! otherwise. This is a nearest-pair greedy, not an optimal assignment.

use crate::config::PlannerConfig;
use crate::error::Result;
use crate::grid::{OccupancyGrid, TargetRegion};
use crate::moves::{validate_move, Axis};
use crate::sequencer::{plan_with, Blueprint, Candidate, MoveKind, PlanOutcome, Scene};

/// Manhattan distance, source site, target site.
type Pairing = (usize, (usize, usize), (usize, usize));

fn single_trap_moves(scene: &Scene<'_>, from: (usize, usize), to: (usize, usize)) -> Option<Candidate> {
    let mut shapes = Vec::with_capacity(3);
    if from.0 == to.0 {
        shapes.push(Blueprint::new(MoveKind::Compact(Axis::Row), vec![(from.0, from.0)], vec![(from.1, to.1)]));
    }
    if from.1 == to.1 {
        shapes.push(Blueprint::new(MoveKind::Compact(Axis::Col), vec![(from.0, to.0)], vec![(from.1, from.1)]));
    }
    shapes.push(Blueprint::new(MoveKind::Complex, vec![(from.0, to.0)], vec![(from.1, to.1)]));
    shapes.into_iter().find_map(|bp| {
        let cand = scene.evaluate(bp)?;
        (cand.fitness.net_filled == 1 && validate_move(scene.grid, &cand.mv, scene.config).is_empty()).then_some(cand)
    })
}

fn next_single(grid: &OccupancyGrid, region: &TargetRegion, config: &PlannerConfig) -> Option<Candidate> {
    let scene = Scene { grid, region: *region, config };
    let sources: Vec<(usize, usize)> = (0..grid.rows())
        .flat_map(|r| (0..grid.cols()).map(move |c| (r, c)))
        .filter(|&(r, c)| scene.carryable(r, c) && !region.contains(r, c))
        .collect();
    let holes: Vec<(usize, usize)> = region
        .row_range()
        .flat_map(|r| region.col_range().map(move |c| (r, c)))
        .filter(|&(r, c)| !grid.is_occupied(r, c))
        .collect();
    let dist = |a: (usize, usize), b: (usize, usize)| a.0.abs_diff(b.0) + a.1.abs_diff(b.1);

    let mut nearest: Option<Pairing> = None;
    for &s in &sources {
        for &h in &holes {
            let d = dist(s, h);
            if nearest.is_none_or(|(bd, _, _)| d < bd) {
                nearest = Some((d, s, h));
            }
        }
    }
    let (_, s, h) = nearest?;
    if let Some(c) = single_trap_moves(&scene, s, h) {
        return Some(c);
    }
    // The nearest pair is blocked; fall back to the remaining pairs in order.
    let mut pairs: Vec<Pairing> = sources
        .iter()
        .flat_map(|&s| holes.iter().map(move |&h| (dist(s, h), s, h)))
        .collect();
    pairs.sort_unstable();
    pairs.into_iter().find_map(|(_, s, h)| single_trap_moves(&scene, s, h))
}

/// Plans with one carried atom per move.
pub fn plan_sequential(grid: &OccupancyGrid, region: &TargetRegion, config: &PlannerConfig) -> Result<PlanOutcome> {
    config.validate()?;
    region.check_fits(grid.rows(), grid.cols())?;
    Ok(plan_with(grid, region, config, next_single))
}
