//! Candidate generators. Each works on rows of a scene and is run a second
//! time on the transposed scene to cover columns.

use std::cmp::Ordering;

use super::blueprint::{Blueprint, MoveKind};
use super::{cmp_rel, optimize, Candidate, Scene, Transposed};
use crate::config::PlannerConfig;
use crate::grid::{OccupancyGrid, TargetRegion};
use crate::moves::Axis;

/// Running best by (value desc, time asc), keeping the first on ties.
struct Best<T> {
    value: f64,
    time: f64,
    item: Option<T>,
}

impl<T> Best<T> {
    fn new() -> Self {
        Self { value: 0.0, time: f64::INFINITY, item: None }
    }

    fn offer(&mut self, value: f64, time: f64, item: impl FnOnce() -> T) {
        let better = match self.item {
            None => true,
            Some(_) => match cmp_rel(value, self.value) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => cmp_rel(time, self.time) == Ordering::Less,
            },
        };
        if better {
            self.value = value;
            self.time = time;
            self.item = Some(item());
        }
    }
}

fn gap_in_bounds(x: i64, extent: usize) -> bool {
    x >= 1 && x <= 2 * extent as i64 - 3
}

/// Order-preserving matching of `from` onto `to` with displacement at most
/// `reach`, taking the earliest feasible partner for each source.
fn match_within(from: &[usize], to: &[usize], reach: usize, cap: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    let mut j = 0;
    for &a in from {
        while j < to.len() && to[j] + reach < a {
            j += 1;
        }
        if j == to.len() || pairs.len() == cap {
            break;
        }
        if to[j] <= a + reach {
            pairs.push((a, to[j]));
            j += 1;
        }
    }
    pairs
}

/// Loose atoms of row `s` lying outside the region.
fn loose_atoms(scene: &Scene<'_>, s: usize) -> Vec<usize> {
    (0..scene.cols())
        .filter(|&u| scene.carryable(s, u) && !scene.region.contains(s, u))
        .collect()
}

fn vacancies_in_row(scene: &Scene<'_>, t: usize) -> Vec<usize> {
    scene.region.col_range().filter(|&v| !scene.occupied(t, v)).collect()
}

fn run_both<F>(scene: &Scene<'_>, flipped: &Scene<'_>, mut rows_only: F) -> Vec<Candidate>
where
    F: FnMut(&Scene<'_>) -> Vec<Candidate>,
{
    let mut out = rows_only(scene);
    out.extend(
        rows_only(flipped)
            .into_iter()
            .filter_map(|c| scene.evaluate(c.blueprint.transposed())),
    );
    out.sort_by(|a, b| a.rank(b));
    out
}

// ---------------------------------------------------------------- compaction

pub(crate) fn compactification(scene: &Scene<'_>, flipped: &Scene<'_>) -> Vec<Candidate> {
    run_both(scene, flipped, compact_rows)
}

fn compact_rows(scene: &Scene<'_>) -> Vec<Candidate> {
    let mut out = Vec::new();
    let cols = scene.cols();
    for r in scene.region.row_range() {
        // Atoms that may not be picked up split the row into segments no
        // in-line trap can cross.
        let mut a = 0;
        while a < cols {
            let mut b = a;
            while b < cols && !(scene.occupied(r, b) && !scene.carryable(r, b)) {
                b += 1;
            }
            out.extend(compact_segment(scene, r, a, b));
            a = b + 1;
        }
    }
    out
}

fn compact_segment(scene: &Scene<'_>, r: usize, a: usize, b: usize) -> Option<Candidate> {
    let region = scene.region;
    let lo = region.col_offset.max(a);
    let hi = (region.col_offset + region.width).min(b);
    if lo >= hi {
        return None;
    }
    let atoms: Vec<usize> = (a..b).filter(|&c| scene.occupied(r, c)).collect();
    let n_left = atoms.partition_point(|&c| c < lo);
    let n_in = atoms.partition_point(|&c| c < hi) - n_left;
    let n_right = atoms.len() - n_left - n_in;
    let width = hi - lo;
    if n_in == width {
        return None;
    }
    let cap = scene.tone_cap();
    let cost = &scene.config.cost;

    let mut best = Best::new();
    for l in 0..=n_left {
        for rr in 0..=n_right {
            let n = l + n_in + rr;
            if l + rr == 0 || n > width {
                continue;
            }
            let chosen = &atoms[n_left - l..n_left + n_in + rr];
            let mut moving = 0;
            let mut reach = 0;
            for (i, &p) in chosen.iter().enumerate() {
                let target = p.clamp(lo + i, hi - n + i);
                if target != p {
                    moving += 1;
                    reach = reach.max(p.abs_diff(target));
                }
            }
            if moving > cap {
                continue;
            }
            let time = cost.time_for_doubled(&[2 * reach as u32]);
            best.offer((l + rr) as f64 / time, time, || (l, rr));
        }
    }
    let (l, rr) = best.item?;
    let n = l + n_in + rr;
    let chosen = &atoms[n_left - l..n_left + n_in + rr];
    let pairs: Vec<(usize, usize)> = chosen
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, p.clamp(lo + i, hi - n + i)))
        .filter(|(p, t)| p != t)
        .collect();
    scene.evaluate(Blueprint::new(MoveKind::Compact(Axis::Row), vec![(r, r)], pairs))
}

// ------------------------------------------------------------------- lateral

pub(crate) fn lateral(scene: &Scene<'_>, flipped: &Scene<'_>) -> Vec<Candidate> {
    run_both(scene, flipped, lateral_rows)
}

fn lateral_rows(scene: &Scene<'_>) -> Vec<Candidate> {
    if !scene.config.allow_col_gap_motion {
        return Vec::new();
    }
    let region = scene.region;
    let cols = scene.cols();
    let cap = scene.tone_cap();
    let cost = &scene.config.cost;
    let mut out = Vec::new();
    for s in 0..scene.rows() {
        let loose = loose_atoms(scene, s);
        if loose.is_empty() {
            continue;
        }
        let mut best = Best::new();
        for t in region.row_range().filter(|&t| t != s) {
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            let mut last: Option<(usize, i64)> = None;
            for &u in &loose {
                let options = [(u.wrapping_sub(1), -1i64), (u, -1), (u, 1), (u + 1, 1)];
                let pick = options.into_iter().find(|&(v, d)| {
                    let mid = 2 * u as i64 + d;
                    v < cols
                        && region.contains_col(v)
                        && !scene.occupied(t, v)
                        && gap_in_bounds(mid, cols)
                        && last.is_none_or(|(lv, lm)| v > lv && mid > lm)
                });
                if let Some((v, d)) = pick {
                    pairs.push((u, v));
                    last = Some((v, 2 * u as i64 + d));
                    if pairs.len() == cap {
                        break;
                    }
                }
            }
            if pairs.is_empty() {
                continue;
            }
            let time = cost.time_for_doubled(&[1, 2 * s.abs_diff(t) as u32, 1]);
            best.offer(pairs.len() as f64 / time, time, || (t, pairs));
        }
        if let Some((t, pairs)) = best.item {
            out.extend(scene.evaluate(Blueprint::new(MoveKind::Lateral(Axis::Row), vec![(s, t)], pairs)));
        }
    }
    out
}

// ---------------------------------------------------------------- lengthwise

pub(crate) fn lengthwise(scene: &Scene<'_>, flipped: &Scene<'_>) -> Vec<Candidate> {
    run_both(scene, flipped, lengthwise_rows)
}

fn lengthwise_rows(scene: &Scene<'_>) -> Vec<Candidate> {
    if !scene.config.allow_row_gap_motion {
        return Vec::new();
    }
    let rows = scene.rows();
    let cap = scene.tone_cap();
    let cost = &scene.config.cost;
    let mut out = Vec::new();
    for s in 0..rows {
        let loose = loose_atoms(scene, s);
        if loose.is_empty() {
            continue;
        }
        let mut best = Best::new();
        for t in [s.wrapping_sub(1), s, s + 1] {
            if t >= rows || !scene.region.contains_row(t) {
                continue;
            }
            let has_gap = if t == s {
                gap_in_bounds(2 * s as i64 + 1, rows) || gap_in_bounds(2 * s as i64 - 1, rows)
            } else {
                gap_in_bounds(s as i64 + t as i64, rows)
            };
            if !has_gap {
                continue;
            }
            let open = vacancies_in_row(scene, t);
            let mut count = 0;
            for reach in 0..scene.cols() {
                let pairs = match_within(&loose, &open, reach, cap);
                if pairs.len() > count {
                    count = pairs.len();
                    let time = cost.time_for_doubled(&[1, 2 * reach as u32, 1]);
                    best.offer(count as f64 / time, time, || (t, pairs));
                }
                if count == cap.min(loose.len()).min(open.len()) {
                    break;
                }
            }
        }
        if let Some((t, pairs)) = best.item {
            out.extend(scene.evaluate(Blueprint::new(MoveKind::Lengthwise(Axis::Row), vec![(s, t)], pairs)));
        }
    }
    out
}

// ------------------------------------------------------------------- complex

pub(crate) fn complex(scene: &Scene<'_>, flipped: &Scene<'_>) -> Vec<Candidate> {
    let budget = scene.config.combo_budget;
    let mut out = complex_rows(scene, budget.div_ceil(2));
    out.extend(
        complex_rows(flipped, budget / 2)
            .into_iter()
            .filter_map(|c| scene.evaluate(c.blueprint.transposed())),
    );
    out.sort_by(|a, b| a.rank(b));
    out
}

/// Lines sorted by descending count, ties by index, skipping zero counts.
fn ranked_lines(counts: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut v: Vec<(usize, usize)> = counts.filter(|&(_, n)| n > 0).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v.into_iter().map(|(line, _)| line).collect()
}

/// The first `budget` (surplus, deficit) index pairs in order of increasing
/// rank sum.
fn combos(n_surplus: usize, n_deficit: usize, budget: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if n_surplus == 0 || n_deficit == 0 {
        return out;
    }
    for sum in 0..n_surplus + n_deficit - 1 {
        for i in 0..=sum {
            let j = sum - i;
            if i < n_surplus && j < n_deficit {
                if out.len() == budget {
                    return out;
                }
                out.push((i, j));
            }
        }
    }
    out
}

fn complex_rows(scene: &Scene<'_>, budget: usize) -> Vec<Candidate> {
    let cfg = scene.config;
    if budget == 0 || !cfg.allow_row_gap_motion || !cfg.allow_col_gap_motion {
        return Vec::new();
    }
    let region = scene.region;
    let cap = scene.tone_cap();
    let loose: Vec<Vec<usize>> = (0..scene.rows()).map(|s| loose_atoms(scene, s)).collect();
    let surplus = ranked_lines(loose.iter().map(Vec::len).enumerate());
    let deficit = ranked_lines(region.row_range().map(|t| (t, vacancies_in_row(scene, t).len())));

    let mut out = Vec::new();
    for (i, j) in combos(surplus.len(), deficit.len(), budget) {
        let (s, t) = (surplus[i], deficit[j]);
        let open = vacancies_in_row(scene, t);
        let travel = 2 * s.abs_diff(t) as u32;
        let mut best = Best::new();
        let mut count = 0;
        for reach in 0..scene.cols() {
            let pairs = match_within(&loose[s], &open, reach, cap);
            if pairs.len() > count {
                count = pairs.len();
                let time = cfg.cost.time_for_doubled(&[1, travel, 2 * reach as u32, 1]);
                best.offer(count as f64 / time, time, || pairs);
            }
            if count == cap.min(loose[s].len()).min(open.len()) {
                break;
            }
        }
        let Some(pairs) = best.item else { continue };
        let Some(cand) = scene.evaluate(Blueprint::new(MoveKind::Complex, vec![(s, t)], pairs)) else {
            continue;
        };
        out.push(optimize::add_tones(scene, &cand, true, false));
    }
    out
}

// ----------------------------------------------------------- public wrappers

fn with_scenes<R>(
    grid: &OccupancyGrid,
    region: &TargetRegion,
    config: &PlannerConfig,
    f: impl FnOnce(&Scene<'_>, &Scene<'_>) -> R,
) -> R {
    let scene = Scene { grid, region: *region, config };
    let flipped = Transposed::of(&scene);
    f(&scene, &flipped.scene())
}

/// In-line packing of atoms along target rows and columns, best per line segment.
pub fn suggest_compactification(grid: &OccupancyGrid, region: &TargetRegion, config: &PlannerConfig) -> Vec<Candidate> {
    with_scenes(grid, region, config, compactification)
}

/// A whole source line moved across to a target line, traps riding in the gaps.
pub fn suggest_lateral(grid: &OccupancyGrid, region: &TargetRegion, config: &PlannerConfig) -> Vec<Candidate> {
    with_scenes(grid, region, config, lateral)
}

/// Atoms slid along the gap beside their line onto the same or a neighbouring target line.
pub fn suggest_lengthwise(grid: &OccupancyGrid, region: &TargetRegion, config: &PlannerConfig) -> Vec<Candidate> {
    with_scenes(grid, region, config, lengthwise)
}

/// Gap-routed moves between the fullest surplus and emptiest deficit lines.
pub fn suggest_complex(grid: &OccupancyGrid, region: &TargetRegion, config: &PlannerConfig) -> Vec<Candidate> {
    with_scenes(grid, region, config, complex)
}
