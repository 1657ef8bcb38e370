//! Post-selection passes that grow a candidate with further tones while its
//! fitness keeps improving.

use super::blueprint::{Blueprint, MoveKind};
use super::{Candidate, Scene};
use crate::config::PlannerConfig;
use crate::grid::{OccupancyGrid, TargetRegion};
use crate::moves::Axis;

/// Source lines of a blueprint, optionally extended by one more row and column.
struct Sources {
    rows: Vec<bool>,
    cols: Vec<bool>,
    extra_row: Option<usize>,
    extra_col: Option<usize>,
}

impl Sources {
    fn of(scene: &Scene<'_>, bp: &Blueprint) -> Self {
        let mut rows = vec![false; scene.rows()];
        let mut cols = vec![false; scene.cols()];
        for &(s, _) in &bp.rows {
            rows[s] = true;
        }
        for &(u, _) in &bp.cols {
            cols[u] = true;
        }
        Self { rows, cols, extra_row: None, extra_col: None }
    }

    #[inline]
    fn contains(&self, r: usize, c: usize) -> bool {
        (self.rows[r] || self.extra_row == Some(r)) && (self.cols[c] || self.extra_col == Some(c))
    }
}

/// Occupied once every trap of the move has picked up its atom.
#[inline]
fn effective(scene: &Scene<'_>, src: &Sources, r: usize, c: usize) -> bool {
    scene.occupied(r, c) && !src.contains(r, c)
}

/// Contribution of one trap to the number of filled target sites, or `None`
/// if the trap would break a rule or carry an atom out of the region.
fn trap_delta(scene: &Scene<'_>, kind: MoveKind, src: &Sources, from: (usize, usize), to: (usize, usize)) -> Option<i64> {
    let region = &scene.region;
    let carried = scene.occupied(from.0, from.1);
    if carried && !scene.carryable(from.0, from.1) {
        return None;
    }
    let blocked = effective(scene, src, to.0, to.1);
    if blocked && (carried || !scene.config.allow_empty_onto_occupied) {
        return None;
    }
    if carried && !region.contains(to.0, to.1) {
        return None;
    }
    match kind {
        MoveKind::Compact(Axis::Row) => {
            let (lo, hi) = (from.1.min(to.1), from.1.max(to.1));
            if (lo + 1..hi).any(|c| effective(scene, src, from.0, c)) {
                return None;
            }
        }
        MoveKind::Compact(Axis::Col) => {
            let (lo, hi) = (from.0.min(to.0), from.0.max(to.0));
            if (lo + 1..hi).any(|r| effective(scene, src, r, from.1)) {
                return None;
            }
        }
        _ => {}
    }
    if !carried {
        return Some(0);
    }
    Some(region.contains(to.0, to.1) as i64 - region.contains(from.0, from.1) as i64)
}

fn sum_deltas<I>(scene: &Scene<'_>, kind: MoveKind, src: &Sources, traps: I) -> Option<i64>
where
    I: IntoIterator<Item = ((usize, usize), (usize, usize))>,
{
    traps
        .into_iter()
        .try_fold(0i64, |acc, (from, to)| Some(acc + trap_delta(scene, kind, src, from, to)?))
}

fn keep_best(best: &mut Option<Candidate>, cur: &Candidate, next: Candidate) {
    if next.improves_on(cur) && best.as_ref().is_none_or(|b| next.rank(b).is_lt()) {
        *best = Some(next);
    }
}

/// Repeatedly adds the row or column tone pair that improves fitness most.
pub(crate) fn add_tones(scene: &Scene<'_>, cand: &Candidate, rows: bool, cols: bool) -> Candidate {
    let cfg = scene.config;
    let (n_rows, n_cols) = (scene.rows(), scene.cols());
    let mut cur = cand.clone();
    loop {
        let bp = &cur.blueprint;
        let kind = bp.kind;
        let mut src = Sources::of(scene, bp);
        let mut best: Option<Candidate> = None;

        if rows && bp.rows.len() < cfg.n_v && (bp.rows.len() + 1) * bp.cols.len() <= cfg.k {
            for t in scene.region.row_range() {
                for s in (0..n_rows).filter(|&s| kind.allows_row_pair(s, t)) {
                    let Some(idx) = Blueprint::insertion_index(&bp.rows, s, t) else { continue };
                    src.extra_row = Some(s);
                    let traps = bp.cols.iter().map(|&(u, v)| ((s, u), (t, v)));
                    let Some(delta) = sum_deltas(scene, kind, &src, traps) else { continue };
                    if delta <= 0 {
                        continue;
                    }
                    let mut grown = bp.rows.clone();
                    grown.insert(idx, (s, t));
                    let next = Blueprint { kind, rows: grown, cols: bp.cols.clone() };
                    if let Some(next) = scene.evaluate_with_net(next, cur.fitness.net_filled + delta) {
                        keep_best(&mut best, &cur, next);
                    }
                }
            }
            src.extra_row = None;
        }

        if cols && bp.cols.len() < cfg.n_h && bp.rows.len() * (bp.cols.len() + 1) <= cfg.k {
            for v in scene.region.col_range() {
                for u in (0..n_cols).filter(|&u| kind.allows_col_pair(u, v)) {
                    let Some(idx) = Blueprint::insertion_index(&bp.cols, u, v) else { continue };
                    src.extra_col = Some(u);
                    let traps = bp.rows.iter().map(|&(s, t)| ((s, u), (t, v)));
                    let Some(delta) = sum_deltas(scene, kind, &src, traps) else { continue };
                    if delta <= 0 {
                        continue;
                    }
                    let mut grown = bp.cols.clone();
                    grown.insert(idx, (u, v));
                    let next = Blueprint { kind, rows: bp.rows.clone(), cols: grown };
                    if let Some(next) = scene.evaluate_with_net(next, cur.fitness.net_filled + delta) {
                        keep_best(&mut best, &cur, next);
                    }
                }
            }
        }

        match best {
            Some(b) => cur = b,
            None => return cur,
        }
    }
}

/// Source lines a new tone may start on so that both of its ends keep the
/// existing tone order.
fn source_window(pairs: &[(usize, usize)], to: usize, extent: usize) -> std::ops::Range<usize> {
    let i = pairs.partition_point(|&(_, t)| t < to);
    let lo = if i == 0 { 0 } else { pairs[i - 1].0 + 1 };
    let hi = pairs.get(i).map_or(extent, |&(s, _)| s);
    lo..hi.max(lo)
}

/// Visits target vacancies in row-major order and, for each, adds the row and
/// column tone pair bringing the best atom there if that improves fitness.
pub(crate) fn independent_sites(scene: &Scene<'_>, cand: &Candidate) -> Candidate {
    let cfg = scene.config;
    let region = scene.region;
    let mut cur = cand.clone();
    for t in region.row_range() {
        for v in region.col_range() {
            let bp = &cur.blueprint;
            let (nr, nc) = (bp.rows.len(), bp.cols.len());
            if nr + 1 > cfg.n_v || nc + 1 > cfg.n_h || (nr + 1) * (nc + 1) > cfg.k {
                return cur;
            }
            if bp.rows.iter().any(|&(_, x)| x == t) || bp.cols.iter().any(|&(_, x)| x == v) {
                continue;
            }
            let kind = bp.kind;
            let mut src = Sources::of(scene, bp);
            if effective(scene, &src, t, v) {
                continue;
            }
            let mut best: Option<Candidate> = None;
            for s in source_window(&bp.rows, t, scene.rows()) {
                if !kind.allows_row_pair(s, t) {
                    continue;
                }
                for u in source_window(&bp.cols, v, scene.cols()) {
                    if !kind.allows_col_pair(u, v) || !scene.carryable(s, u) || region.contains(s, u) {
                        continue;
                    }
                    src.extra_row = Some(s);
                    src.extra_col = Some(u);
                    let traps = std::iter::once(((s, u), (t, v)))
                        .chain(bp.rows.iter().map(|&(si, ti)| ((si, u), (ti, v))))
                        .chain(bp.cols.iter().map(|&(uj, vj)| ((s, uj), (t, vj))));
                    let Some(delta) = sum_deltas(scene, kind, &src, traps) else { continue };
                    if delta <= 0 {
                        continue;
                    }
                    let mut rows = bp.rows.clone();
                    let mut cols = bp.cols.clone();
                    rows.push((s, t));
                    cols.push((u, v));
                    let next = Blueprint::new(kind, rows, cols);
                    if let Some(next) = scene.evaluate_with_net(next, cur.fitness.net_filled + delta) {
                        keep_best(&mut best, &cur, next);
                    }
                }
            }
            if let Some(b) = best {
                cur = b;
            }
        }
    }
    cur
}

/// Grows `cand` by single row or column tone pairs while fitness improves.
pub fn optimize_add_tones(cand: &Candidate, grid: &OccupancyGrid, region: &TargetRegion, config: &PlannerConfig) -> Candidate {
    add_tones(&Scene { grid, region: *region, config }, cand, true, true)
}

/// Adds a row and a column tone at once to fill target vacancies that no
/// single added tone can reach.
pub fn optimize_independent_sites(
    cand: &Candidate,
    grid: &OccupancyGrid,
    region: &TargetRegion,
    config: &PlannerConfig,
) -> Candidate {
    independent_sites(&Scene { grid, region: *region, config }, cand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::validate_move;

    fn grid(rows: &[&str]) -> OccupancyGrid {
        let cells: Vec<Vec<bool>> = rows.iter().map(|r| r.chars().map(|c| c == '#').collect()).collect();
        OccupancyGrid::from_rows(&cells).unwrap()
    }

    #[test]
    fn adds_parallel_rows() {
        // Two rows whose left atom can hop into the region the same way.
        let g = grid(&["#.....", "#.....", "......", "......"]);
        let region = TargetRegion::new(0, 1, 4, 5).unwrap();
        let config = PlannerConfig::default();
        let scene = Scene { grid: &g, region, config: &config };
        let seed = scene
            .evaluate(Blueprint::new(MoveKind::Compact(Axis::Row), vec![(0, 0)], vec![(0, 1)]))
            .unwrap();
        let grown = add_tones(&scene, &seed, true, true);
        assert_eq!(grown.blueprint.rows, vec![(0, 0), (1, 1)]);
        assert_eq!(grown.fitness.net_filled, 2);
        assert!(validate_move(&g, &grown.mv, &config).is_empty());
    }

    #[test]
    fn independent_site_joins_move() {
        let g = grid(&["#...", "....", "....", "...#"]);
        let region = TargetRegion::new(1, 1, 2, 2).unwrap();
        let config = PlannerConfig::default();
        let scene = Scene { grid: &g, region, config: &config };
        let seed = scene.evaluate(Blueprint::new(MoveKind::Complex, vec![(0, 1)], vec![(0, 1)])).unwrap();
        assert_eq!(seed.fitness.net_filled, 1);
        let grown = independent_sites(&scene, &seed);
        assert_eq!(grown.fitness.net_filled, 2);
        assert_eq!(grown.blueprint.rows, vec![(0, 1), (3, 2)]);
        assert_eq!(grown.blueprint.cols, vec![(0, 1), (3, 2)]);
        assert!(validate_move(&g, &grown.mv, &config).is_empty());
    }

    #[test]
    fn respects_trap_limit() {
        let g = grid(&["#.....", "#.....", "......", "......"]);
        let region = TargetRegion::new(0, 1, 4, 5).unwrap();
        let config = PlannerConfig { k: 1, ..PlannerConfig::default() };
        let scene = Scene { grid: &g, region, config: &config };
        let seed = scene
            .evaluate(Blueprint::new(MoveKind::Compact(Axis::Row), vec![(0, 0)], vec![(0, 1)]))
            .unwrap();
        assert_eq!(add_tones(&scene, &seed, true, true), seed);
    }

    #[test]
    fn window_follows_target_order() {
        let pairs = [(2, 3), (6, 5)];
        assert_eq!(source_window(&pairs, 1, 9), 0..2);
        assert_eq!(source_window(&pairs, 4, 9), 3..6);
        assert_eq!(source_window(&pairs, 8, 9), 7..9);
    }
}
