//! Composite moves of crossed-AOD tweezers and their validity rules.
//!
//! Coordinates are stored in doubled units: an even value `2k` is the
//! stationary trap line `k`, an odd value `2k + 1` the gap between lines
//! `k` and `k + 1`. Every trap sits at the Cartesian product of one row tone
//! and one column tone and moves in straight segments between waypoints.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::PlannerConfig;
use crate::error::{Error, Result};
use crate::grid::OccupancyGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Row,
    Col,
}

/// Waypoints of one RF tone, in doubled units.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ToneTrajectory {
    pub path: Vec<i32>,
}

impl ToneTrajectory {
    pub fn new(path: Vec<i32>) -> Self {
        Self { path }
    }

    /// Tone that moves straight from site `from` to site `to` in one substep.
    pub fn straight(from: usize, to: usize) -> Self {
        Self::new(vec![2 * from as i32, 2 * to as i32])
    }

    #[inline]
    pub fn start(&self) -> i32 {
        self.path[0]
    }

    #[inline]
    pub fn end(&self) -> i32 {
        self.path[self.path.len() - 1]
    }
}

/// One simultaneous multi-tone rearrangement step.
///
/// Structural invariants (non-empty tone lists, equal path lengths of at
/// least two waypoints) are enforced on construction; the ordering and
/// lattice rules are left to [`validate_move`] so broken moves can still be
/// represented and reported.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawMove")]
pub struct CompositeMove {
    row_tones: Vec<ToneTrajectory>,
    col_tones: Vec<ToneTrajectory>,
}

#[derive(Deserialize)]
struct RawMove {
    row_tones: Vec<ToneTrajectory>,
    col_tones: Vec<ToneTrajectory>,
}

impl TryFrom<RawMove> for CompositeMove {
    type Error = Error;

    fn try_from(raw: RawMove) -> Result<Self> {
        Self::new(raw.row_tones, raw.col_tones)
    }
}

impl CompositeMove {
    pub fn new(row_tones: Vec<ToneTrajectory>, col_tones: Vec<ToneTrajectory>) -> Result<Self> {
        if row_tones.is_empty() || col_tones.is_empty() {
            return Err(Error::MalformedMove("both axes need at least one tone".into()));
        }
        let len = row_tones[0].path.len();
        if len < 2 {
            return Err(Error::MalformedMove("a tone needs at least two waypoints".into()));
        }
        if let Some(t) = row_tones.iter().chain(&col_tones).find(|t| t.path.len() != len) {
            return Err(Error::MalformedMove(format!(
                "all tones need {len} waypoints, found one with {}",
                t.path.len()
            )));
        }
        Ok(Self { row_tones, col_tones })
    }

    pub fn row_tones(&self) -> &[ToneTrajectory] {
        &self.row_tones
    }

    pub fn col_tones(&self) -> &[ToneTrajectory] {
        &self.col_tones
    }

    pub fn substeps(&self) -> usize {
        self.row_tones[0].path.len() - 1
    }

    pub fn trap_count(&self) -> usize {
        self.row_tones.len() * self.col_tones.len()
    }

    /// Lattice site of trap `(i, j)` at `waypoint`. Only meaningful where
    /// both coordinates are even and non-negative.
    #[inline]
    pub(crate) fn site_at(&self, i: usize, j: usize, waypoint: usize) -> (usize, usize) {
        (
            (self.row_tones[i].path[waypoint] / 2) as usize,
            (self.col_tones[j].path[waypoint] / 2) as usize,
        )
    }

    /// Same move with rows and columns exchanged.
    pub fn transposed(&self) -> Self {
        Self {
            row_tones: self.col_tones.clone(),
            col_tones: self.row_tones.clone(),
        }
    }
}

/// Positions of every trap at `waypoint`, row-tone major.
pub fn trap_grid(mv: &CompositeMove, waypoint: usize) -> Result<Vec<(i32, i32)>> {
    if waypoint > mv.substeps() {
        return Err(Error::WaypointOutOfRange { waypoint, substeps: mv.substeps() });
    }
    Ok(mv
        .row_tones
        .iter()
        .flat_map(|r| mv.col_tones.iter().map(move |c| (r.path[waypoint], c.path[waypoint])))
        .collect())
}

/// Longest tone displacement of each substep, in doubled units.
pub fn substep_displacements(mv: &CompositeMove) -> Vec<u32> {
    (0..mv.substeps())
        .map(|s| {
            mv.row_tones
                .iter()
                .chain(&mv.col_tones)
                .map(|t| t.path[s + 1].abs_diff(t.path[s]))
                .max()
                .unwrap_or(0)
        })
        .collect()
}

/// Sum over substeps of the longest tone displacement, in sites.
pub fn move_distance_sites(mv: &CompositeMove) -> f64 {
    substep_displacements(mv).iter().map(|&d| d as u64).sum::<u64>() as f64 * 0.5
}

/// Sum over substeps of the longest tone displacement, in µm.
pub fn move_distance(mv: &CompositeMove, site_pitch: f64) -> f64 {
    move_distance_sites(mv) * site_pitch
}

/// Traps `(row tone, col tone)` whose start site holds an atom.
pub fn carried_traps(grid: &OccupancyGrid, mv: &CompositeMove) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, r) in mv.row_tones.iter().enumerate() {
        for (j, c) in mv.col_tones.iter().enumerate() {
            if let Some((sr, sc)) = lattice_site(grid, r.start(), c.start()) {
                if grid.is_occupied(sr, sc) {
                    out.push((i, j));
                }
            }
        }
    }
    out
}

/// Lattice site for a doubled coordinate pair, if both are even and inside the grid.
#[inline]
fn lattice_site(grid: &OccupancyGrid, row: i32, col: i32) -> Option<(usize, usize)> {
    if row < 0 || col < 0 || row % 2 != 0 || col % 2 != 0 {
        return None;
    }
    let (r, c) = ((row / 2) as usize, (col / 2) as usize);
    (r < grid.rows() && c < grid.cols()).then_some((r, c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    ToneLimit,
    TrapLimit,
    ToneCrossing,
    OutOfBounds,
    NonLatticeEndpoint,
    PathCollision,
    PickupDropConflict,
    DropOccupied,
    EmptyOntoOccupied,
    ReMoveForbidden,
    GapMotionForbidden,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::ToneLimit => "tone-limit",
            Self::TrapLimit => "trap-limit",
            Self::ToneCrossing => "tone-crossing",
            Self::OutOfBounds => "out-of-bounds",
            Self::NonLatticeEndpoint => "non-lattice-endpoint",
            Self::PathCollision => "path-collision",
            Self::PickupDropConflict => "pickup-drop-conflict",
            Self::DropOccupied => "drop-occupied",
            Self::EmptyOntoOccupied => "empty-onto-occupied",
            Self::ReMoveForbidden => "re-move-forbidden",
            Self::GapMotionForbidden => "gap-motion-forbidden",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveViolation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl MoveViolation {
    fn new(kind: ViolationKind, detail: impl Into<String>) -> Self {
        Self { kind, detail: detail.into() }
    }
}

impl fmt::Display for MoveViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.detail)
    }
}

/// Integer points on the segment between two doubled-unit positions,
/// both endpoints included.
pub(crate) fn integer_points(from: (i32, i32), to: (i32, i32)) -> impl Iterator<Item = (i32, i32)> {
    let (dr, dc) = (to.0 - from.0, to.1 - from.1);
    let g = gcd(dr.unsigned_abs(), dc.unsigned_abs()).max(1) as i32;
    let (sr, sc) = (dr / g, dc / g);
    let steps = if dr == 0 && dc == 0 { 0 } else { g };
    (0..=steps).map(move |k| (from.0 + k * sr, from.1 + k * sc))
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Every rule `mv` violates on `grid` under `config`; empty when the move is executable.
///
/// Occupancy checks run against the grid with the pickup sites of all
/// carried traps cleared, since every pickup happens before any drop.
pub fn validate_move(grid: &OccupancyGrid, mv: &CompositeMove, config: &PlannerConfig) -> Vec<MoveViolation> {
    use ViolationKind::*;
    let mut out = Vec::new();
    let (n_rows, n_cols) = (mv.row_tones.len(), mv.col_tones.len());
    let last = mv.substeps();

    if n_rows > config.n_v || n_cols > config.n_h {
        out.push(MoveViolation::new(
            ToneLimit,
            format!("{n_rows} row tones / {n_cols} column tones exceed {} / {}", config.n_v, config.n_h),
        ));
    }
    if n_rows.saturating_mul(n_cols) > config.k {
        out.push(MoveViolation::new(
            TrapLimit,
            format!("{} traps exceed the limit of {}", n_rows * n_cols, config.k),
        ));
    }

    for (axis, tones) in [(Axis::Row, &mv.row_tones), (Axis::Col, &mv.col_tones)] {
        for w in 0..=last {
            if let Some(i) = (1..tones.len()).find(|&i| tones[i - 1].path[w] >= tones[i].path[w]) {
                out.push(MoveViolation::new(
                    ToneCrossing,
                    format!(
                        "{axis:?} tones {} and {i} at waypoint {w}: {} >= {}",
                        i - 1,
                        tones[i - 1].path[w],
                        tones[i].path[w]
                    ),
                ));
            }
        }
    }

    let limits = [(Axis::Row, &mv.row_tones, grid.rows()), (Axis::Col, &mv.col_tones, grid.cols())];
    for (axis, tones, extent) in limits {
        let max = 2 * (extent as i32 - 1);
        for (i, t) in tones.iter().enumerate() {
            if let Some((w, v)) = t.path.iter().enumerate().find(|(_, &v)| v < 0 || v > max) {
                out.push(MoveViolation::new(
                    OutOfBounds,
                    format!("{axis:?} tone {i} at waypoint {w} is {v}, allowed 0..={max}"),
                ));
            }
        }
    }

    for (axis, tones) in [(Axis::Row, &mv.row_tones), (Axis::Col, &mv.col_tones)] {
        for (i, t) in tones.iter().enumerate() {
            if t.start() % 2 != 0 || t.end() % 2 != 0 {
                out.push(MoveViolation::new(
                    NonLatticeEndpoint,
                    format!("{axis:?} tone {i} starts at {} and ends at {}", t.start(), t.end()),
                ));
            }
        }
    }

    let forbid_rows = !config.allow_row_gap_motion;
    let forbid_cols = !config.allow_col_gap_motion;
    for (axis, tones, forbidden) in [(Axis::Row, &mv.row_tones, forbid_rows), (Axis::Col, &mv.col_tones, forbid_cols)] {
        if !forbidden {
            continue;
        }
        for (i, t) in tones.iter().enumerate() {
            if let Some((w, v)) = t.path.iter().enumerate().find(|(_, &v)| v % 2 != 0) {
                out.push(MoveViolation::new(
                    GapMotionForbidden,
                    format!("{axis:?} tone {i} enters gap {v} at waypoint {w} but gap motion is disabled"),
                ));
            }
        }
    }

    // Effective occupancy: all pickups happen before any drop.
    let carried = carried_traps(grid, mv);
    let mut effective = grid.clone();
    let mut is_carried = vec![false; n_rows * n_cols];
    for &(i, j) in &carried {
        let (r, c) = mv.site_at(i, j, 0);
        effective.set_occupied(r, c, false);
        is_carried[i * n_cols + j] = true;
    }
    let blocked = |row: i32, col: i32| lattice_site(&effective, row, col).is_some_and(|(r, c)| effective.is_occupied(r, c));

    for i in 0..n_rows {
        for j in 0..n_cols {
            let rp = &mv.row_tones[i].path;
            let cp = &mv.col_tones[j].path;
            let mut hits: Vec<(i32, i32)> = Vec::new();
            for s in 0..last {
                for p in integer_points((rp[s], cp[s]), (rp[s + 1], cp[s + 1])) {
                    let at_pickup = s == 0 && p == (rp[0], cp[0]);
                    let at_drop = s + 1 == last && p == (rp[last], cp[last]);
                    if !at_pickup && !at_drop && blocked(p.0, p.1) && !hits.contains(&p) {
                        hits.push(p);
                    }
                }
            }
            for (r, c) in hits {
                out.push(MoveViolation::new(
                    PathCollision,
                    format!("trap ({i},{j}) crosses occupied site ({},{})", r / 2, c / 2),
                ));
            }
        }
    }

    let mut drops: Vec<(i32, i32, usize, usize)> = (0..n_rows)
        .flat_map(|i| (0..n_cols).map(move |j| (i, j)))
        .map(|(i, j)| (mv.row_tones[i].end(), mv.col_tones[j].end(), i, j))
        .collect();
    drops.sort_unstable();
    for w in drops.windows(2) {
        if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
            out.push(MoveViolation::new(
                PickupDropConflict,
                format!(
                    "traps ({},{}) and ({},{}) both end at ({},{})",
                    w[0].2, w[0].3, w[1].2, w[1].3, w[0].0, w[0].1
                ),
            ));
        }
    }

    for i in 0..n_rows {
        for j in 0..n_cols {
            let (er, ec) = (mv.row_tones[i].end(), mv.col_tones[j].end());
            let occupied_drop = blocked(er, ec);
            if is_carried[i * n_cols + j] {
                if occupied_drop {
                    out.push(MoveViolation::new(
                        DropOccupied,
                        format!("trap ({i},{j}) carries an atom onto occupied site ({},{})", er / 2, ec / 2),
                    ));
                }
            } else if occupied_drop && !config.allow_empty_onto_occupied {
                out.push(MoveViolation::new(
                    EmptyOntoOccupied,
                    format!("empty trap ({i},{j}) ends on occupied site ({},{})", er / 2, ec / 2),
                ));
            }
        }
    }

    if !config.allow_multiple_moves {
        for &(i, j) in &carried {
            let (r, c) = mv.site_at(i, j, 0);
            if grid.is_moved(r, c) {
                out.push(MoveViolation::new(
                    ReMoveForbidden,
                    format!("trap ({i},{j}) picks up the already moved atom at ({r},{c})"),
                ));
            }
        }
    }

    out
}

/// Executes `mv`: carried atoms leave their pickup sites and land, marked as
/// moved, on their drop sites. Only the physical rules are enforced here;
/// configuration limits are the caller's business.
pub fn apply_move(grid: &OccupancyGrid, mv: &CompositeMove) -> Result<OccupancyGrid> {
    let violations = validate_move(grid, mv, &PlannerConfig::permissive());
    if !violations.is_empty() {
        return Err(Error::InvalidMove(violations));
    }
    Ok(apply_unchecked(grid, mv))
}

pub(crate) fn apply_unchecked(grid: &OccupancyGrid, mv: &CompositeMove) -> OccupancyGrid {
    let carried = carried_traps(grid, mv);
    let last = mv.substeps();
    let mut next = grid.clone();
    for &(i, j) in &carried {
        let (r, c) = mv.site_at(i, j, 0);
        next.set_occupied(r, c, false);
    }
    for &(i, j) in &carried {
        let (r, c) = mv.site_at(i, j, last);
        next.place_moved_atom(r, c);
    }
    next
}
