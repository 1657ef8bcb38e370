//! Move shapes described by their (source line, target line) tone pairs.
//!
//! A blueprint fixes which stationary line every tone starts on and ends on;
//! [`Blueprint::build`] turns it into concrete waypoints, picking the
//! half-step directions that keep tones ordered and inside the grid.

use crate::moves::{Axis, CompositeMove, ToneTrajectory};

/// Trajectory template. The axis names the line the atoms travel on or with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    /// In-line packing along rows (`Row`) or columns (`Col`); one substep.
    Compact(Axis),
    /// A row (column) travels perpendicular to itself while its traps sit in
    /// the column (row) gaps; three substeps.
    Lateral(Axis),
    /// A row (column) steps into the adjacent gap, its traps travel along it,
    /// then step onto the target line; three substeps.
    Lengthwise(Axis),
    /// Half-step diagonally, travel rows then columns in the gaps, half-step
    /// onto the targets; four substeps.
    Complex,
}

impl MoveKind {
    pub fn transposed(self) -> Self {
        let flip = |a: Axis| match a {
            Axis::Row => Axis::Col,
            Axis::Col => Axis::Row,
        };
        match self {
            Self::Compact(a) => Self::Compact(flip(a)),
            Self::Lateral(a) => Self::Lateral(flip(a)),
            Self::Lengthwise(a) => Self::Lengthwise(flip(a)),
            Self::Complex => Self::Complex,
        }
    }

    /// Whether a row tone may go from row `from` to row `to`.
    pub fn allows_row_pair(self, from: usize, to: usize) -> bool {
        match self {
            Self::Compact(Axis::Row) => from == to,
            Self::Compact(Axis::Col) => true,
            Self::Lateral(Axis::Row) => true,
            Self::Lateral(Axis::Col) => from.abs_diff(to) <= 1,
            Self::Lengthwise(Axis::Row) => from.abs_diff(to) <= 1,
            Self::Lengthwise(Axis::Col) => true,
            Self::Complex => true,
        }
    }

    /// Whether a column tone may go from column `from` to column `to`.
    pub fn allows_col_pair(self, from: usize, to: usize) -> bool {
        self.transposed().allows_row_pair(from, to)
    }

    /// Traps travel straight along lattice lines and may pass stationary sites.
    pub fn is_in_line(self) -> bool {
        matches!(self, Self::Compact(_))
    }

    pub fn needs_row_gaps(self) -> bool {
        matches!(self, Self::Complex | Self::Lengthwise(Axis::Row) | Self::Lateral(Axis::Col))
    }

    pub fn needs_col_gaps(self) -> bool {
        self.transposed().needs_row_gaps()
    }
}

/// Tone pairs of a move, each list sorted by source line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Blueprint {
    pub kind: MoveKind,
    pub rows: Vec<(usize, usize)>,
    pub cols: Vec<(usize, usize)>,
}

impl Blueprint {
    pub fn new(kind: MoveKind, mut rows: Vec<(usize, usize)>, mut cols: Vec<(usize, usize)>) -> Self {
        rows.sort_unstable();
        cols.sort_unstable();
        Self { kind, rows, cols }
    }

    pub fn transposed(&self) -> Self {
        Self {
            kind: self.kind.transposed(),
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }

    pub fn trap_count(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    /// Index at which a pair `(from, to)` would be inserted on an axis, if the
    /// result stays ordered on both ends and uses fresh lines.
    pub fn insertion_index(pairs: &[(usize, usize)], from: usize, to: usize) -> Option<usize> {
        let i = pairs.partition_point(|&(s, _)| s < from);
        if pairs.get(i).is_some_and(|&(s, _)| s == from) {
            return None;
        }
        let j = pairs.partition_point(|&(_, t)| t < to);
        if pairs.get(j).is_some_and(|&(_, t)| t == to) {
            return None;
        }
        (i == j).then_some(i)
    }

    /// Concrete trajectories on a `rows × cols` grid, or `None` if the tones
    /// cannot be kept ordered and in bounds.
    pub fn build(&self, rows: usize, cols: usize) -> Option<CompositeMove> {
        if self.rows.is_empty() || self.cols.is_empty() || !ordered(&self.rows) || !ordered(&self.cols) {
            return None;
        }
        for &(s, t) in &self.rows {
            if s >= rows || t >= rows || !self.kind.allows_row_pair(s, t) {
                return None;
            }
        }
        for &(s, t) in &self.cols {
            if s >= cols || t >= cols || !self.kind.allows_col_pair(s, t) {
                return None;
            }
        }
        match self.kind {
            MoveKind::Compact(Axis::Col) | MoveKind::Lateral(Axis::Col) | MoveKind::Lengthwise(Axis::Col) => {
                Some(self.transposed().build_row_oriented(cols, rows)?.transposed())
            }
            _ => self.build_row_oriented(rows, cols),
        }
    }

    fn build_row_oriented(&self, rows: usize, cols: usize) -> Option<CompositeMove> {
        let even = |x: usize| 2 * x as i32;
        let (row_tones, col_tones): (Vec<Vec<i32>>, Vec<Vec<i32>>) = match self.kind {
            MoveKind::Compact(_) => (
                self.rows.iter().map(|&(s, _)| vec![even(s), even(s)]).collect(),
                self.cols.iter().map(|&(u, v)| vec![even(u), even(v)]).collect(),
            ),
            MoveKind::Lateral(_) => {
                let mids = single_offsets(&self.cols, cols)?;
                (
                    self.rows.iter().map(|&(s, t)| vec![even(s), even(s), even(t), even(t)]).collect(),
                    self.cols
                        .iter()
                        .zip(&mids)
                        .map(|(&(u, v), &m)| vec![even(u), m, m, even(v)])
                        .collect(),
                )
            }
            MoveKind::Lengthwise(_) => {
                let mids = single_offsets(&self.rows, rows)?;
                (
                    self.rows
                        .iter()
                        .zip(&mids)
                        .map(|(&(s, t), &m)| vec![even(s), m, m, even(t)])
                        .collect(),
                    self.cols.iter().map(|&(u, v)| vec![even(u), even(u), even(v), even(v)]).collect(),
                )
            }
            MoveKind::Complex => {
                let (row_out, row_in) = double_offsets(&self.rows, rows)?;
                let (col_out, col_in) = double_offsets(&self.cols, cols)?;
                (
                    self.rows
                        .iter()
                        .enumerate()
                        .map(|(i, &(s, t))| vec![even(s), row_out[i], row_in[i], row_in[i], even(t)])
                        .collect(),
                    self.cols
                        .iter()
                        .enumerate()
                        .map(|(j, &(u, v))| vec![even(u), col_out[j], col_out[j], col_in[j], even(v)])
                        .collect(),
                )
            }
        };
        CompositeMove::new(
            row_tones.into_iter().map(ToneTrajectory::new).collect(),
            col_tones.into_iter().map(ToneTrajectory::new).collect(),
        )
        .ok()
    }
}

fn ordered(pairs: &[(usize, usize)]) -> bool {
    pairs.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1)
}

#[inline]
fn gap_in_bounds(x: i32, extent: usize) -> bool {
    x >= 1 && x <= 2 * extent as i32 - 3
}

/// Gap positions for tones that step half a site off their line and later
/// step back onto an adjacent or the same line.
fn single_offsets(pairs: &[(usize, usize)], extent: usize) -> Option<Vec<i32>> {
    const DIRS: [i32; 2] = [1, -1];
    let options = |&(s, t): &(usize, usize)| -> Vec<i32> {
        DIRS.iter()
            .filter(|&&d| t == s || (t as i64 - s as i64) as i32 == d)
            .map(|&d| 2 * s as i32 + d)
            .filter(|&m| gap_in_bounds(m, extent))
            .collect()
    };
    // Feasibility DP over the last chosen gap position.
    let n = pairs.len();
    let opts: Vec<Vec<i32>> = pairs.iter().map(options).collect();
    let mut ok: Vec<Vec<Option<usize>>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(opts[i].len());
        for &m in &opts[i] {
            let back = if i == 0 {
                Some(usize::MAX)
            } else {
                (0..opts[i - 1].len()).find(|&p| ok[i - 1][p].is_some() && opts[i - 1][p] < m)
            };
            row.push(back);
        }
        ok.push(row);
    }
    let mut choice = (0..opts[n - 1].len()).find(|&p| ok[n - 1][p].is_some())?;
    let mut out = vec![0; n];
    for i in (0..n).rev() {
        out[i] = opts[i][choice];
        if i > 0 {
            choice = ok[i][choice].expect("feasible back-pointer");
        }
    }
    Some(out)
}

/// Departure and arrival gap positions for tones that travel between gaps,
/// minimising the longest gap-to-gap travel.
fn double_offsets(pairs: &[(usize, usize)], extent: usize) -> Option<(Vec<i32>, Vec<i32>)> {
    let n = pairs.len();
    let states = |&(s, t): &(usize, usize)| -> Vec<(i32, i32)> {
        let toward = if t >= s { 1 } else { -1 };
        let mut v = Vec::with_capacity(4);
        for d in [toward, -toward] {
            for e in [-toward, toward] {
                let (a, b) = (2 * s as i32 + d, 2 * t as i32 + e);
                if gap_in_bounds(a, extent) && gap_in_bounds(b, extent) {
                    v.push((a, b));
                }
            }
        }
        v
    };
    let opts: Vec<Vec<(i32, i32)>> = pairs.iter().map(states).collect();
    // (worst travel so far, back-pointer)
    let mut dp: Vec<Vec<Option<(u32, usize)>>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(opts[i].len());
        for &(a, b) in &opts[i] {
            let travel = a.abs_diff(b);
            let entry = if i == 0 {
                Some((travel, usize::MAX))
            } else {
                let mut best: Option<(u32, usize)> = None;
                for (p, &(pa, pb)) in opts[i - 1].iter().enumerate() {
                    if let Some((cost, _)) = dp[i - 1][p] {
                        if pa < a && pb < b {
                            let c = cost.max(travel);
                            if best.is_none_or(|(bc, _)| c < bc) {
                                best = Some((c, p));
                            }
                        }
                    }
                }
                best
            };
            row.push(entry);
        }
        dp.push(row);
    }
    let mut choice = None;
    for (p, e) in dp[n - 1].iter().enumerate() {
        if let Some((c, _)) = e {
            if choice.is_none_or(|(bc, _)| *c < bc) {
                choice = Some((*c, p));
            }
        }
    }
    let (_, mut p) = choice?;
    let mut out = vec![0; n];
    let mut inn = vec![0; n];
    for i in (0..n).rev() {
        (out[i], inn[i]) = opts[i][p];
        if i > 0 {
            p = dp[i][p].expect("feasible back-pointer").1;
        }
    }
    Some((out, inn))
}
