//! Independent move checker used as a test oracle.
//!
//! It shares no code with the library's validator: trap positions are
//! sampled along every substep at exact rational parameters fine enough to
//! hit each lattice point a straight segment can pass through.

#![allow(dead_code)]

use num_rational::Ratio;
use tweezer_core::{CompositeMove, OccupancyGrid, PlannerConfig, TargetRegion};

type Q = Ratio<i64>;

#[derive(Clone)]
pub struct State {
    rows: usize,
    cols: usize,
    occ: Vec<bool>,
    moved: Vec<bool>,
}

impl State {
    pub fn from_grid(grid: &OccupancyGrid) -> Self {
        let (rows, cols) = (grid.rows(), grid.cols());
        let mut occ = vec![false; rows * cols];
        let mut moved = vec![false; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                occ[r * cols + c] = grid.is_occupied(r, c);
                moved[r * cols + c] = grid.is_moved(r, c);
            }
        }
        Self { rows, cols, occ, moved }
    }

    pub fn vacancies(&self, region: &TargetRegion) -> usize {
        let mut n = 0;
        for r in region.row_offset..region.row_offset + region.height {
            for c in region.col_offset..region.col_offset + region.width {
                if !self.occ[r * self.cols + c] {
                    n += 1;
                }
            }
        }
        n
    }

    fn site(&self, row: i64, col: i64) -> Option<usize> {
        if row < 0 || col < 0 || row % 2 != 0 || col % 2 != 0 {
            return None;
        }
        let (r, c) = ((row / 2) as usize, (col / 2) as usize);
        (r < self.rows && c < self.cols).then_some(r * self.cols + c)
    }

    /// Violations of `mv`, or the successor state.
    pub fn step(&self, mv: &CompositeMove, cfg: &PlannerConfig) -> Result<State, Vec<String>> {
        let rt: Vec<Vec<i64>> = mv.row_tones().iter().map(|t| t.path.iter().map(|&v| v as i64).collect()).collect();
        let ct: Vec<Vec<i64>> = mv.col_tones().iter().map(|t| t.path.iter().map(|&v| v as i64).collect()).collect();
        let mut bad = Vec::new();
        if rt.len() > cfg.n_v || ct.len() > cfg.n_h || rt.len() * ct.len() > cfg.k {
            bad.push(format!("limits: {}x{} tones", rt.len(), ct.len()));
        }
        let len = rt[0].len();
        if len < 2 || rt.iter().chain(&ct).any(|p| p.len() != len) {
            bad.push("ragged paths".into());
            return Err(bad);
        }
        for (paths, extent, gaps_ok) in [
            (&rt, self.rows, cfg.allow_row_gap_motion),
            (&ct, self.cols, cfg.allow_col_gap_motion),
        ] {
            let max = 2 * (extent as i64 - 1);
            for p in paths.iter() {
                if p.iter().any(|&v| v < 0 || v > max) {
                    bad.push(format!("out of bounds {p:?}"));
                }
                if p[0] % 2 != 0 || p[len - 1] % 2 != 0 {
                    bad.push(format!("endpoint in gap {p:?}"));
                }
                if !gaps_ok && p.iter().any(|v| v % 2 != 0) {
                    bad.push(format!("gap motion not allowed {p:?}"));
                }
            }
            for w in 0..len {
                for i in 1..paths.len() {
                    if paths[i - 1][w] >= paths[i][w] {
                        bad.push(format!("tones {} and {i} out of order at waypoint {w}", i - 1));
                    }
                }
            }
        }
        if !bad.is_empty() {
            return Err(bad);
        }

        let mut effective = self.occ.clone();
        let mut carried = Vec::new();
        for (i, r) in rt.iter().enumerate() {
            for (j, c) in ct.iter().enumerate() {
                if let Some(s) = self.site(r[0], c[0]) {
                    if self.occ[s] {
                        if self.moved[s] && !cfg.allow_multiple_moves {
                            bad.push(format!("trap ({i},{j}) picks up a moved atom"));
                        }
                        effective[s] = false;
                        carried.push((i, j));
                    }
                }
            }
        }

        let last = len - 1;
        let mut drops = Vec::new();
        for (i, r) in rt.iter().enumerate() {
            for (j, c) in ct.iter().enumerate() {
                let is_carried = carried.contains(&(i, j));
                for s in 0..last {
                    let (dr, dc) = (r[s + 1] - r[s], c[s + 1] - c[s]);
                    let steps = 4 * dr.abs().max(dc.abs()).max(1);
                    for k in 0..=steps {
                        if (s == 0 && k == 0) || (s + 1 == last && k == steps) {
                            continue;
                        }
                        let t = Q::new(k, steps);
                        let pr = Q::from_integer(r[s]) + t * dr;
                        let pc = Q::from_integer(c[s]) + t * dc;
                        if !pr.is_integer() || !pc.is_integer() {
                            continue;
                        }
                        if let Some(site) = self.site(pr.to_integer(), pc.to_integer()) {
                            if effective[site] {
                                bad.push(format!("trap ({i},{j}) hits an atom in substep {s}"));
                            }
                        }
                    }
                }
                let end = self.site(r[last], c[last]).expect("endpoints checked");
                if drops.contains(&end) {
                    bad.push(format!("two traps end on site {end}"));
                }
                drops.push(end);
                if effective[end] && (is_carried || !cfg.allow_empty_onto_occupied) {
                    bad.push(format!("trap ({i},{j}) ends on an occupied site"));
                }
            }
        }
        if !bad.is_empty() {
            return Err(bad);
        }

        let mut next = State { occ: effective, ..self.clone() };
        for &(i, j) in &carried {
            let s = self.site(rt[i][0], ct[j][0]).unwrap();
            next.moved[s] = false;
        }
        for &(i, j) in &carried {
            let e = self.site(rt[i][last], ct[j][last]).unwrap();
            next.occ[e] = true;
            next.moved[e] = true;
        }
        Ok(next)
    }
}

/// Replays `moves`; returns the final vacancy count or the first failure.
pub fn replay(
    grid: &OccupancyGrid,
    region: &TargetRegion,
    moves: &[CompositeMove],
    cfg: &PlannerConfig,
) -> Result<usize, String> {
    let mut state = State::from_grid(grid);
    for (n, mv) in moves.iter().enumerate() {
        state = state.step(mv, cfg).map_err(|v| format!("move {n}: {}", v.join("; ")))?;
    }
    Ok(state.vacancies(region))
}

pub fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
