//! Text formats: occupancy grids and plan documents, plus plan replay.
//!
//! Grid files hold one line per row of `0`/`1` characters. The target region
//! is given on a header line `#target: <row_offset> <col_offset> <height> <width>`;
//! other lines starting with `#` are comments.
//!
//! Plan documents are JSON:
//!
//! ```json
//! {
//!   "format": "tweezer-plan/1",
//!   "rows": 10, "cols": 10,
//!   "target": {"row_offset": 2, "col_offset": 2, "height": 6, "width": 6},
//!   "site_pitch_um": 1.0,
//!   "move_count": 1, "total_time_us": 135.4, "total_distance_um": 4.0,
//!   "moves": [
//!     {"row_tones": [[0, 1, 3, 3, 4]], "col_tones": [[8, 7, 7, 3, 2]],
//!      "distance_um": 4.0, "cost_us": 135.4}
//!   ]
//! }
//! ```
//!
//! Tone waypoints are in doubled units: even values are lattice lines, odd
//! values the gaps between them.

use serde::{Deserialize, Serialize};

use crate::config::PlannerConfig;
use crate::cost::time_demand;
use crate::error::{Error, Result};
use crate::grid::{count_target_vacancies, OccupancyGrid, TargetRegion};
use crate::moves::{apply_unchecked, move_distance, validate_move, CompositeMove, MoveViolation};
use crate::sequencer::Plan;

pub const PLAN_FORMAT: &str = "tweezer-plan/1";

const TARGET_PREFIX: &str = "#target:";

/// Parses a grid file; the region is `None` when the header is absent.
pub fn parse_grid(text: &str) -> Result<(OccupancyGrid, Option<TargetRegion>)> {
    let mut region = None;
    let mut rows: Vec<Vec<bool>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if let Some(rest) = trimmed.strip_prefix(TARGET_PREFIX) {
            if region.is_some() {
                return Err(Error::Parse { line, message: "duplicate #target header".into() });
            }
            let nums = rest
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse { line, message: format!("bad #target value: {e}") })?;
            let [r, c, h, w] = nums[..] else {
                return Err(Error::Parse {
                    line,
                    message: format!("#target needs 4 integers, got {}", nums.len()),
                });
            };
            region = Some(TargetRegion::new(r, c, h, w).map_err(|e| Error::Parse { line, message: e.to_string() })?);
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row = trimmed
            .chars()
            .enumerate()
            .map(|(col, ch)| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse { line, message: format!("unexpected {other:?} at column {}", col + 1) }),
            })
            .collect::<Result<Vec<bool>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line,
                    message: format!("row has {} sites, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: text.lines().count().max(1), message: "no grid rows".into() });
    }
    let grid = OccupancyGrid::from_rows(&rows)?;
    if let Some(r) = &region {
        r.check_fits(grid.rows(), grid.cols())?;
    }
    Ok((grid, region))
}

/// Writes a grid file, with a `#target:` header when a region is given.
pub fn format_grid(grid: &OccupancyGrid, region: Option<&TargetRegion>) -> String {
    let mut out = String::with_capacity((grid.cols() + 1) * grid.rows() + 32);
    if let Some(r) = region {
        out.push_str(&format!("{TARGET_PREFIX} {} {} {} {}\n", r.row_offset, r.col_offset, r.height, r.width));
    }
    for r in 0..grid.rows() {
        out.extend(grid.row_iter(r).map(|o| if o { '1' } else { '0' }));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveRecord {
    #[serde(flatten)]
    pub mv: CompositeMove,
    pub distance_um: f64,
    pub cost_us: f64,
}

/// Serialised form of a plan together with the instance it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanDocument {
    pub format: String,
    pub rows: usize,
    pub cols: usize,
    pub target: TargetRegion,
    pub site_pitch_um: f64,
    pub move_count: usize,
    pub total_time_us: f64,
    pub total_distance_um: f64,
    pub moves: Vec<MoveRecord>,
}

impl PlanDocument {
    pub fn new(grid: &OccupancyGrid, region: &TargetRegion, plan: &Plan, config: &PlannerConfig) -> Self {
        let moves = plan
            .moves
            .iter()
            .map(|mv| MoveRecord {
                mv: mv.clone(),
                distance_um: move_distance(mv, config.cost.site_pitch),
                cost_us: time_demand(&config.cost, mv),
            })
            .collect();
        Self {
            format: PLAN_FORMAT.to_string(),
            rows: grid.rows(),
            cols: grid.cols(),
            target: *region,
            site_pitch_um: config.cost.site_pitch,
            move_count: plan.move_count,
            total_time_us: plan.total_time,
            total_distance_um: plan.total_distance,
            moves,
        }
    }

    pub fn moves(&self) -> Vec<CompositeMove> {
        self.moves.iter().map(|m| m.mv.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plan documents always serialise");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text)?;
        if doc.format != PLAN_FORMAT {
            return Err(Error::Parse { line: 1, message: format!("unsupported plan format {:?}", doc.format) });
        }
        if doc.move_count != doc.moves.len() {
            return Err(Error::Parse {
                line: 1,
                message: format!("move_count {} but {} moves listed", doc.move_count, doc.moves.len()),
            });
        }
        Ok(doc)
    }
}

/// Violations of one replayed move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveReport {
    pub index: usize,
    pub violations: Vec<MoveViolation>,
}

/// Outcome of replaying a move list. Replay stops at the first invalid move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub moves_total: usize,
    pub moves_applied: usize,
    pub invalid: Vec<MoveReport>,
    pub initial_vacancies: usize,
    pub final_vacancies: usize,
}

impl ReplayReport {
    pub fn ok(&self) -> bool {
        self.invalid.is_empty() && self.final_vacancies == 0
    }
}

/// Validates and applies `moves` in order, starting from `grid`.
pub fn replay(grid: &OccupancyGrid, region: &TargetRegion, moves: &[CompositeMove], config: &PlannerConfig) -> ReplayReport {
    let mut state = grid.clone();
    let mut invalid = Vec::new();
    let mut applied = 0;
    for (index, mv) in moves.iter().enumerate() {
        let violations = validate_move(&state, mv, config);
        if !violations.is_empty() {
            invalid.push(MoveReport { index, violations });
            break;
        }
        state = apply_unchecked(&state, mv);
        applied += 1;
    }
    ReplayReport {
        moves_total: moves.len(),
        moves_applied: applied,
        invalid,
        initial_vacancies: count_target_vacancies(grid, region),
        final_vacancies: count_target_vacancies(&state, region),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequencer::plan;

    #[test]
    fn grid_round_trip() {
        let text = "#target: 1 1 2 2\n0101\n1111\n0000\n";
        let (grid, region) = parse_grid(text).unwrap();
        assert_eq!((grid.rows(), grid.cols()), (3, 4));
        assert_eq!(region, Some(TargetRegion::new(1, 1, 2, 2).unwrap()));
        assert_eq!(format_grid(&grid, region.as_ref()), text);
    }

    #[test]
    fn grid_errors_carry_line_numbers() {
        let err = parse_grid("0101\n01x1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_grid("01\n011\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_grid("#target: 1 2\n01\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(parse_grid("#target: 1 1 5 5\n01\n10\n").is_err());
        assert!(parse_grid("# nothing\n").is_err());
    }

    #[test]
    fn plan_document_round_trip() {
        let (grid, region) = parse_grid("#target: 1 1 3 3\n11011\n10001\n10101\n11001\n11111\n").unwrap();
        let region = region.unwrap();
        let config = PlannerConfig::default();
        let p = plan(&grid, &region, &config).unwrap().unwrap();
        let doc = PlanDocument::new(&grid, &region, &p, &config);
        let text = doc.to_json();
        let back = PlanDocument::from_json(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json(), text);
        let report = replay(&grid, &region, &back.moves(), &config);
        assert!(report.ok(), "{report:?}");
    }

    #[test]
    fn replay_stops_at_first_bad_move() {
        let (grid, region) = parse_grid("#target: 0 1 1 1\n11\n").unwrap();
        let region = region.unwrap();
        let bad: CompositeMove =
            serde_json::from_str(r#"{"row_tones":[[0,0]],"col_tones":[[0,2]]}"#).unwrap();
        let report = replay(&grid, &region, &[bad.clone(), bad], &PlannerConfig::default());
        assert_eq!(report.moves_applied, 0);
        assert_eq!(report.invalid.len(), 1);
        assert!(!report.ok());
    }

    #[test]
    fn rejects_foreign_documents() {
        assert!(PlanDocument::from_json(r#"{"format":"other"}"#).is_err());
        assert!(PlanDocument::from_json("not json").is_err());
    }
}
