use thiserror::Error;

use crate::moves::MoveViolation;

/// Errors raised by constructors, parsers and contract checks.
///
/// Planning failures are not errors; they are reported through
/// [`crate::sequencer::PlanFailure`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("target region {row_offset},{col_offset} {height}x{width} does not fit a {rows}x{cols} grid")]
    RegionOutOfBounds {
        row_offset: usize,
        col_offset: usize,
        height: usize,
        width: usize,
        rows: usize,
        cols: usize,
    },

    #[error("malformed move: {0}")]
    MalformedMove(String),

    #[error("waypoint {waypoint} out of range for a move with {substeps} substeps")]
    WaypointOutOfRange { waypoint: usize, substeps: usize },

    #[error("move violates {} rule(s), first: {}", .0.len(), .0.first().map(|v| v.to_string()).unwrap_or_default())]
    InvalidMove(Vec<MoveViolation>),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
