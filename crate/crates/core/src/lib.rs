//! Planning of parallel rearrangement sequences for atoms held in a
//! rectangular array of optical tweezers, driven by a pair of crossed
//! acousto-optic deflectors.
//!
//! A [`CompositeMove`] is the Cartesian product of row and column tone
//! trajectories; [`plan`] greedily chains such moves until a target region
//! is defect-free, and [`plan_sequential`] is the one-atom-at-a-time
//! reference it is benchmarked against.

pub mod baseline;
pub mod config;
pub mod cost;
pub mod error;
pub mod grid;
pub mod interop;
pub mod io;
pub mod montecarlo;
pub mod moves;
pub mod sequencer;

pub use baseline::plan_sequential;
pub use config::PlannerConfig;
pub use cost::{fitness, net_filled, time_demand, CostParams, Fitness};
pub use error::{Error, Result};
pub use grid::{count_target_vacancies, random_grid, total_atoms, InstanceSpec, OccupancyGrid, TargetRegion};
pub use moves::{apply_move, validate_move, Axis, CompositeMove, MoveViolation, ToneTrajectory, ViolationKind};
pub use sequencer::{plan, Candidate, FailureReason, Plan, PlanFailure, PlanOutcome};
