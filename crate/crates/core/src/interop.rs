//! Entry points shaped for foreign-language wrappers: plain nested vectors
//! in, serialisable documents out.

use crate::config::PlannerConfig;
use crate::error::Result;
use crate::grid::{OccupancyGrid, TargetRegion};
use crate::io::{replay, PlanDocument, ReplayReport};
use crate::sequencer::plan;

fn instance(occupancy: &[Vec<bool>], region: [usize; 4]) -> Result<(OccupancyGrid, TargetRegion)> {
    let grid = OccupancyGrid::from_rows(occupancy)?;
    let [r, c, h, w] = region;
    let region = TargetRegion::new(r, c, h, w)?;
    region.check_fits(grid.rows(), grid.cols())?;
    Ok((grid, region))
}

/// Builds a configuration from `key=value` style overrides of the defaults.
pub fn config_from_pairs<K, V>(pairs: impl IntoIterator<Item = (K, V)>) -> Result<PlannerConfig>
where
    K: AsRef<str>,
    V: AsRef<str>,
{
    let mut config = PlannerConfig::default();
    for (k, v) in pairs {
        config.set(k.as_ref(), v.as_ref())?;
    }
    config.validate()?;
    Ok(config)
}

/// Plans on a row-major occupancy matrix; `None` when planning fails.
/// `region` is `[row_offset, col_offset, height, width]`.
pub fn plan_occupancy(occupancy: &[Vec<bool>], region: [usize; 4], config: &PlannerConfig) -> Result<Option<PlanDocument>> {
    let (grid, region) = instance(occupancy, region)?;
    Ok(plan(&grid, &region, config)?
        .ok()
        .map(|p| PlanDocument::new(&grid, &region, &p, config)))
}

/// Replays a plan document on a row-major occupancy matrix.
pub fn validate_occupancy(
    occupancy: &[Vec<bool>],
    region: [usize; 4],
    document: &PlanDocument,
    config: &PlannerConfig,
) -> Result<ReplayReport> {
    let (grid, region) = instance(occupancy, region)?;
    Ok(replay(&grid, &region, &document.moves(), config))
}
