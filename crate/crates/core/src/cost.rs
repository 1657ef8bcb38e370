//! Time-demand of moves and the fitness used to rank them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{OccupancyGrid, TargetRegion};
use crate::moves::{carried_traps, substep_displacements, CompositeMove};

/// Generalised time-demand function
/// `t = a + b·c + Σᵢ (c₁·dᵢ + c₂·√dᵢ)` where `dᵢ` is the longest tone
/// displacement of substep `i` in µm and `c` the number of substeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostParams {
    /// µs, paid once per move.
    pub constant_offset: f64,
    /// µs, paid once per substep.
    pub per_substep_offset: f64,
    /// µs per µm.
    pub linear_factor: f64,
    /// µs per √µm.
    pub sqrt_factor: f64,
    /// µm between neighbouring stationary traps.
    pub site_pitch: f64,
}

impl CostParams {
    /// 120 µs + d / (0.13 µm/µs).
    pub fn preset_tm() -> Self {
        Self {
            constant_offset: 120.0,
            per_substep_offset: 0.0,
            linear_factor: 1.0 / 0.13,
            sqrt_factor: 0.0,
            site_pitch: 1.0,
        }
    }

    /// 120 µs + d / (0.55 µm/µs).
    pub fn preset_tm2() -> Self {
        Self {
            linear_factor: 1.0 / 0.55,
            ..Self::preset_tm()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "tm" => Some(Self::preset_tm()),
            "tm2" => Some(Self::preset_tm2()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("constant_offset", self.constant_offset),
            ("per_substep_offset", self.per_substep_offset),
            ("linear_factor", self.linear_factor),
            ("sqrt_factor", self.sqrt_factor),
            ("site_pitch", self.site_pitch),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if self.site_pitch <= 0.0 {
            return Err(Error::Config("site_pitch must be positive".into()));
        }
        Ok(())
    }

    /// Time for a move given its substep maxima in µm.
    pub fn time_for_substeps(&self, substep_um: &[f64]) -> f64 {
        let travel: f64 = substep_um
            .iter()
            .map(|&d| self.linear_factor * d + self.sqrt_factor * d.sqrt())
            .sum();
        self.constant_offset + self.per_substep_offset * substep_um.len() as f64 + travel
    }

    /// Time for a move whose per-substep maxima are given in doubled-site units.
    pub(crate) fn time_for_doubled(&self, doubled: &[u32]) -> f64 {
        let travel: f64 = doubled
            .iter()
            .map(|&d| {
                let um = d as f64 * 0.5 * self.site_pitch;
                self.linear_factor * um + self.sqrt_factor * um.sqrt()
            })
            .sum();
        self.constant_offset + self.per_substep_offset * doubled.len() as f64 + travel
    }
}

impl Default for CostParams {
    fn default() -> Self {
        Self::preset_tm2()
    }
}

/// Execution time of `mv` in µs.
pub fn time_demand(params: &CostParams, mv: &CompositeMove) -> f64 {
    params.time_for_doubled(&substep_displacements(mv))
}

/// Net target sites gained per µs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fitness {
    pub net_filled: i64,
    pub cost: f64,
    pub value: f64,
}

impl Fitness {
    pub fn new(net_filled: i64, cost: f64) -> Self {
        let value = if cost > 0.0 { net_filled as f64 / cost } else { 0.0 };
        Self { net_filled, cost, value }
    }
}

/// Change in the number of filled target sites if `mv` were executed:
/// carried drops inside the region minus carried pickups inside it.
pub fn net_filled(grid: &OccupancyGrid, region: &TargetRegion, mv: &CompositeMove) -> i64 {
    let last = mv.substeps();
    let mut net = 0i64;
    for (i, j) in carried_traps(grid, mv) {
        let (pr, pc) = mv.site_at(i, j, 0);
        let (dr, dc) = mv.site_at(i, j, last);
        if region.contains(pr, pc) {
            net -= 1;
        }
        if region.contains(dr, dc) {
            net += 1;
        }
    }
    net
}

pub fn fitness(
    grid: &OccupancyGrid,
    region: &TargetRegion,
    mv: &CompositeMove,
    params: &CostParams,
) -> Fitness {
    Fitness::new(net_filled(grid, region, mv), time_demand(params, mv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::ToneTrajectory;

    fn single(row: Vec<i32>, col: Vec<i32>) -> CompositeMove {
        CompositeMove::new(vec![ToneTrajectory::new(row)], vec![ToneTrajectory::new(col)]).unwrap()
    }

    #[test]
    fn presets() {
        let tm = CostParams::preset_tm();
        assert_eq!(tm.time_for_substeps(&[0.0]), 120.0);
        assert!((tm.time_for_substeps(&[13.0]) - 220.0).abs() < 1e-9);
        assert!((tm.time_for_substeps(&[6.5]) - 170.0).abs() < 1e-9);
        let tm2 = CostParams::preset_tm2();
        assert!((tm2.time_for_substeps(&[55.0]) - 220.0).abs() < 1e-9);
        assert_eq!(CostParams::preset("tm"), Some(tm));
        assert_eq!(CostParams::preset("tm2"), Some(tm2));
        assert_eq!(CostParams::preset("fast"), None);
    }

    #[test]
    fn zero_displacement_costs_offset() {
        let mv = single(vec![4, 4], vec![2, 2]);
        assert_eq!(time_demand(&CostParams::preset_tm(), &mv), 120.0);
    }

    #[test]
    fn generalized_form() {
        // Two substeps of 2 µm: 10 per substep plus √2 per substep.
        let params = CostParams {
            constant_offset: 0.0,
            per_substep_offset: 10.0,
            linear_factor: 0.0,
            sqrt_factor: 1.0,
            site_pitch: 1.0,
        };
        let mv = single(vec![0, 4, 8], vec![0, 0, 0]);
        let expected = 20.0 + 2.0 * 2f64.sqrt();
        assert!((time_demand(&params, &mv) - expected).abs() < 1e-12);
    }

    #[test]
    fn site_pitch_scales_distance() {
        let params = CostParams { site_pitch: 2.0, ..CostParams::preset_tm() };
        let mv = single(vec![0, 0], vec![0, 13]);
        // 6.5 sites at 2 µm per site.
        assert!((time_demand(&params, &mv) - 220.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(CostParams { site_pitch: 0.0, ..CostParams::preset_tm() }.validate().is_err());
        assert!(CostParams { constant_offset: -1.0, ..CostParams::preset_tm() }.validate().is_err());
        assert!(CostParams { sqrt_factor: f64::NAN, ..CostParams::preset_tm() }.validate().is_err());
        assert!(CostParams::preset_tm2().validate().is_ok());
    }

    #[test]
    fn fitness_counts_net_gain() {
        let region = TargetRegion::new(1, 1, 2, 2).unwrap();
        // Entirely outside the region.
        let mut grid = OccupancyGrid::empty(4, 4).unwrap();
        grid.set_occupied(0, 0, true);
        let outside = single(vec![0, 0], vec![0, 0]);
        let f = fitness(&grid, &region, &outside, &CostParams::preset_tm());
        assert_eq!(f.net_filled, 0);
        assert_eq!(f.value, 0.0);
        // Relocation within the region cancels out.
        grid.set_occupied(1, 1, true);
        let inside = single(vec![2, 2], vec![2, 4]);
        assert_eq!(net_filled(&grid, &region, &inside), 0);
        // Bringing one atom in.
        let bring = single(vec![0, 1, 3, 3, 4], vec![0, 1, 1, 3, 4]);
        assert_eq!(net_filled(&grid, &region, &bring), 1);
    }

    #[test]
    fn scale_invariance_of_fitness_ratio() {
        let mv = single(vec![0, 1, 9, 9, 10], vec![0, 1, 1, 5, 6]);
        let base = CostParams::preset_tm();
        let scaled = CostParams {
            constant_offset: base.constant_offset * 7.0,
            linear_factor: base.linear_factor * 7.0,
            ..base
        };
        let ratio = time_demand(&scaled, &mv) / time_demand(&base, &mv);
        assert!((ratio - 7.0).abs() < 1e-12);
    }
}
