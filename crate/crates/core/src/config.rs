//! Planner configuration and its text representation.

use serde::{Deserialize, Deserializer, Serialize};

use crate::cost::CostParams;
use crate::error::{Error, Result};

/// Default number of (source line, target line) combinations the complex
/// suggester examines per planning step.
pub const DEFAULT_COMBO_BUDGET: usize = 24;

/// Hardware limits, motion permissions and search budget of the planner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    /// Maximum tones on the horizontal AOD (column tones).
    pub n_h: usize,
    /// Maximum tones on the vertical AOD (row tones).
    pub n_v: usize,
    /// Maximum number of simultaneously generated movable traps.
    pub k: usize,
    /// Row tones may sit between two rows.
    pub allow_row_gap_motion: bool,
    /// Column tones may sit between two columns.
    pub allow_col_gap_motion: bool,
    pub combo_budget: usize,
    #[serde(deserialize_with = "cost_from_preset_or_table")]
    pub cost: CostParams,
    pub allow_multiple_moves: bool,
    pub allow_empty_onto_occupied: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            n_h: 16,
            n_v: 16,
            k: 256,
            allow_row_gap_motion: true,
            allow_col_gap_motion: true,
            combo_budget: DEFAULT_COMBO_BUDGET,
            cost: CostParams::preset_tm2(),
            allow_multiple_moves: false,
            allow_empty_onto_occupied: true,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("n_h", self.n_h), ("n_v", self.n_v), ("k", self.k), ("combo_budget", self.combo_budget)] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        self.cost.validate()
    }

    /// No limits and every motion allowed; used to check physical consistency only.
    pub fn permissive() -> Self {
        Self {
            n_h: usize::MAX,
            n_v: usize::MAX,
            k: usize::MAX,
            allow_row_gap_motion: true,
            allow_col_gap_motion: true,
            allow_multiple_moves: true,
            allow_empty_onto_occupied: true,
            ..Self::default()
        }
    }

    /// Applies one `key=value` override. Cost fields are addressed as
    /// `cost.<field>`; `cost=tm` or `cost=tm2` selects a preset.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |e: &dyn std::fmt::Display| Error::Config(format!("{key}={value}: {e}"));
        let parse_usize = |v: &str| v.trim().parse::<usize>().map_err(|e| bad(&e));
        let parse_bool = |v: &str| v.trim().parse::<bool>().map_err(|e| bad(&e));
        let parse_f64 = |v: &str| v.trim().parse::<f64>().map_err(|e| bad(&e));
        match key {
            "n_h" => self.n_h = parse_usize(value)?,
            "n_v" => self.n_v = parse_usize(value)?,
            "k" => self.k = parse_usize(value)?,
            "allow_row_gap_motion" => self.allow_row_gap_motion = parse_bool(value)?,
            "allow_col_gap_motion" => self.allow_col_gap_motion = parse_bool(value)?,
            "combo_budget" => self.combo_budget = parse_usize(value)?,
            "allow_multiple_moves" => self.allow_multiple_moves = parse_bool(value)?,
            "allow_empty_onto_occupied" => self.allow_empty_onto_occupied = parse_bool(value)?,
            "cost" => {
                self.cost = CostParams::preset(value.trim())
                    .ok_or_else(|| bad(&"unknown cost preset, expected tm or tm2"))?
            }
            "cost.constant_offset" => self.cost.constant_offset = parse_f64(value)?,
            "cost.per_substep_offset" => self.cost.per_substep_offset = parse_f64(value)?,
            "cost.linear_factor" => self.cost.linear_factor = parse_f64(value)?,
            "cost.sqrt_factor" => self.cost.sqrt_factor = parse_f64(value)?,
            "cost.site_pitch" => self.cost.site_pitch = parse_f64(value)?,
            _ => return Err(Error::Config(format!("unknown planner setting `{key}`"))),
        }
        Ok(())
    }

    pub fn is_key(key: &str) -> bool {
        matches!(
            key,
            "n_h"
                | "n_v"
                | "k"
                | "allow_row_gap_motion"
                | "allow_col_gap_motion"
                | "combo_budget"
                | "allow_multiple_moves"
                | "allow_empty_onto_occupied"
                | "cost"
        ) || key.starts_with("cost.")
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CostSpec {
    Preset(String),
    Params(CostParams),
}

fn cost_from_preset_or_table<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CostParams, D::Error> {
    match CostSpec::deserialize(d)? {
        CostSpec::Preset(name) => CostParams::preset(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown cost preset `{name}`, expected tm or tm2"))),
        CostSpec::Params(p) => Ok(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_setup() {
        let c = PlannerConfig::default();
        assert_eq!((c.n_h, c.n_v, c.k), (16, 16, 256));
        assert!(c.allow_row_gap_motion && c.allow_col_gap_motion);
        assert!(!c.allow_multiple_moves && c.allow_empty_onto_occupied);
        assert_eq!(c.cost, CostParams::preset_tm2());
        assert!(c.validate().is_ok());
    }

    #[test]
    fn overrides() {
        let mut c = PlannerConfig::default();
        c.set("n_h", "8").unwrap();
        c.set("cost", "tm").unwrap();
        c.set("cost.site_pitch", "4.5").unwrap();
        c.set("allow_multiple_moves", "true").unwrap();
        assert_eq!(c.n_h, 8);
        assert_eq!(c.cost.linear_factor, 1.0 / 0.13);
        assert_eq!(c.cost.site_pitch, 4.5);
        assert!(c.allow_multiple_moves);
        assert!(c.set("bogus", "1").is_err());
        assert!(c.set("k", "many").is_err());
        assert!(c.set("cost", "tm3").is_err());
        c.set("k", "0").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_accepts_preset_or_table() {
        let c: PlannerConfig = serde_json::from_str(r#"{"cost":"tm","n_h":4}"#).unwrap();
        assert_eq!(c.cost, CostParams::preset_tm());
        assert_eq!(c.n_h, 4);
        let c: PlannerConfig = serde_json::from_str(
            r#"{"cost":{"constant_offset":1,"per_substep_offset":2,"linear_factor":3,"sqrt_factor":4,"site_pitch":5}}"#,
        )
        .unwrap();
        assert_eq!(c.cost.sqrt_factor, 4.0);
        assert!(serde_json::from_str::<PlannerConfig>(r#"{"cost":"slow"}"#).is_err());
        assert!(serde_json::from_str::<PlannerConfig>(r#"{"nh":4}"#).is_err());
    }
}
