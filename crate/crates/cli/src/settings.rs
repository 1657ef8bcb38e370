//! Layered settings: built-in defaults, then the config file, then `--set`
//! overrides, then explicit command-line flags.

use std::path::Path;

use serde::Deserialize;
use tweezer_core::PlannerConfig;

use crate::Failure;

/// Instance parameters used when no grid file is given and as sweep defaults.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceDefaults {
    pub size: usize,
    pub ratio: f64,
    pub fill: f64,
    pub seed: u64,
}

impl Default for InstanceDefaults {
    fn default() -> Self {
        Self { size: 100, ratio: 1.5, fill: 0.5, seed: 0 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub planner: PlannerConfig,
    pub instance: InstanceDefaults,
}

impl Settings {
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, Failure> {
        let mut settings = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Failure::operational(format!("cannot read config {}: {e}", p.display())))?;
                Self::from_toml(&text).map_err(|e| Failure::operational(format!("{}: {e}", p.display())))?
            }
            None => Self::default(),
        };
        for item in overrides {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Failure::operational(format!("--set expects KEY=VALUE, got `{item}`")))?;
            settings.set(key.trim(), value).map_err(Failure::operational)?;
        }
        settings.planner.validate().map_err(|e| Failure::operational(e.to_string()))?;
        Ok(settings)
    }

    /// Planner fields sit at the top level; instance defaults in `[instance]`.
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| e.to_string())?;
        let instance = match table.remove("instance") {
            Some(v) => v.try_into().map_err(|e: toml::de::Error| format!("[instance]: {e}"))?,
            None => InstanceDefaults::default(),
        };
        let planner = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| e.to_string())?;
        Ok(Self { planner, instance })
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let bad = |e: &dyn std::fmt::Display| format!("{key}={value}: {e}");
        let v = value.trim();
        match key {
            "size" => self.instance.size = v.parse().map_err(|e| bad(&e))?,
            "ratio" => self.instance.ratio = v.parse().map_err(|e| bad(&e))?,
            "fill" => self.instance.fill = v.parse().map_err(|e| bad(&e))?,
            "seed" => self.instance.seed = v.parse().map_err(|e| bad(&e))?,
            _ if PlannerConfig::is_key(key) => self.planner.set(key, value).map_err(|e| e.to_string())?,
            _ => return Err(format!("unknown setting `{key}`")),
        }
        Ok(())
    }
}
