//! Flat system configuration and the derived, validated scenario.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelConfig;
use crate::detection::{
    mean_bep_with_ceiling, BepReport, PatternTable, VarianceMode, DEFAULT_ENUMERATION_CEILING,
};
use crate::error::{AdmError, Result};
use crate::kinetics::{
    build_panel, separation_matrix_with_ceiling, LigandPanel, SeparationMatrix,
    DEFAULT_CONDITION_CEILING, DEFAULT_K_OFF_BASE, DEFAULT_K_ON, DEFAULT_V,
};

/// Every experiment parameter. Lengths in um, time in s, concentrations in
/// molecules per um^3.
///
/// Serialized as flat TOML, e.g.
///
/// ```toml
/// receptors = 1000
/// channels = 5
/// gamma = 5.0
/// distance = 20.0
/// n0 = 2e5
/// n1 = 1e6
/// variance_mode = "paper"
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    /// Number of receptors `N_R`.
    pub receptors: usize,
    /// Number of multiplexed channels, one ligand type each.
    pub channels: usize,
    /// Ratio of consecutive unbinding rates.
    pub gamma: f64,
    /// Transmitter-receiver distance.
    pub distance: f64,
    pub n0: f64,
    pub n1: f64,
    /// Interval threshold constant.
    pub v: f64,
    pub k_on: f64,
    pub k_off_base: f64,
    pub variance_mode: VarianceMode,
    pub condition_ceiling: f64,
    pub enumeration_ceiling: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            receptors: 1000,
            channels: 5,
            gamma: 5.0,
            distance: 20.0,
            n0: 2e5,
            n1: 1e6,
            v: DEFAULT_V,
            k_on: DEFAULT_K_ON,
            k_off_base: DEFAULT_K_OFF_BASE,
            variance_mode: VarianceMode::Paper,
            condition_ceiling: DEFAULT_CONDITION_CEILING,
            enumeration_ceiling: DEFAULT_ENUMERATION_CEILING,
        }
    }
}

impl SystemConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| AdmError::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
            .map_err(|e| AdmError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    /// Validates and derives the panel, separation matrix and channel.
    pub fn build(&self) -> Result<Scenario> {
        if self.receptors <= 2 {
            return Err(AdmError::InsufficientReceptors(self.receptors));
        }
        let panel = build_panel(self.channels, self.k_on, self.k_off_base, self.gamma, self.v)?;
        let sep = separation_matrix_with_ceiling(&panel, self.condition_ceiling)?;
        let channel = ChannelConfig::new(self.distance, self.n0, self.n1)?;
        Ok(Scenario {
            config: *self,
            panel,
            sep,
            channel,
        })
    }
}

/// A validated configuration with its derived kinetics.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: SystemConfig,
    pub panel: LigandPanel,
    pub sep: SeparationMatrix,
    pub channel: ChannelConfig,
}

impl Scenario {
    pub fn receptors(&self) -> usize {
        self.config.receptors
    }

    pub fn channels(&self) -> usize {
        self.panel.len()
    }

    pub fn mean_bep(&self, mode: VarianceMode) -> Result<BepReport> {
        mean_bep_with_ceiling(
            &self.panel,
            &self.sep,
            &self.channel,
            self.config.receptors,
            mode,
            self.config.enumeration_ceiling,
        )
    }

    pub fn pattern_table(&self) -> Result<PatternTable> {
        PatternTable::build(
            &self.panel,
            &self.sep,
            &self.channel,
            self.config.receptors,
            self.config.enumeration_ceiling,
        )
    }
}
