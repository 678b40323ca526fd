use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::airlink::SystemConfig;
use crate::error::{Error, Result};
use crate::jammers::{JammerKind, JammerSpec};
use crate::receivers::ReceiverOptions;

/// Jammer parameters that are not fixed by the jammer kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JammerParams {
    pub sparse_fraction: f64,
    pub active_row_cap: usize,
    pub hold_prob: f64,
    pub repeat_delay: usize,
}

impl Default for JammerParams {
    fn default() -> Self {
        let d = JammerSpec::new(JammerKind::DynamicBeam, 8);
        Self {
            sparse_fraction: d.sparse_fraction,
            active_row_cap: d.active_row_cap,
            hold_prob: d.hold_prob,
            repeat_delay: d.repeat_delay,
        }
    }
}

/// Everything a simulation run needs, read from a flat key/value file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    #[serde(flatten)]
    pub system: SystemConfig,
    #[serde(flatten)]
    pub receiver: ReceiverOptions,
    #[serde(flatten)]
    pub jammer: JammerParams,
    /// Pre-shared secret the codebooks are derived from.
    pub secret: String,
    #[serde(flatten, skip_serializing)]
    unknown: BTreeMap<String, toml::Value>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system: SystemConfig::default(),
            receiver: ReceiverOptions::default(),
            jammer: JammerParams::default(),
            secret: "mash-shared-secret".into(),
            unknown: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::InvalidInput(format!("config parse error: {e}")))?;
        if let Some(key) = cfg.unknown.keys().next() {
            return Err(Error::InvalidInput(format!("unknown config key '{key}'")));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if !(self.receiver.rank_factor > 0.0) {
            return Err(Error::InvalidParameter(format!("rank factor {} must be positive", self.receiver.rank_factor)));
        }
        Ok(())
    }

    /// Spec for `kind` with this run's antenna count and jammer parameters.
    pub fn jammer_spec(&self, kind: JammerKind) -> JammerSpec {
        let base = JammerSpec::new(kind, self.system.jammer_antennas);
        JammerSpec {
            sparse_fraction: self.jammer.sparse_fraction,
            active_row_cap: self.jammer.active_row_cap.min(base.antennas),
            hold_prob: self.jammer.hold_prob,
            repeat_delay: self.jammer.repeat_delay,
            ..base
        }
    }
}
