//! Engine settings. Precedence: built-in defaults, then a JSON config file,
//! then command-line flags.

use std::path::Path;

use kriging_inpaint::InpaintConfig;
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

/// Optional overrides; unset fields fall through to the next layer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub block_size: Option<usize>,
    pub margin: Option<usize>,
    pub max_neighbors: Option<usize>,
    pub bin_width: Option<f64>,
    pub workers: Option<usize>,
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    pub fn apply(&self, base: InpaintConfig) -> InpaintConfig {
        InpaintConfig {
            block_size: self.block_size.unwrap_or(base.block_size),
            margin: self.margin.unwrap_or(base.margin),
            max_neighbors: self.max_neighbors.unwrap_or(base.max_neighbors),
            bin_width: self.bin_width.unwrap_or(base.bin_width),
            workers: self.workers.unwrap_or(base.workers),
        }
    }
}

pub fn resolve(file: Option<&Path>, flags: &ConfigLayer) -> CliResult<InpaintConfig> {
    let mut cfg = InpaintConfig::default();
    if let Some(path) = file {
        cfg = ConfigLayer::from_file(path)?.apply(cfg);
    }
    let cfg = flags.apply(cfg);
    cfg.validate()?;
    Ok(cfg)
}

/// Serializable snapshot of an [`InpaintConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub block_size: usize,
    pub margin: usize,
    pub max_neighbors: usize,
    pub bin_width: f64,
    pub workers: usize,
}

impl From<&InpaintConfig> for ConfigSnapshot {
    fn from(c: &InpaintConfig) -> Self {
        Self { block_size: c.block_size, margin: c.margin, max_neighbors: c.max_neighbors, bin_width: c.bin_width, workers: c.workers }
    }
}
