//! Optional JSON config file. Each section mirrors a subcommand's flags;
//! explicit flags win over file values, file values win over defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sigtrade_core::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub config_version: Option<u32>,
    /// Fallback seed for any section that does not set its own.
    pub seed: Option<u64>,
    pub sig: Option<SigSection>,
    pub simulate: Option<SimulateSection>,
    pub fit: Option<FitSection>,
    pub train: Option<TrainSection>,
    pub table1: Option<Table1Section>,
    pub trade: Option<TradeSection>,
    pub compare: Option<CompareSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigSection {
    pub input: Option<PathBuf>,
    pub order: Option<usize>,
    pub raw_time: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub mean_level: Option<f64>,
    pub speed: Option<f64>,
    pub vol: Option<f64>,
    pub x0: Option<f64>,
    pub steps: Option<usize>,
    pub t_max: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub input: Option<PathBuf>,
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub mean_level: Option<f64>,
    pub speed: Option<f64>,
    pub vol: Option<f64>,
    pub x0: Option<f64>,
    pub steps: Option<usize>,
    pub t_max: Option<f64>,
    pub samples: Option<usize>,
    pub order: Option<usize>,
    pub payoff: Option<String>,
    pub iterations: Option<usize>,
    pub step_size: Option<f64>,
    pub init_scale: Option<f64>,
    pub threshold: Option<f64>,
    pub sharpness: Option<f64>,
    pub entry_cost: Option<f64>,
    pub exit_cost: Option<f64>,
    pub entry_rate: Option<f64>,
    pub exit_rate: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Section {
    pub rows: Option<String>,
    pub train_samples: Option<usize>,
    pub test_samples: Option<usize>,
    pub seeds: Option<usize>,
    pub steps: Option<usize>,
    pub t_max: Option<f64>,
    pub order: Option<usize>,
    pub iterations: Option<usize>,
    pub step_size: Option<f64>,
    pub init_scale: Option<f64>,
    pub threshold: Option<f64>,
    pub sharpness: Option<f64>,
    pub x0: Option<f64>,
    pub seed: Option<u64>,
    pub json: Option<bool>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TradeSection {
    pub manifest: Option<PathBuf>,
    pub side: Option<String>,
    pub generator: Option<String>,
    pub block_length: Option<usize>,
    pub order: Option<usize>,
    pub samples: Option<usize>,
    pub min_window: Option<usize>,
    pub iterations: Option<usize>,
    pub step_size: Option<f64>,
    pub init_scale: Option<f64>,
    pub threshold: Option<f64>,
    pub sharpness: Option<f64>,
    pub entry_cost: Option<f64>,
    pub exit_cost: Option<f64>,
    pub entry_rate: Option<f64>,
    pub exit_rate: Option<f64>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    #[serde(flatten)]
    pub trade: TradeSection,
    pub band_mult: Option<f64>,
    pub window: Option<usize>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read config {}: {e}", path.display())))?;
    let config: FileConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line() as u64,
        msg: format!("{}: {e}", path.display()),
    })?;
    if let Some(v) = config.config_version {
        if v != CONFIG_VERSION {
            return Err(Error::Validation(format!(
                "unsupported config_version {v}, expected {CONFIG_VERSION}"
            )));
        }
    }
    Ok(config)
}
